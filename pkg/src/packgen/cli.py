"""``packgen`` command line: pack, sweep, analyze, peaks, fit-kappa, render."""

import argparse
import logging
import math
import os
import sys
from pathlib import Path

from . import analysis, persistence, render
from .geometry import DomainSpec, InvalidDomain, parse_family
from .packer import Schedule, multi_trial, warm_start_sweep

log = logging.getLogger("packgen")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
    return value


def _domain(text: str) -> DomainSpec:
    try:
        return DomainSpec.parse(text)
    except InvalidDomain as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _family(text: str):
    try:
        return parse_family(text.split(":")[0])
    except InvalidDomain as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_schedule(p: argparse.ArgumentParser) -> None:
    d = Schedule()
    g = p.add_argument_group("schedule")
    g.add_argument("--s0", type=_finite, default=d.s0)
    g.add_argument("--growth", type=_finite, default=d.growth)
    g.add_argument("--smax", type=_finite, default=d.s_max)
    g.add_argument("--grad-tol", type=_finite, default=d.grad_tol)
    g.add_argument("--f-tol", type=_finite, default=d.f_tol)
    g.add_argument("--inner-iters", type=_positive_int, default=d.inner_max_iters)
    g.add_argument("--image-weight0", type=_finite, default=d.image_weight0)
    g.add_argument("--image-decay-stages", type=int, default=d.image_weight_decay_stages)
    p.add_argument("--trials", type=_positive_int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1)


def _schedule(args, parser) -> Schedule:
    try:
        return Schedule(
            s0=args.s0,
            growth=args.growth,
            s_max=args.smax,
            inner_max_iters=args.inner_iters,
            grad_tol=args.grad_tol,
            image_weight0=args.image_weight0,
            image_weight_decay_stages=args.image_decay_stages,
            f_tol=args.f_tol,
        )
    except ValueError as exc:
        parser.error(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="packgen", description="Dense packings of congruent disks by image-charge repulsion.")
    parser.add_argument("--verbose", "-v", action="count", default=0, help="progress on stderr (-vv for per-stage)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pack", help="pack N disks into one domain")
    p.add_argument("--domain", type=_domain, required=True, help="family:a, e.g. rect:1.5")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--out", type=Path, help="result file (.pack)")
    p.add_argument("--wall-time", action="store_true", help="record wall time in the result file")
    _add_schedule(p)

    p = sub.add_parser("sweep", help="density curve over the shape parameter with warm starts")
    p.add_argument("--domain", type=_family, required=True, help="family name (rect, cross, ellipse, cardioid, annulus)")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--a-from", type=_finite, required=True)
    p.add_argument("--a-to", type=_finite, required=True)
    p.add_argument("--step", type=_finite, default=0.01)
    p.add_argument("--out", type=Path, help="curve file (.csv)")
    p.add_argument("--pack-dir", type=Path, help="also write the best result at every grid point here")
    _add_schedule(p)

    p = sub.add_parser("analyze", help="contacts and Voronoi charges of a result file")
    p.add_argument("pack_file", type=Path)
    p.add_argument("--contact-tol", type=_finite, default=analysis.CONTACT_TOL)

    p = sub.add_parser("peaks", help="predicted rectangle aspect ratios of dense hexagonal packings")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--l-max", type=_positive_int, required=True)

    p = sub.add_parser("fit-kappa", help="fit rho = pi/sqrt(12) - kappa N^(-1/4)")
    p.add_argument("inputs", type=Path, nargs="+", help="curve CSVs and/or .pack files")

    p = sub.add_parser("render", help="SVG picture of a result file")
    p.add_argument("pack_file", type=Path)
    p.add_argument("--mode", choices=[m.value for m in render.RenderMode], default="contacts")
    p.add_argument("--out", type=Path, required=True)
    return parser


def _summary(res) -> str:
    return f"{res.n} {res.spec.a!r} {res.rho!r} {res.r!r} {res.seed}"


def cmd_pack(args, parser) -> int:
    schedule = _schedule(args, parser)
    res = multi_trial(args.domain, args.n, schedule, args.trials, args.seed, args.jobs)
    if args.out:
        persistence.write_result(res, args.out, include_wall_time=args.wall_time)
    print(_summary(res))
    return 0


def cmd_sweep(args, parser) -> int:
    if not args.step > 0:
        parser.error("--step must be positive")
    if args.a_from > args.a_to:
        parser.error("--a-from must not exceed --a-to")
    schedule = _schedule(args, parser)
    try:
        DomainSpec(args.domain, args.a_from)
        DomainSpec(args.domain, args.a_to)
    except InvalidDomain as exc:
        parser.error(str(exc))
    if args.pack_dir:
        args.pack_dir.mkdir(parents=True, exist_ok=True)

    def save(res):
        if args.pack_dir:
            persistence.write_result(res, args.pack_dir / f"{res.spec.family.value}_{res.spec.a:.6f}_N{res.n}.pack")

    curve = warm_start_sweep(
        args.domain, args.n, args.a_from, args.a_to, args.step, schedule, args.trials, args.seed, args.jobs, save
    )
    if args.out:
        persistence.write_curve(curve, args.out)
    for s in curve:
        print(f"{s.a!r} {s.rho!r} {s.r!r} {s.n} {s.seed}")
    return 0


def cmd_analyze(args, parser) -> int:
    res = persistence.read_result(args.pack_file)
    print("\n".join(analysis.report(res, args.contact_tol)))
    return 0


def cmd_peaks(args, parser) -> int:
    for p in analysis.rect_peaks(args.n, args.l_max):
        print(f"{p.l} {p.case.value} {p.a!r} {p.rho!r}")
    return 0


def cmd_fit_kappa(args, parser) -> int:
    samples = []
    for path in args.inputs:
        if path.suffix == ".pack":
            res = persistence.read_result(path)
            samples.append((res.n, res.rho))
        else:
            samples += [(s.n, s.rho) for s in persistence.read_curve(path)]
    try:
        fit = analysis.fit_kappa(samples)
    except analysis.InsufficientData as exc:
        log.error("%s", exc)
        return 1
    print(f"kappa {fit.kappa!r}")
    print(f"rms {fit.rms!r}")
    print(f"samples {len(fit.samples)}")
    return 0


def cmd_render(args, parser) -> int:
    res = persistence.read_result(args.pack_file)
    render.render_svg(res, args.mode, args.out)
    return 0


COMMANDS = {
    "pack": cmd_pack,
    "sweep": cmd_sweep,
    "analyze": cmd_analyze,
    "peaks": cmd_peaks,
    "fit-kappa": cmd_fit_kappa,
    "render": cmd_render,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, parser)
    except (OSError, persistence.FormatError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
