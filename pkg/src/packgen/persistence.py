"""Reading and writing ``.pack`` result files and density-curve CSVs."""

import csv
import math
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import geometry
from .geometry import DomainSpec
from .packer import CurveSample, DensityCurve, PackingResult, Schedule

FORMAT = "packgen/1"
RHO_HEADER_TOL = 1e-12
RHO_BODY_TOL = 1e-9
CURVE_COLUMNS = ("a", "rho", "r", "N", "seed")

_SCHEDULE_KEYS = {f.name: f.type for f in fields(Schedule)}
_KNOWN = ("format", "domain", "a", "N", "r", "rho", "seed", "trials", *_SCHEDULE_KEYS, "wall_time")


class FormatError(ValueError):
    """Malformed file; ``line`` (1-based) and ``column`` locate the problem when known."""

    def __init__(self, message: str, line: int | None = None, column: str | None = None):
        self.line = line
        self.column = column
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _num(x) -> str:
    """Shortest decimal that reads back to the same double."""
    return repr(float(x))


def write_result(result: PackingResult, path, include_wall_time: bool = False) -> None:
    """Write ``result`` as a ``.pack`` file.

    Wall time is left out unless asked for, so that identical runs give
    identical bytes.
    """
    header = {
        "format": FORMAT,
        "domain": str(result.spec),
        "a": _num(result.spec.a),
        "N": str(result.n),
        "r": _num(result.r),
        "rho": _num(result.rho),
        "seed": str(int(result.seed)),
        "trials": str(int(result.trials)),
    }
    for name in _SCHEDULE_KEYS:
        value = getattr(result.schedule, name)
        header[name] = str(value) if isinstance(value, int) else _num(value)
    if include_wall_time:
        header["wall_time"] = _num(result.wall_time)
    for key, value in result.extra.items():
        header.setdefault(key, value)
    lines = [f"# {k}: {v}" for k, v in header.items()]
    lines += [f"{_num(x)} {_num(y)}" for x, y in np.asarray(result.centers, dtype=float).reshape(-1, 2)]
    Path(path).write_text("\n".join(lines) + "\n")


def _parse(value: str, kind, key: str, line: int):
    try:
        return int(value) if kind in (int, "int") else float(value)
    except ValueError:
        raise FormatError(f"bad value for {key!r}: {value!r}", line) from None


def read_result(path) -> PackingResult:
    """Parse a ``.pack`` file and cross-check its density against the body."""
    header: dict[str, tuple[str, int]] = {}
    body = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        text = raw.strip()
        if not text:
            continue
        if text.startswith("#"):
            key, sep, value = text[1:].partition(":")
            if not sep:
                raise FormatError(f"header line without ':' ({text!r})", lineno)
            header[key.strip()] = (value.strip(), lineno)
            continue
        parts = text.split()
        if len(parts) != 2:
            raise FormatError(f"expected 'x y', got {text!r}", lineno)
        try:
            body.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise FormatError(f"non-numeric coordinate in {text!r}", lineno) from None

    def get(key, kind=float, default=None):
        if key not in header:
            if default is not None:
                return default
            raise FormatError(f"missing header key {key!r}")
        value, lineno = header[key]
        return _parse(value, kind, key, lineno)

    fmt, fmt_line = header.get("format", (None, None))
    if fmt != FORMAT:
        raise FormatError(f"unsupported format {fmt!r}, expected {FORMAT!r}", fmt_line)
    domain_text, domain_line = header.get("domain", (None, None))
    if domain_text is None:
        raise FormatError("missing header key 'domain'")
    try:
        spec = DomainSpec.parse(domain_text)
        if "a" in header:
            spec = DomainSpec(spec.family, get("a"))
    except geometry.InvalidDomain as exc:
        raise FormatError(str(exc), domain_line) from None

    n = get("N", int)
    if len(body) != n:
        missing = f", {n - len(body)} missing" if len(body) < n else ""
        raise FormatError(f"header declares N={n} centres but the body has {len(body)}{missing}")
    r, rho = get("r"), get("rho")
    schedule_args = {k: get(k, kind, getattr(Schedule, k)) for k, kind in _SCHEDULE_KEYS.items()}
    try:
        schedule = Schedule(**schedule_args)
    except ValueError as exc:
        raise FormatError(f"invalid schedule: {exc}") from None

    centers = np.array(body, dtype=float).reshape(-1, 2)
    area = geometry.area(spec)
    if abs(rho - n * math.pi * r * r / area) > RHO_HEADER_TOL:
        raise FormatError(f"header rho {rho!r} disagrees with N*pi*r^2/area", header["rho"][1])
    if n:
        rho_body = n * math.pi * body_radius(spec, centers) ** 2 / area
        if abs(rho - rho_body) > RHO_BODY_TOL:
            raise FormatError(f"header rho {rho!r} disagrees with the centres (rho={rho_body!r})", header["rho"][1])

    extra = {k: v for k, (v, _) in header.items() if k not in _KNOWN}
    return PackingResult(
        spec=spec,
        centers=centers,
        r=r,
        rho=rho,
        seed=get("seed", int),
        trials=get("trials", int, 1),
        schedule=schedule,
        wall_time=get("wall_time", float, 0.0),
        extra=extra,
    )


def body_radius(spec: DomainSpec, centers) -> float:
    """Largest common radius the centres allow: half the closest pair, capped by clearance."""
    c = np.asarray(centers, dtype=float).reshape(-1, 2)
    r = float(np.min(geometry.boundary_distance(spec, c)))
    if len(c) > 1:
        i, j = np.triu_indices(len(c), 1)
        r = min(r, 0.5 * float(np.min(np.hypot(*(c[i] - c[j]).T))))
    return r


# ---------------------------------------------------------------------------
# density curves


def write_curve(curve: DensityCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_COLUMNS)
        for s in curve:
            w.writerow([_num(s.a), _num(s.rho), _num(s.r), s.n, s.seed])


def read_curve(path) -> DensityCurve:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(c.strip() for c in rows[0]) != CURVE_COLUMNS:
        raise FormatError(f"expected header {','.join(CURVE_COLUMNS)}", 1)
    curve = []
    kinds = (float, float, float, int, int)
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(CURVE_COLUMNS):
            raise FormatError(f"expected {len(CURVE_COLUMNS)} columns, got {len(row)}", lineno)
        values = []
        for col, (cell, kind) in enumerate(zip(row, kinds)):
            try:
                values.append(kind(cell))
            except ValueError:
                raise FormatError(
                    f"column {CURVE_COLUMNS[col]!r}: non-numeric value {cell!r}", lineno, CURVE_COLUMNS[col]
                ) from None
        curve.append(CurveSample(*values))
    return curve
