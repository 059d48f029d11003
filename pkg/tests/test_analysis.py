import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from helpers import annulus_rings, result_from
from packgen import analysis, geometry
from packgen.analysis import (
    DegenerateSites,
    InsufficientData,
    PeakCase,
    census_charge,
    charge_census,
    contact_graph,
    fit_kappa,
    hexagonal_numbers,
    packing_fraction,
    rect_peaks,
    total_topological_charge,
    unique_peak_ratios,
    voronoi_cells,
)
from packgen.geometry import DomainSpec, Family
from packgen.packer import HEX_DENSITY, random_coords

CIRCLE = DomainSpec(Family.ELLIPSE, 1.0)
SQUARE = DomainSpec(Family.RECTANGLE, 1.0)
S3 = math.sqrt(3.0)


def chp7():
    c, r = oracles.hexagonal_ring_circle_7()
    return result_from(CIRCLE, c, r)


def hex_patch(spacing=0.3):
    """Centre plus two hexagonal shells of a triangular lattice."""
    pts = {(0, 0)}
    for _ in range(2):
        pts |= {(i + di, j + dj) for i, j in pts for di, dj in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)]}
    lattice = sorted(pts, key=lambda ij: (abs(ij[0]) + abs(ij[1]) + abs(ij[0] + ij[1]), ij))
    c = np.array([[spacing * (i + 0.5 * j), spacing * S3 / 2 * j] for i, j in lattice])
    return c


# ---------------------------------------------------------------------------
# packing fraction


def test_packing_fraction_examples():
    assert packing_fraction(CIRCLE, 1, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert packing_fraction(SQUARE, 36, 1 / 6) == pytest.approx(math.pi / 4, abs=1e-15)
    assert packing_fraction(DomainSpec(Family.CIRCLE_CARDIOID, 0.6), 0, 0.1) == 0.0


def test_packing_fraction_of_grid_oracle():
    c, r = oracles.square_grid(6)
    assert len(c) == 36
    assert packing_fraction(SQUARE, len(c), r) == pytest.approx(math.pi / 4, abs=1e-15)


# ---------------------------------------------------------------------------
# contacts


def test_two_tangent_disks():
    res = result_from(SQUARE, [[-0.25, 0.0], [0.25, 0.0]], 0.25)
    g = contact_graph(res)
    assert g.disk_contacts == [1, 1]
    assert g.border_contacts == [0, 0]
    assert g.edges == [(0, 1)]


def test_two_disks_in_circle_contacts():
    res = result_from(CIRCLE, [[-0.5, 0.0], [0.5, 0.0]], 0.5)
    g = contact_graph(res)
    assert g.disk_contacts == [1, 1]
    assert g.border_contacts == [1, 1]
    assert [g.total(i) for i in range(2)] == [2, 2]


def test_chp7_contacts():
    g = contact_graph(chp7())
    assert g.disk_contacts == [6] + [3] * 6
    assert g.border_contacts == [0] + [1] * 6


def test_near_miss_is_not_a_contact():
    res = result_from(SQUARE, [[-0.25, 0.0], [0.25 + 1e-4, 0.0]], 0.25)
    assert contact_graph(res).disk_contacts == [0, 0]


def test_corner_disk_touches_two_sides():
    res = result_from(SQUARE, [[0.5, 0.5], [-0.5, -0.5]], 0.5)
    assert contact_graph(res).border_contacts == [2, 2]


def test_annulus_ring_touches_both_circles():
    c, r = annulus_rings(0.5, [8], [0.75])
    assert r == pytest.approx(0.25)
    g = contact_graph(result_from(DomainSpec(Family.ANNULUS, 0.5), c, r))
    assert g.border_contacts == [2] * 8


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**31 - 1))
def test_contact_graph_is_symmetric(n, seed):
    rng = np.random.default_rng(seed)
    c = rng.uniform(-0.8, 0.8, size=(n, 2))
    # the closest pair is tangent by construction, so the relation is not empty
    i, j = np.triu_indices(n, 1)
    d = np.hypot(*(c[i] - c[j]).T)
    r = 0.5 * d.min()
    res = result_from(SQUARE, c, r)
    g = contact_graph(res)
    for a, nb in enumerate(g.adjacency):
        assert g.disk_contacts[a] == len(nb)
        for b in nb:
            assert a in g.adjacency[b]
    assert len(g.edges) >= 1


# ---------------------------------------------------------------------------
# Voronoi


def test_chp7_cells():
    cells = voronoi_cells(chp7())
    assert (cells[0].sides, cells[0].arcs, cells[0].charge) == (6, 0, 0)
    for cell in cells[1:]:
        assert (len(cell.neighbors), cell.sides, cell.arcs, cell.charge) == (3, 4, 1, 1)
    assert total_topological_charge(cells) == 6


def test_interior_hexagonal_cell_has_no_charge():
    c = hex_patch()
    r = 0.15
    cells = voronoi_cells(result_from(CIRCLE, c, r))
    assert (cells[0].sides, cells[0].arcs, cells[0].charge) == (6, 0, 0)
    for cell in cells[1:7]:
        assert cell.charge == 0 and cell.arcs == 0


@pytest.mark.parametrize("n", [3, 4, 8, 13])
def test_annulus_single_ring_cells_are_four_sided(n):
    a = 0.6
    c, r = annulus_rings(a, [n], [0.8])
    cells = voronoi_cells(result_from(DomainSpec(Family.ANNULUS, a), c, r))
    for cell in cells:
        assert (cell.sides, cell.arcs, cell.charge) == (4, 2, 0)
    assert total_topological_charge(cells) == 0


def test_annulus_two_rings_pentagons_with_one_arc():
    a = 0.8
    c, r = annulus_rings(a, [45, 45], [0.85, 0.95])
    cells = voronoi_cells(result_from(DomainSpec(Family.ANNULUS, a), c, r))
    assert len(cells) == 90
    for cell in cells:
        assert (cell.sides, cell.arcs, cell.charge) == (5, 1, 0)
    assert total_topological_charge(cells) == 0


def test_annulus_three_rings_total_charge_zero():
    a = 0.7
    c, r = annulus_rings(a, [30, 30, 30], [0.75, 0.85, 0.95])
    cells = voronoi_cells(result_from(DomainSpec(Family.ANNULUS, a), c, r))
    assert [cell.charge for cell in cells[30:60]] == [0] * 30
    assert all(cell.sides == 6 and cell.arcs == 0 for cell in cells[30:60])
    assert total_topological_charge(cells) == 0


def test_square_grid_diagonal_contacts_are_not_edges():
    c, r = oracles.square_grid(6)
    cells = voronoi_cells(result_from(SQUARE, c, r))
    by_sides = charge_census(cells)[0]
    assert by_sides == {4: 32, 3: 4}
    # 16 interior cells charge 2, 16 edge cells charge 1, 4 corners charge 2
    assert total_topological_charge(cells) == 16 * 2 + 16 + 4 * 2


def test_single_site_is_whole_domain():
    cells = voronoi_cells(result_from(CIRCLE, [[0.0, 0.0]], 1.0))
    assert len(cells) == 1
    assert cells[0].neighbors == [] and cells[0].arcs == 1
    assert cells[0].polygon.area == pytest.approx(math.pi, rel=1e-5)


def test_coincident_sites_raise():
    with pytest.raises(DegenerateSites):
        voronoi_cells(result_from(CIRCLE, [[0.1, 0.2], [0.1, 0.2], [-0.5, 0.0]], 0.1))


def test_census_rebuilds_total_charge():
    cells = voronoi_cells(chp7())
    census, arcs = charge_census(cells)
    assert census == {6: 1, 4: 6} and arcs == 6
    assert census_charge(census, arcs) == total_topological_charge(cells)


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from(["ellipse:1", "rect:1.4", "cross:0.7", "annulus:0.3", "cardioid:0.8"]),
    st.integers(2, 14),
    st.integers(0, 2**31 - 1),
)
def test_voronoi_invariants(text, n, seed):
    spec = DomainSpec.parse(text)
    rng = np.random.default_rng(seed)
    c = geometry.to_cartesian(spec, random_coords(spec, n, rng))
    i, j = np.triu_indices(n, 1)
    d = np.hypot(*(c[i] - c[j]).T)
    if d.min() < 1e-6:
        return
    r = 0.5 * d.min()
    cells = voronoi_cells(result_from(spec, c, r))
    pairs = {(min(k, m), max(k, m)) for cell in cells for k, m in [(cell.index, x) for x in cell.neighbors]}
    # neighbour relation is symmetric and side counts add up to twice the adjacencies
    for cell in cells:
        for m in cell.neighbors:
            assert cell.index in cells[m].neighbors
        assert cell.charge == 6 - cell.sides - cell.arcs
        assert cell.arcs <= len(geometry.outline(spec, 64))
    assert sum(len(cell.neighbors) for cell in cells) == 2 * len(pairs)
    census, arcs = charge_census(cells)
    assert census_charge(census, arcs) == total_topological_charge(cells)
    # clipped cells tile the polygonised domain
    dom = analysis.domain_polygon(spec)
    assert sum(cell.polygon.area for cell in cells) == pytest.approx(dom.area, rel=1e-9)


# ---------------------------------------------------------------------------
# rectangle peaks


LISTED_RATIOS = [
    16 / (2 + 7 * S3),
    9 * S3 / (9 + S3),
    21 / (2 + 5 * S3),
    25 / (2 + 4 * S3),
    31 / (2 + 3 * S3),
    41 * (S3 - 1) / 4,
]


def test_rect_peaks_reproduce_listed_ratios():
    peaks = {p.l: p for p in rect_peaks(60, 8)}
    for l, want in zip([8, 7, 6, 5, 4, 3], LISTED_RATIOS):
        assert abs(peaks[l].a - want) < 1e-12


def test_rect_peak_cases():
    peaks = rect_peaks(60, 8)
    cases = {p.l: p.case for p in peaks if p.l >= 3}
    assert cases == {
        8: PeakCase.EVEN_ROWS,
        7: PeakCase.ODD_ROWS,
        6: PeakCase.DIVISOR,
        5: PeakCase.DIVISOR,
        4: PeakCase.DIVISOR,
        3: PeakCase.DIVISOR,
    }


def test_rect_peak_frozen_values():
    p = {q.l: q for q in rect_peaks(60, 8)}
    assert p[8].a == pytest.approx(1.132795038095904, abs=1e-14)
    assert p[8].rho == pytest.approx(0.8340891960246237, abs=1e-14)
    assert p[5].a == pytest.approx(2.8001154717474486, abs=1e-14)
    assert p[3].a == pytest.approx(7.5035207775809925, abs=1e-14)


def test_rect_peak_density_matches_hexagonal_rows():
    for n in (12, 30, 60, 77):
        for p in rect_peaks(n, 10):
            # [-a, a] x [-1, 1]; peaks below a = 1 are not valid domains, use 4a
            area = geometry.area(DomainSpec(Family.RECTANGLE, p.a)) if p.a >= 1 else 4 * p.a
            assert abs(p.rho * area - n * math.pi * p.r**2) < 1e-10
            assert p.rho <= HEX_DENSITY + 1e-12


def test_rect_peak_rows_fit_the_rectangle():
    # l rows of hexagonally stacked disks of radius r span exactly the height 2
    for p in rect_peaks(60, 8):
        assert 2 * p.r + (p.l - 1) * S3 * p.r == pytest.approx(2.0, abs=1e-14)


def test_rect_peaks_rejects_bad_input():
    with pytest.raises(ValueError):
        rect_peaks(0, 3)
    with pytest.raises(ValueError):
        rect_peaks(5, 0)


def test_unique_peak_ratios_dedupes():
    peaks = rect_peaks(60, 8)
    ratios = unique_peak_ratios(peaks)
    assert ratios == sorted(ratios)
    assert all(b - a > 1e-12 for a, b in zip(ratios, ratios[1:]))
    for want in LISTED_RATIOS:
        assert min(abs(x - want) for x in ratios) < 1e-12


# ---------------------------------------------------------------------------
# hexagonal numbers and scaling


def test_hexagonal_numbers():
    assert hexagonal_numbers(1) == [7]
    assert hexagonal_numbers(3) == [7, 19, 37]
    assert hexagonal_numbers(5) == [7, 19, 37, 61, 91]
    with pytest.raises(ValueError):
        hexagonal_numbers(0)


def test_fit_kappa_recovers_generator():
    samples = [(n, HEX_DENSITY - 0.3 * n**-0.25) for n in (50, 100, 200)]
    fit = fit_kappa(samples)
    assert fit.kappa == pytest.approx(0.3, abs=1e-14)
    assert fit.rms < 1e-15
    assert fit.samples == tuple(samples)


def test_fit_kappa_flat_data():
    fit = fit_kappa([(n, HEX_DENSITY) for n in (10, 20)])
    assert fit.kappa == 0.0 and fit.rms == 0.0


def test_fit_kappa_needs_two_samples():
    with pytest.raises(InsufficientData):
        fit_kappa([(50, 0.8)])
    with pytest.raises(InsufficientData):
        fit_kappa([(0, 0.8), (5, 0.7)])


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 1.0), st.lists(st.integers(1, 5000), min_size=2, max_size=8, unique=True))
def test_fit_kappa_is_exact_on_model_data(kappa, ns):
    fit = fit_kappa([(n, HEX_DENSITY - kappa * n**-0.25) for n in ns])
    assert fit.kappa == pytest.approx(kappa, abs=1e-12)
    assert fit.rms < 1e-12


# ---------------------------------------------------------------------------
# report


def test_report_lines():
    lines = analysis.report(chp7())
    assert lines[0] == "domain ellipse:1.000000"
    assert "N 7" in lines
    assert "disk 0 contacts 6 border 0" in lines
    assert "cell 1 sides 4 arcs 1 charge 1" in lines
    assert "census sides 4 cells 6" in lines
    assert lines[-1] == "total_charge 6"
