"""Tests for disk partitioning, interface tracing, and tree extraction."""

import math

import numpy as np
import pytest

from rsmirnov.blaschke_smirnov import (
    Blaschke,
    InconsistentValence,
    RealSmirnov,
    halfplane_valences,
    precompose_inner,
    random_helson,
    real_affine,
)
from rsmirnov.complex_poly import Poly
from rsmirnov.fixtures import (
    double_slit,
    fourth_power_map,
    koebe,
    lower_halfplane_map,
    upper_halfplane_map,
)
from rsmirnov.region_extraction import (
    BoundaryArc,
    End,
    ExtractionMismatch,
    crosscheck,
    extract_full,
    extract_tree,
    find_branch_points,
    merge_collections,
    partition,
    region_valence,
    render_svg,
    trace_interface,
    trace_segments,
    _assemble,
    _tile,
)
from rsmirnov.valence_tree import (
    Interval,
    Node,
    Tree,
    canonical_code,
    is_isomorphic,
    profile,
    transform_profile,
    validate,
)


def quartic_chain():
    """Alternating four-node path with images (-inf,0), (0,inf), (-inf,0)."""
    nodes = [Node("p1", 1, 1), Node("m1", -1, 1), Node("p2", 1, 1), Node("m2", -1, 1)]
    edges = [
        ("p1", "m1", Interval(-math.inf, 0.0)),
        ("m1", "p2", Interval(0.0, math.inf)),
        ("p2", "m2", Interval(-math.inf, 0.0)),
    ]
    return Tree(nodes, edges)


def slit_squared():
    """double_slit composed with z^2: boundary-real with a branch point at 0."""
    return precompose_inner(double_slit(), Blaschke([0, 0]))


@pytest.fixture(scope="module")
def ex_phi3():
    return extract_full(fourth_power_map())


@pytest.fixture(scope="module")
def ex_koebe():
    return extract_full(koebe())


@pytest.fixture(scope="module")
def ex_slit():
    return extract_full(double_slit())


@pytest.fixture(scope="module")
def ex_slit_squared():
    return extract_full(slit_squared())


# ---------------------------------------------------------------------------
# partition


@pytest.mark.parametrize(
    "make,n_plus,n_minus",
    [
        (upper_halfplane_map, 1, 0),
        (lower_halfplane_map, 0, 1),
        (double_slit, 1, 1),
        (koebe, 1, 1),
        (fourth_power_map, 2, 2),
    ],
)
def test_partition_component_counts(make, n_plus, n_minus):
    gp = partition(make(), 256)
    assert gp.n_plus == n_plus
    assert gp.n_minus == n_minus
    assert set(gp.regions) == set(range(1, n_plus + n_minus + 1))
    for rid, region in gp.regions.items():
        assert region.sign == (1 if rid <= n_plus else -1)
        assert region.area > 0.01
        assert abs(region.anchor) < 1.0
        # the anchor cell really belongs to its region
        assert gp.label_at(region.anchor) == rid


def test_partition_rejects_tiny_resolution():
    with pytest.raises(ValueError):
        partition(koebe(), 32)


def test_partition_classifies_known_points():
    gp = partition(koebe(), 256)
    assert gp.class_at(0.5j) == 1  # Im koebe > 0 in the upper half disk
    assert gp.class_at(-0.5j) == -1
    assert gp.class_at(1.5 + 0j) == 0  # outside the disk
    assert gp.label_at(0.5j) != gp.label_at(-0.5j)


def test_partition_double_slit_sides():
    # Im(iz/(1-z^2)) > 0 on the right half of the disk
    gp = partition(double_slit(), 256)
    plus = [r for r in gp.regions.values() if r.sign > 0]
    minus = [r for r in gp.regions.values() if r.sign < 0]
    assert len(plus) == len(minus) == 1
    assert plus[0].centroid.real > 0.1
    assert minus[0].centroid.real < -0.1
    assert abs(plus[0].area - minus[0].area) < 0.05


# ---------------------------------------------------------------------------
# region valence


@pytest.mark.parametrize(
    "make",
    [upper_halfplane_map, lower_halfplane_map, double_slit, koebe, fourth_power_map],
)
def test_region_valence_fixture_regions_are_simple(make):
    phi = make()
    gp = partition(phi, 256)
    for rid in gp.ids():
        assert region_valence(phi, gp, rid) == 1


@pytest.mark.parametrize(
    "make",
    [upper_halfplane_map, double_slit, koebe, fourth_power_map],
)
def test_region_valences_sum_to_halfplane_counts(make):
    phi = make()
    gp = partition(phi, 256)
    v_plus, v_minus = halfplane_valences(phi)
    got_plus = sum(region_valence(phi, gp, rid) for rid in gp.ids(1))
    got_minus = sum(region_valence(phi, gp, rid) for rid in gp.ids(-1))
    assert (got_plus, got_minus) == (v_plus, v_minus)


# ---------------------------------------------------------------------------
# branch points


@pytest.mark.parametrize(
    "make",
    [upper_halfplane_map, double_slit, koebe, fourth_power_map],
)
def test_fixtures_have_no_interior_branch_points(make):
    # koebe and the fourth power have critical points, but on the circle
    assert find_branch_points(make()) == []


def test_branch_point_of_composed_slit():
    bps = find_branch_points(slit_squared())
    assert len(bps) == 1
    assert abs(bps[0].z) < 1e-8
    assert abs(bps[0].value) < 1e-12


def test_branch_point_skips_nonreal_critical_values():
    # z^2 has critical value 0 at z = 0; shifting by i makes it non-real
    assert len(find_branch_points(RealSmirnov(Poly([0, 0, 1]), Poly([1])))) == 1
    assert find_branch_points(RealSmirnov(Poly([1j, 0, 1]), Poly([1]))) == []


# ---------------------------------------------------------------------------
# tracing


def test_trace_segments_koebe():
    phi = koebe()
    gp = partition(phi, 256)
    segs = trace_segments(phi, gp)
    assert len(segs) == 1
    (seg,) = segs
    assert seg.lo.kind == "circle"
    assert abs(seg.lo.value - (-0.25)) < 1e-6
    assert seg.hi.kind == "pole"
    assert seg.hi.value == math.inf
    assert gp.regions[seg.upper].sign == 1
    assert gp.regions[seg.lower].sign == -1
    # the traced arc is the real diameter
    assert np.max(np.abs(seg.points.imag)) < 1e-6


def test_trace_segments_double_slit():
    phi = double_slit()
    gp = partition(phi, 256)
    segs = trace_segments(phi, gp)
    assert len(segs) == 1
    (seg,) = segs
    assert abs(seg.lo.value - (-0.5)) < 1e-6
    assert abs(seg.hi.value - 0.5) < 1e-6
    # the arc is the imaginary diameter; the upper flank is the right half
    assert np.max(np.abs(seg.points.real)) < 1e-6
    assert gp.regions[seg.upper].centroid.real > 0


def test_trace_segments_fourth_power():
    phi = fourth_power_map()
    gp = partition(phi, 256)
    segs = trace_segments(phi, gp)
    assert len(segs) == 3
    intervals = sorted((s.lo.value, s.hi.value) for s in segs)
    assert intervals[0][0] == -math.inf and abs(intervals[0][1]) < 1e-6
    assert intervals[1][0] == -math.inf and abs(intervals[1][1]) < 1e-6
    assert abs(intervals[2][0]) < 1e-6 and intervals[2][1] == math.inf
    # arcs ending at the common boundary zero z = -1 share one endpoint value
    finite = {v for pair in intervals for v in pair if math.isfinite(v)}
    assert len(finite) == 1
    # flank pairs are pairwise distinct (three different interfaces)
    assert len({(s.upper, s.lower) for s in segs}) == 3


@pytest.mark.parametrize("make", [double_slit, koebe, fourth_power_map])
def test_traced_arcs_are_monotone_and_inside(make):
    phi = make()
    gp = partition(phi, 256)
    for seg in trace_segments(phi, gp):
        assert np.max(np.abs(seg.points)) <= 1.0 + 1e-6
        w = phi.eval(seg.points)
        re = np.real(w)
        assert np.all(np.diff(re) > -1e-6 * (1.0 + np.abs(re[1:])))


def test_trace_interface_koebe():
    phi = koebe()
    gp = partition(phi, 256)
    arc = trace_interface(phi, gp, 1, 2)
    assert abs(arc.interval.lo - (-0.25)) < 1e-6
    assert arc.interval.hi == math.inf
    with pytest.raises(ExtractionMismatch):
        trace_interface(phi, gp, 2, 1)  # flanks given in the wrong order


def test_tile_joins_pieces_at_branch_points():
    pts = np.array([0.0 + 0.0j, 0.1 + 0.0j])
    a = BoundaryArc(pts, 1, 3, End("circle", -1.0), End("branch", 0.0, 0))
    b = BoundaryArc(pts, 2, 3, End("branch", 0.0, 0), End("circle", 1.0))
    ordered, interval = _tile([b, a])
    assert ordered[0] is a and ordered[1] is b
    assert (interval.lo, interval.hi) == (-1.0, 1.0)


def test_tile_rejects_gaps_and_dangling_branch_ends():
    pts = np.array([0.0 + 0.0j, 0.1 + 0.0j])
    a = BoundaryArc(pts, 1, 3, End("circle", -1.0), End("circle", 0.0))
    b = BoundaryArc(pts, 1, 3, End("circle", 0.2), End("circle", 1.0))
    with pytest.raises(ExtractionMismatch):
        _tile([a, b])  # two disjoint pieces, no branch point to join them
    c = BoundaryArc(pts, 1, 3, End("circle", -1.0), End("branch", 0.0, 0))
    with pytest.raises(ExtractionMismatch):
        _tile([c])  # outer end may not be a branch point


# ---------------------------------------------------------------------------
# collections


def test_merge_collections_chain():
    # four positive regions chained through branch points, with negative
    # bystanders; welding joins same-sign regions only, but does so at
    # every shared branch point
    regions = {
        "A": (1, 2), "B": (1, 1), "C": (1, 1), "D": (1, 1),
        "E": (-1, 1), "F": (-1, 1), "G": (-1, 2),
    }
    branch_regions = [{"A", "B", "E"}, {"B", "C", "F"}, {"C", "D", "E", "G"}]
    colls = merge_collections(regions, branch_regions)
    by_members = {c.members: c for c in colls}
    assert ("A", "B", "C", "D") in by_members
    welded = by_members[("A", "B", "C", "D")]
    assert welded.sign == 1
    assert welded.valence == 5
    # E and G meet at the last branch point and weld; F stays alone
    assert {c.members for c in colls if c.sign < 0} == {("E", "G"), ("F",)}
    assert by_members[("E", "G")].valence == 3


def test_merge_collections_no_branch_points():
    regions = {1: (1, 1), 2: (-1, 2)}
    colls = merge_collections(regions, [])
    assert {c.members for c in colls} == {(1,), (2,)}
    assert all(len(c.members) == 1 for c in colls)


def test_assemble_welds_across_branch_point():
    # Im(z^2) partitions the disk into four sectors welded at the origin.
    # z^2 is not boundary-real, so feed the assembly valences directly.
    phi = RealSmirnov(Poly([0, 0, 1]), Poly([1]))
    gp = partition(phi, 256)
    bps = find_branch_points(phi)
    segs = trace_segments(phi, gp, bps)
    assert len(segs) == 4
    assert all(
        (s.lo.kind == "branch") != (s.hi.kind == "branch") for s in segs
    )
    tree, colls, node_of = _assemble(gp, {rid: 1 for rid in gp.regions}, segs, bps)
    assert validate(tree) == []
    root = tree.nodes["p1"]
    assert root.valence == 2
    welded = [c for c in colls if c.id == "p1"]
    assert len(welded[0].members) == 2
    assert sorted(str(iv) for _, _, iv in tree.edges) == ["(-1, 1)", "(-1, 1)"]
    assert set(node_of.values()) == {"p1", "m1", "m2"}


# ---------------------------------------------------------------------------
# extract_tree on the fixtures


def test_extract_single_region_trees():
    t1 = extract_tree(upper_halfplane_map())
    assert [(n.id, n.sign, n.valence) for n in t1.nodes.values()] == [("p1", 1, 1)]
    assert t1.edges == []
    t2 = extract_tree(lower_halfplane_map())
    assert [(n.id, n.sign, n.valence) for n in t2.nodes.values()] == [("m1", -1, 1)]


def test_extract_fourth_power_chain(ex_phi3):
    tree = ex_phi3.tree
    assert is_isomorphic(tree, quartic_chain(), mode="shape")
    prof = profile(tree)
    assert (prof.v_plus, prof.v_minus) == (2, 2)
    assert len(prof.breakpoints) == 1
    assert abs(prof.breakpoints[0]) < 1e-6
    assert prof.piece_mults == (2, 1)
    assert ex_phi3.branch_points == []
    assert len(ex_phi3.segments) == 3


def test_extract_koebe(ex_koebe):
    tree = ex_koebe.tree
    assert len(tree.nodes) == 2
    ((a, b, iv),) = tree.edges
    assert {tree.nodes[a].sign, tree.nodes[b].sign} == {1, -1}
    assert abs(iv.lo - (-0.25)) < 1e-6
    assert iv.hi == math.inf
    assert ex_koebe.halfplane == (1, 1)


def test_extract_double_slit(ex_slit):
    ((_, _, iv),) = ex_slit.tree.edges
    assert abs(iv.lo - (-0.5)) < 1e-6
    assert abs(iv.hi - 0.5) < 1e-6
    # the positive node is the right half of the disk
    (coll,) = [c for c in ex_slit.collections if c.sign > 0]
    assert ex_slit.partition.regions[coll.members[0]].centroid.real > 0


def test_extract_composed_slit_welds_plus_regions(ex_slit_squared):
    tree = ex_slit_squared.tree
    prof = profile(tree)
    assert (prof.v_plus, prof.v_minus) == (2, 2)
    assert len(tree.nodes) == 3
    assert tree.nodes["p1"].valence == 2
    (p1_coll,) = [c for c in ex_slit_squared.collections if c.id == "p1"]
    assert len(p1_coll.members) == 2
    for _, _, iv in tree.edges:
        assert abs(iv.lo - (-0.5)) < 1e-6
        assert abs(iv.hi - 0.5) < 1e-6
    assert len(ex_slit_squared.branch_points) == 1


def test_extract_region_sum_matches_halfplane(ex_phi3, ex_slit_squared):
    for ex in (ex_phi3, ex_slit_squared):
        got_plus = sum(
            v for rid, v in ex.region_valences.items()
            if ex.partition.regions[rid].sign > 0
        )
        got_minus = sum(
            v for rid, v in ex.region_valences.items()
            if ex.partition.regions[rid].sign < 0
        )
        assert (got_plus, got_minus) == ex.halfplane


def test_extraction_is_deterministic():
    t1 = extract_tree(fourth_power_map())
    t2 = extract_tree(fourth_power_map())
    assert is_isomorphic(t1, t2, mode="full")
    assert canonical_code(t1, with_intervals=True) == canonical_code(
        t2, with_intervals=True
    )


@pytest.mark.parametrize("make", [koebe, fourth_power_map, double_slit])
def test_extraction_stable_across_resolutions(make):
    phi = make()
    t_coarse = extract_tree(phi, resolution=256)
    t_fine = extract_tree(phi, resolution=512)
    assert canonical_code(t_coarse) == canonical_code(t_fine)
    p_coarse, p_fine = profile(t_coarse), profile(t_fine)
    assert len(p_coarse.breakpoints) == len(p_fine.breakpoints)
    for a, b in zip(p_coarse.breakpoints, p_fine.breakpoints):
        assert abs(a - b) < 1e-3


# ---------------------------------------------------------------------------
# crosscheck


@pytest.mark.parametrize("make", [fourth_power_map, koebe, double_slit])
def test_crosscheck_confirms_extracted_trees(make):
    phi = make()
    tree = extract_tree(phi)
    report = crosscheck(phi, tree, n_samples=200, seed=0)
    assert report.ok
    assert report.samples == 200
    js = report.to_json()
    assert js["ok"] is True and js["mismatches"] == []


def test_crosscheck_flags_corrupted_tree():
    phi = koebe()
    tree = extract_tree(phi)
    ((a, b, _),) = tree.edges
    wrong = Tree(list(tree.nodes.values()), [(a, b, Interval(0.0, math.inf))])
    report = crosscheck(phi, wrong, n_samples=200, seed=0)
    assert not report.ok
    assert all(m["kind"] == "real" for m in report.mismatches)
    # the corruption is visible exactly on (-0.25, 0)
    assert all(-0.25 < m["point"] < 0.0 for m in report.mismatches)
    assert any(m["expected"] == 0 and m["got"] == 1 for m in report.mismatches)


def test_crosscheck_real_axis_against_composed_profile(ex_slit_squared):
    report = crosscheck(slit_squared(), ex_slit_squared.tree, n_samples=200, seed=9)
    assert report.ok


# ---------------------------------------------------------------------------
# behaviour under transforms


def test_affine_transform_matches_transformed_profile():
    base = extract_tree(double_slit())
    scaled = extract_tree(real_affine(double_slit(), 2.0, 0.0))
    ((_, _, iv),) = scaled.edges
    assert abs(iv.lo - (-1.0)) < 1e-6
    assert abs(iv.hi - 1.0) < 1e-6
    want = profile(transform_profile(base, 2.0, 0.0))
    got = profile(scaled)
    assert (got.v_plus, got.v_minus) == (want.v_plus, want.v_minus)
    for a, b in zip(got.breakpoints, want.breakpoints):
        assert abs(a - b) < 1e-6


def test_negative_affine_flips_signs():
    base = extract_tree(koebe())
    flipped = extract_tree(real_affine(koebe(), -1.0, 0.0))
    ((_, _, iv),) = flipped.edges
    assert iv.lo == -math.inf
    assert abs(iv.hi - 0.25) < 1e-6
    want = profile(transform_profile(base, -1.0, 0.0))
    got = profile(flipped)
    assert (got.v_plus, got.v_minus) == (want.v_plus, want.v_minus)
    for a, b in zip(got.breakpoints, want.breakpoints):
        assert abs(a - b) < 1e-6


def test_precompose_squares_valence():
    phi = precompose_inner(upper_halfplane_map(), Blaschke([0, 0]))
    tree = extract_tree(phi)
    assert [(n.sign, n.valence) for n in tree.nodes.values()] == [(1, 2)]
    assert tree.edges == []


# ---------------------------------------------------------------------------
# random functions round-trip


@pytest.mark.parametrize("seed,deg", [(5, (1, 1)), (11, (2, 1)), (23, (2, 2))])
def test_random_helson_extraction_roundtrip(seed, deg):
    rng = np.random.default_rng(seed)
    phi = random_helson(rng, *deg)
    ex = extract_full(phi)
    assert validate(ex.tree) == []
    prof = profile(ex.tree)
    assert (prof.v_plus, prof.v_minus) == ex.halfplane
    assert ex.halfplane == halfplane_valences(phi)
    report = crosscheck(phi, ex.tree, n_samples=150, seed=seed + 1)
    assert report.ok


# ---------------------------------------------------------------------------
# rendering


def test_render_svg_smoke(ex_slit_squared):
    svg = render_svg(
        ex_slit_squared.partition,
        ex_slit_squared.segments,
        ex_slit_squared.collections,
    )
    assert svg.startswith("<svg")
    assert svg.rstrip().endswith("</svg>")
    assert "<polyline" in svg
    assert "p1:2" in svg
    assert svg.count("<rect") > 10
