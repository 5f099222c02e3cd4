"""Tests for seed functions, catalog realization, loss, search, and checks.

The seed functions have closed forms, so they are checked by direct value
comparison against their defining formulas on a grid of interior points.
Catalog results are confirmed independently by running the extraction
pipeline on the returned candidate and comparing the recovered tree with
the request.  The loss has hand-computable cases: after x -> arctan x the
interval integral between the rays (0,inf) and (1,inf) is exactly pi/4,
and a pure sign flip costs exactly the structural penalty.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rsmirnov.blaschke_smirnov import Blaschke, RealSmirnov, real_affine
from rsmirnov.complex_poly import Poly
from rsmirnov.region_extraction import crosscheck, extract_full
from rsmirnov.synthesis import (
    CATALOG_TOL,
    SHAPE_PENALTY,
    BudgetExhausted,
    InfeasibleTarget,
    NotInCatalog,
    SynthesisProblem,
    SynthesisResult,
    catalog_realize,
    double_slit,
    endpoint_error,
    halfplane_node,
    koebe,
    power_chain,
    seed_catalog,
    synthesize_search,
    tree_loss,
    verify,
)
from rsmirnov.valence_tree import Interval, Node, Tree, is_isomorphic

INF = math.inf

# interior sample points away from the unit circle and from 0
RING = np.array(
    [r * np.exp(1j * t) for r in (0.3, 0.7) for t in np.linspace(0.1, 6.2, 17)]
)


def node_tree(sign, m):
    return Tree([Node("p1" if sign > 0 else "m1", sign, m)], [])


def edge_tree(lo, hi):
    return Tree(
        [Node("p1", 1, 1), Node("m1", -1, 1)], [("p1", "m1", Interval(lo, hi))]
    )


def chain4(c=0.0, first="below"):
    """Alternating four-node path with all breakpoints at c."""
    below, above = Interval(-INF, c), Interval(c, INF)
    ivs = [below, above, below] if first == "below" else [above, below, above]
    return Tree(
        [Node("p1", 1, 1), Node("m1", -1, 1), Node("p2", 1, 1), Node("m2", -1, 1)],
        [("p1", "m1", ivs[0]), ("m1", "p2", ivs[1]), ("p2", "m2", ivs[2])],
    )


def two_one_edge():
    """Valence-2 upper node joined to a valence-1 lower node over (-1, 1)."""
    return Tree(
        [Node("p1", 1, 2), Node("m1", -1, 1)], [("p1", "m1", Interval(-1.0, 1.0))]
    )


def parallel_triple():
    """Demands the bounded component below the slit be covered three times;
    both half-plane valences would have to be >= 3, but they are 1 and 2."""
    return Tree(
        [Node("p1", 1, 1), Node("m1", -1, 2)],
        [("p1", "m1", Interval(-INF, 0.0))] * 3,
    )


# ---------------------------------------------------------------------------
# seed functions
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("m", [1, 2, 3])
def test_halfplane_node_matches_formula(m):
    up = halfplane_node(1, m).eval(RING)
    down = halfplane_node(-1, m).eval(RING)
    w = RING**m
    np.testing.assert_allclose(up, 1j * (1 + w) / (1 - w), atol=1e-12)
    np.testing.assert_allclose(down, 1j * (w + 1) / (w - 1), atol=1e-12)


def test_double_slit_matches_formula():
    phi = double_slit()
    np.testing.assert_allclose(
        phi.eval(RING), 1j * RING / (1 - RING**2), atol=1e-12
    )
    # the golden-ratio pair is carried along for the construction checks
    a = (math.sqrt(5.0) - 1.0) / 2.0
    assert phi.b1.zeros == pytest.approx([-a])
    assert phi.b2.zeros == pytest.approx([a])


def test_koebe_matches_formula():
    np.testing.assert_allclose(
        koebe().eval(RING), RING / (1 - RING) ** 2, atol=1e-12
    )


@pytest.mark.parametrize("n", [2, 4, 6])
def test_power_chain_matches_formula(n):
    np.testing.assert_allclose(
        power_chain(n).eval(RING), ((1 + RING) / (1 - RING)) ** n, rtol=1e-12
    )


def test_seed_argument_errors():
    with pytest.raises(ValueError):
        power_chain(3)
    with pytest.raises(ValueError):
        power_chain(0)
    with pytest.raises(ValueError):
        halfplane_node(1, 0)


@pytest.mark.parametrize(
    "entry", seed_catalog(), ids=lambda e: f"{e.name}-{sorted(e.params.items())}"
)
def test_seed_catalog_advertised_trees(entry):
    ext = extract_full(entry.construct())
    assert endpoint_error(ext.tree, entry.tree) < 1e-6


# ---------------------------------------------------------------------------
# catalog realization
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("sign,m", [(1, 1), (1, 3), (-1, 2)])
def test_catalog_single_nodes_exact(sign, m):
    target = node_tree(sign, m)
    res = catalog_realize(target)
    assert res.status == "exact"
    assert res.loss == pytest.approx(0.0, abs=1e-12)
    assert res.entry.name == "halfplane-node"
    assert res.entry.params == {"sign": sign, "m": m}
    assert is_isomorphic(res.tree, target, mode="full")


def test_catalog_bounded_edge_scales_double_slit():
    res = catalog_realize(edge_tree(-1.0, 1.0))
    assert res.status == "exact"
    assert res.entry.name == "double-slit-edge"
    np.testing.assert_allclose(
        res.candidate.eval(RING), 2.0 * double_slit().eval(RING), atol=1e-12
    )


def test_catalog_rays_shift_koebe():
    up = catalog_realize(edge_tree(0.0, INF))
    down = catalog_realize(edge_tree(-INF, 0.0))
    assert up.status == "exact" and down.status == "exact"
    assert up.entry.name == down.entry.name == "koebe-ray"
    base = koebe().eval(RING)
    np.testing.assert_allclose(up.candidate.eval(RING), base + 0.25, atol=1e-12)
    np.testing.assert_allclose(down.candidate.eval(RING), -(base + 0.25), atol=1e-12)


def test_catalog_chains_exact_in_both_flavors():
    base = power_chain(4).eval(RING)

    natural = catalog_realize(chain4(first="below"))
    assert natural.status == "exact"
    assert natural.entry.params == {"n": 4, "shift": 0.0, "sign": 1}
    np.testing.assert_allclose(natural.candidate.eval(RING), base, atol=1e-12)

    flipped = catalog_realize(chain4(first="above"))
    assert flipped.status == "exact"
    assert flipped.entry.params == {"n": 4, "shift": 0.0, "sign": -1}
    np.testing.assert_allclose(flipped.candidate.eval(RING), -base, atol=1e-12)

    shifted = catalog_realize(chain4(c=2.0, first="below"))
    assert shifted.status == "exact"
    assert shifted.entry.params == {"n": 4, "shift": 2.0, "sign": 1}
    np.testing.assert_allclose(shifted.candidate.eval(RING), base + 2.0, atol=1e-12)


def test_catalog_reflection_of_bounded_edges():
    right = catalog_realize(edge_tree(0.2, 0.8))
    left = catalog_realize(edge_tree(-0.8, -0.2))
    np.testing.assert_allclose(
        left.candidate.eval(-RING), -right.candidate.eval(RING), atol=1e-12
    )


def test_catalog_result_json():
    out = catalog_realize(edge_tree(-1.0, 1.0)).to_json()
    assert set(out) == {"status", "loss", "evaluations", "candidate", "tree",
                        "catalog"}
    assert out["status"] == "exact"
    assert out["loss"] == pytest.approx(0.0, abs=1e-12)
    assert out["catalog"] == {"name": "double-slit-edge",
                              "params": {"lo": -1.0, "hi": 1.0}}
    assert out["candidate"] is not None and out["tree"] is not None


def test_not_in_catalog():
    # a valence-2 node, an odd path, a star, a bounded chain, and a chain
    # of six nodes all fall outside the closed-form families even though
    # each is a valid target
    chain6 = Tree(
        [Node("p1", 1, 1), Node("m1", -1, 1), Node("p2", 1, 1),
         Node("m2", -1, 1), Node("p3", 1, 1), Node("m3", -1, 1)],
        [("p1", "m1", Interval(-INF, 0.0)), ("m1", "p2", Interval(0.0, INF)),
         ("p2", "m2", Interval(-INF, 0.0)), ("m2", "p3", Interval(0.0, INF)),
         ("p3", "m3", Interval(-INF, 0.0))],
    )
    targets = [
        chain6,
        two_one_edge(),
        Tree(
            [Node("p1", 1, 1), Node("m1", -1, 1), Node("p2", 1, 1)],
            [("p1", "m1", Interval(-INF, 0.0)), ("m1", "p2", Interval(0.0, INF))],
        ),
        Tree(
            [Node("p1", 1, 1), Node("m1", -1, 1), Node("m2", -1, 1),
             Node("m3", -1, 1)],
            [("p1", "m1", Interval(-INF, -1.0)),
             ("p1", "m2", Interval(0.0, 1.0)),
             ("p1", "m3", Interval(2.0, INF))],
        ),
        Tree(
            [Node("p1", 1, 1), Node("m1", -1, 1), Node("p2", 1, 1),
             Node("m2", -1, 1)],
            [("p1", "m1", Interval(0.0, 1.0)),
             ("m1", "p2", Interval(1.0, 2.0)),
             ("p2", "m2", Interval(2.0, 3.0))],
        ),
    ]
    for target in targets:
        with pytest.raises(NotInCatalog):
            catalog_realize(target)


def test_infeasible_target_is_rejected_before_matching():
    with pytest.raises(InfeasibleTarget) as exc:
        catalog_realize(parallel_triple())
    assert exc.value.violations
    with pytest.raises(InfeasibleTarget):
        synthesize_search(SynthesisProblem(parallel_triple()))


# ---------------------------------------------------------------------------
# loss
# ---------------------------------------------------------------------------


def test_tree_loss_oracles():
    ray0, ray1 = edge_tree(0.0, INF), edge_tree(1.0, INF)
    assert tree_loss(ray0, ray0) == 0.0
    assert tree_loss(ray0, ray1) == pytest.approx(math.pi / 4)
    assert tree_loss(ray1, ray0) == pytest.approx(math.pi / 4)
    assert tree_loss(node_tree(1, 1), node_tree(-1, 1)) == SHAPE_PENALTY

    relabeled = Tree(
        [Node("a", 1, 1), Node("b", -1, 1)], [("a", "b", Interval(0.0, INF))]
    )
    assert tree_loss(ray0, relabeled) == 0.0


@given(st.floats(min_value=-5.0, max_value=5.0, allow_nan=False))
def test_tree_loss_ignores_node_labels_on_chains(c):
    plain = chain4(c=c)
    renamed = Tree(
        [Node(f"x{k}", n.sign, n.valence)
         for k, n in enumerate(plain.nodes.values())],
        [(f"x{list(plain.nodes).index(a)}", f"x{list(plain.nodes).index(b)}", iv)
         for a, b, iv in plain.edges],
    )
    assert tree_loss(renamed, plain) == 0.0


def test_endpoint_error_cases():
    assert endpoint_error(edge_tree(0.0, 1.0), edge_tree(0.0, 1.0)) == 0.0
    shifted = endpoint_error(edge_tree(0.01, 1.02), edge_tree(0.0, 1.0))
    assert shifted == pytest.approx(0.02)
    # finite against infinite endpoints never snap
    assert endpoint_error(edge_tree(0.0, 5.0), edge_tree(0.0, INF)) == INF
    # different shapes have no meaningful endpoint matching at all
    assert endpoint_error(node_tree(1, 1), edge_tree(0.0, 1.0)) == INF


@given(st.floats(min_value=1e-6, max_value=0.1, allow_nan=False))
def test_endpoint_error_measures_worst_displacement(d):
    err = endpoint_error(edge_tree(d, 1.0 + d / 2), edge_tree(0.0, 1.0))
    assert err == pytest.approx(d)


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def two_one_result():
    return synthesize_search(SynthesisProblem(two_one_edge()))


def test_search_recovers_single_node():
    res = synthesize_search(
        SynthesisProblem(node_tree(1, 1), restarts=4, budget=4000)
    )
    assert res.status == "exact"
    assert res.loss < 1e-9
    assert res.evaluations <= 4000
    assert verify(res).ok


def test_search_two_one_edge_reaches_target(two_one_result):
    assert two_one_result.status == "exact"
    assert two_one_result.loss < 1e-2
    assert two_one_result.evaluations < 100_000
    assert endpoint_error(two_one_result.tree, two_one_edge()) < 1e-2


def test_search_two_one_edge_crosschecks(two_one_result):
    report = crosscheck(
        two_one_result.candidate, two_one_edge(), n_samples=200, seed=11,
        delta=5e-2,
    )
    assert report.ok


def test_search_two_one_edge_verifies(two_one_result):
    rep = verify(two_one_result)
    assert rep.ok
    assert rep.matches_result_tree
    assert rep.crosscheck.ok
    assert rep.den_min_radius >= 1.0 - 1e-6


def test_search_is_deterministic():
    problem = SynthesisProblem(node_tree(1, 1), restarts=2, budget=2000, seed=3)
    first = synthesize_search(problem)
    second = synthesize_search(problem)
    assert first.loss == second.loss
    assert first.evaluations == second.evaluations
    assert first.candidate.num.coeffs == pytest.approx(second.candidate.num.coeffs)
    assert first.candidate.den.coeffs == pytest.approx(second.candidate.den.coeffs)


def test_search_budget_exhaustion_reports_best():
    with pytest.raises(BudgetExhausted) as exc:
        synthesize_search(SynthesisProblem(two_one_edge(), restarts=1, budget=10))
    best = exc.value.best
    assert best.status == "failed"
    assert best.candidate is None
    assert best.to_json()["loss"] is None


def test_search_degree_cap():
    with pytest.raises(ValueError):
        synthesize_search(SynthesisProblem(node_tree(1, 5)))


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def test_zero_outside_disk_is_rejected_at_construction():
    with pytest.raises(ValueError):
        Blaschke([1.2])


def test_verify_accepts_catalog_result():
    rep = verify(catalog_realize(edge_tree(-1.0, 1.0)))
    assert rep.ok
    assert rep.construction_ok and not rep.notes
    assert rep.matches_result_tree
    assert rep.crosscheck.ok
    # the denominator's roots are the slit tips on the circle
    assert rep.den_min_radius == pytest.approx(1.0)
    out = rep.to_json()
    assert out["ok"] is True
    assert out["notes"] == []


def test_verify_flags_interior_pole():
    # 1/(z - 1/2) is a perfectly good rational function, but its pole sits
    # inside the disk, so it is not in the class at all
    bad = RealSmirnov(Poly([1.0]), Poly([-0.5, 1.0]))
    rep = verify(SynthesisResult(bad, 0.0, None, "approximate"))
    assert not rep.ok
    assert not rep.construction_ok
    assert rep.den_min_radius == pytest.approx(0.5)
    assert any("denominator" in note for note in rep.notes)


def test_verify_flags_nonreal_boundary():
    # z + i is analytic everywhere but its circle values are not real
    bad = RealSmirnov(Poly([1j, 1.0]), Poly([1.0]))
    rep = verify(SynthesisResult(bad, 0.0, None, "approximate"))
    assert not rep.ok
    assert rep.boundary_max_im == pytest.approx(2.0, rel=1e-3)
    assert any("not real" in note for note in rep.notes)


def test_verify_needs_a_candidate():
    with pytest.raises(ValueError):
        verify(SynthesisResult(None, INF, None, "failed"))
