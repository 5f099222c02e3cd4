"""Realizing a target valence tree as a rational real Smirnov function.

Every valid tree is the valence tree of some rational real Smirnov
function, so failing to find one is always a budget statement and never
an impossibility proof.  Two routes are implemented here.

A small closed-form catalog covers the classical shapes: a single node
of valence m is covered by i(1 + z^m)/(1 - z^m), a single bounded-
interval edge by an affine image of the double slit map iz/(1 - z^2), a
half-line edge by an affine image of the Koebe map z/(1 - z)^2, and an
alternating chain whose intervals share one finite breakpoint by an even
power of (1 + z)/(1 - z).

Everything else goes through derivative-free search over the zeros of
the two Blaschke products (and one phase each): simplex descent with
random restarts on a cheap algebraic loss built from root counts, then a
full tree extraction to confirm any claimed optimum.  Restarts are
independent searches merged by minimum loss, deterministic given the
seed and restart count.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .complex_poly import CircleTooClose, Poly, find_roots, winding_count
from .blaschke_smirnov import (
    Blaschke,
    RealSmirnov,
    BoundaryNotReal,
    DenominatorVanishesInDisk,
    NotRelativelyPrime,
    from_blaschke,
    from_rational,
    is_infinite,
    real_affine,
    valence_at,
)
from .valence_tree import (
    Node,
    Tree,
    canonical_code,
    is_isomorphic,
    profile,
    validate,
)
from .region_extraction import ExtractionError, crosscheck, extract_full

INF = math.inf
HALF_PI = math.pi / 2.0

# one differing canonical code costs as much as the whole real line of
# interval mismatch, so the optimizer always prefers fixing the shape
SHAPE_PENALTY = 1000.0
# a denominator zero inside the disk is not a Smirnov function at all;
# rank every such candidate behind every admissible one
CONSTRAINT_WEIGHT = 5000.0
# weight of the smooth pull that parks a candidate breakpoint on every
# target breakpoint (the interval integral alone goes flat once the
# heights agree almost everywhere)
PULL_WEIGHT = 0.5
CATALOG_TOL = 1e-6


class NotInCatalog(LookupError):
    """The target matches none of the closed-form families."""


class InfeasibleTarget(ValueError):
    """The target fails validation, so no function can realize it."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(
            "target is not a valid tree: "
            + "; ".join(str(v) for v in self.violations)
        )


class BudgetExhausted(RuntimeError):
    """Search ran out of evaluations without matching the target shape.

    The best candidate found (status "failed") rides along as .best.
    """

    def __init__(self, best):
        self.best = best
        super().__init__(
            "evaluation budget exhausted; best loss %.6g" % best.loss
        )


# ---------------------------------------------------------------------------
# seed functions
# ---------------------------------------------------------------------------


def halfplane_node(sign: int, m: int) -> RealSmirnov:
    """i(1 + z^m)/(1 - z^m): the disk covers one half plane m times.

    The Helson pair is simply (1, z^m); negating (swapping the pair)
    covers the lower half plane instead.
    """
    if m < 1:
        raise ValueError("valence must be >= 1")
    if sign > 0:
        return from_blaschke(Blaschke(), Blaschke([0.0] * m))
    return from_blaschke(Blaschke([0.0] * m), Blaschke())


def double_slit() -> RealSmirnov:
    """iz/(1 - z^2): two slits, one bounded real interval (-1/2, 1/2).

    The golden-ratio zeros -+a, a = (sqrt(5)-1)/2, are exactly the
    Blaschke pair whose Helson quotient reduces to iz/(1 - z^2).
    """
    a = (math.sqrt(5.0) - 1.0) / 2.0
    return from_blaschke(Blaschke([-a]), Blaschke([a]))


def koebe() -> RealSmirnov:
    """z/(1 - z)^2: slit plane, single edge with interval (-1/4, inf)."""
    return from_rational(Poly([0.0, 1.0]), Poly([1.0, -2.0, 1.0]))


def power_chain(n: int) -> RealSmirnov:
    """((1 + z)/(1 - z))^n for even n: an alternating chain of n nodes.

    The power map is real on the circle only for even n (the Cayley
    transform sends the circle to the imaginary axis, whose even powers
    are real).  Its interval pattern alternates around 0, with the two
    end edges below 0 when n = 0 mod 4 and above 0 when n = 2 mod 4.

    The expanded coefficients concentrate an n-fold zero at -1 and an
    n-fold pole at +1, so the evaluation noise near those points grows
    like eps^(1/n); the construction checks reject n >= 8 outright.
    """
    if n < 2 or n % 2:
        raise ValueError("the power map is boundary-real only for even n >= 2")
    num = Poly([float(math.comb(n, k)) for k in range(n + 1)])
    den = Poly([float(math.comb(n, k)) * (-1.0) ** k for k in range(n + 1)])
    # the denominator is exactly (1 - z)^n, an n-fold root on the circle;
    # its computed roots scatter in a ring of radius ~ eps^(1/n), so the
    # circle band must be widened accordingly or the root counter would
    # misread part of the scatter as interior zeros
    tol = max(1e-9, 10.0 * float(np.finfo(float).eps) ** (1.0 / n))
    return from_rational(num, den, circle_tol=tol)


@dataclass
class SeedCatalogEntry:
    """One matched closed form: its name, parameters, and advertised tree."""

    name: str
    params: dict
    tree: Tree
    build: Callable[[], RealSmirnov]

    def construct(self) -> RealSmirnov:
        return self.build()


def _node_tree(sign: int, m: int) -> Tree:
    return Tree([Node("p1" if sign > 0 else "m1", sign, m)], [])


def _edge_tree(lo: float, hi: float) -> Tree:
    return Tree(
        [Node("p1", 1, 1), Node("m1", -1, 1)], [("p1", "m1", (lo, hi))]
    )


def seed_catalog() -> list[SeedCatalogEntry]:
    """Representative entries, one (or two) per closed-form family."""
    chain = Tree(
        [Node("p1", 1, 1), Node("m1", -1, 1), Node("p2", 1, 1),
         Node("m2", -1, 1)],
        [("p1", "m1", (-INF, 0.0)), ("m1", "p2", (0.0, INF)),
         ("p2", "m2", (-INF, 0.0))],
    )
    return [
        SeedCatalogEntry("halfplane-node", {"sign": 1, "m": 1},
                         _node_tree(1, 1), lambda: halfplane_node(1, 1)),
        SeedCatalogEntry("halfplane-node", {"sign": -1, "m": 2},
                         _node_tree(-1, 2), lambda: halfplane_node(-1, 2)),
        SeedCatalogEntry("double-slit-edge", {"lo": -0.5, "hi": 0.5},
                         _edge_tree(-0.5, 0.5), double_slit),
        SeedCatalogEntry("koebe-ray", {"lo": -0.25, "hi": INF},
                         _edge_tree(-0.25, INF), koebe),
        SeedCatalogEntry("koebe-ray", {"lo": -INF, "hi": 0.25},
                         _edge_tree(-INF, 0.25),
                         lambda: real_affine(koebe(), -1.0, 0.0)),
        SeedCatalogEntry("power-chain", {"n": 4, "shift": 0.0, "sign": 1},
                         chain, lambda: power_chain(4)),
    ]


# ---------------------------------------------------------------------------
# catalog matching
# ---------------------------------------------------------------------------


def _match_chain(target: Tree):
    """(n, c, s) when the target is the four-node chain s*M^4 + c.

    Longer chains do have the closed form s*M^n + c, but confirming one
    means tracing through the n-fold zero and pole that the power map
    piles onto the two circle points -+1, where the evaluation noise of
    the expanded coefficients swamps the signal for n >= 6; those targets
    are left to the search.
    """
    n = len(target.nodes)
    if n != 4 or len(target.edges) != n - 1:
        return None
    if any(node.valence != 1 for node in target.nodes.values()):
        return None
    degs = {v: target.degree(v) for v in target.nodes}
    if any(d > 2 for d in degs.values()):
        return None
    ends = sorted(v for v, d in degs.items() if d == 1)
    if len(ends) != 2:
        return None

    # walk the path, collecting intervals in order
    order = [ends[0]]
    prev = None
    while len(order) < n:
        nxt = [u for u in target.neighbors(order[-1]) if u != prev]
        if len(nxt) != 1:
            return None
        prev = order[-1]
        order.append(nxt[0])
    by_pair = {}
    for a, b, iv in target.edges:
        by_pair[(a, b)] = iv
        by_pair[(b, a)] = iv
    ivs = [by_pair[(order[i], order[i + 1])] for i in range(n - 1)]

    kinds = []
    breaks = []
    for iv in ivs:
        if iv.lo == -INF and math.isfinite(iv.hi):
            kinds.append("below")
            breaks.append(iv.hi)
        elif math.isfinite(iv.lo) and iv.hi == INF:
            kinds.append("above")
            breaks.append(iv.lo)
        else:
            return None
    c = breaks[0]
    if any(abs(b - c) > 1e-9 * max(1.0, abs(c)) for b in breaks):
        return None
    if any(kinds[i] == kinds[i + 1] for i in range(len(kinds) - 1)):
        return None
    natural_ends = "below" if n % 4 == 0 else "above"
    s = 1 if kinds[0] == natural_ends else -1
    return n, c, s


def _match_catalog(target: Tree) -> SeedCatalogEntry:
    nodes = list(target.nodes.values())
    if len(nodes) == 1 and not target.edges:
        node = nodes[0]
        return SeedCatalogEntry(
            "halfplane-node", {"sign": node.sign, "m": node.valence},
            target,
            lambda s=node.sign, m=node.valence: halfplane_node(s, m),
        )
    if (len(nodes) == 2 and len(target.edges) == 1
            and all(node.valence == 1 for node in nodes)):
        iv = target.edges[0][2]
        lo, hi = iv.lo, iv.hi
        if math.isfinite(lo) and math.isfinite(hi):
            return SeedCatalogEntry(
                "double-slit-edge", {"lo": lo, "hi": hi}, target,
                lambda a=lo, b=hi: real_affine(
                    double_slit(), b - a, (a + b) / 2.0),
            )
        if math.isfinite(lo) and hi == INF:
            return SeedCatalogEntry(
                "koebe-ray", {"lo": lo, "hi": INF}, target,
                lambda c=lo: real_affine(koebe(), 1.0, c + 0.25),
            )
        if lo == -INF and math.isfinite(hi):
            return SeedCatalogEntry(
                "koebe-ray", {"lo": -INF, "hi": hi}, target,
                lambda c=hi: real_affine(koebe(), -1.0, c - 0.25),
            )
    chain = _match_chain(target)
    if chain is not None:
        n, c, s = chain
        return SeedCatalogEntry(
            "power-chain", {"n": n, "shift": c, "sign": s}, target,
            lambda: real_affine(power_chain(n), float(s), c),
        )
    raise NotInCatalog("target matches no closed-form family")


# ---------------------------------------------------------------------------
# loss
# ---------------------------------------------------------------------------


def _arc(x: float) -> float:
    """arctan with the infinite endpoints pinned to -+pi/2."""
    if x == INF:
        return HALF_PI
    if x == -INF:
        return -HALF_PI
    return math.atan(x)


def _profile_distance(pa, pb) -> float:
    """Integral of |difference| of two real profiles after x -> arctan x.

    Both profiles are step functions, so the integral is computed exactly
    piece by piece on the merged breakpoint grid.
    """
    cuts = sorted({_arc(b) for b in pa.breakpoints}
                  | {_arc(b) for b in pb.breakpoints})
    grid = [-HALF_PI, *cuts, HALF_PI]
    total = 0.0
    for u0, u1 in zip(grid, grid[1:]):
        if u1 - u0 < 1e-14:
            continue
        x = math.tan(0.5 * (u0 + u1))
        total += abs(pa.multiplicity_at(x) - pb.multiplicity_at(x)) * (u1 - u0)
    return total


def tree_loss(extracted: Tree, target: Tree) -> float:
    """Structural penalty plus the interval distance of the two profiles.

    Depends only on canonical codes and profiles, so relabeling node ids
    on either side leaves the loss unchanged.
    """
    structural = 0.0
    if canonical_code(extracted) != canonical_code(target):
        structural = SHAPE_PENALTY
    return structural + _profile_distance(profile(extracted), profile(target))


def _end_distance(x: float, y: float) -> float:
    if math.isinf(x) or math.isinf(y):
        return 0.0 if x == y else INF
    return abs(x - y)


def endpoint_error(extracted: Tree, target: Tree) -> float:
    """Worst endpoint displacement under the best interval matching.

    Infinite when the shapes differ, when an endpoint changes kind
    (finite against infinite), or when snapping each extracted interval
    to its nearest target interval does not reproduce the target tree
    exactly.
    """
    if not is_isomorphic(extracted, target, mode="shape"):
        return INF
    tgt_ivs = [(iv.lo, iv.hi) for _, _, iv in target.edges]
    if not tgt_ivs:
        return 0.0
    worst = 0.0
    snapped_edges = []
    for a, b, iv in extracted.edges:
        best_iv, best_d = None, INF
        for lo, hi in tgt_ivs:
            d = max(_end_distance(iv.lo, lo), _end_distance(iv.hi, hi))
            if d < best_d:
                best_iv, best_d = (lo, hi), d
        if best_iv is None or not math.isfinite(best_d):
            return INF
        worst = max(worst, best_d)
        snapped_edges.append((a, b, best_iv))
    snapped = Tree(list(extracted.nodes.values()), snapped_edges)
    if not is_isomorphic(snapped, target, mode="full"):
        return INF
    return worst


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------


@dataclass
class SynthesisResult:
    """A candidate function with its loss against the target.

    status "exact" needs full tree isomorphism with every endpoint within
    tolerance and a clean crosscheck; "approximate" means the shape is
    right but some endpoint is not; "failed" means not even the shape was
    matched (such results only ride inside BudgetExhausted).
    """

    candidate: RealSmirnov | None
    loss: float
    tree: Tree | None
    status: str
    entry: SeedCatalogEntry | None = None
    evaluations: int = 0

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "loss": self.loss if math.isfinite(self.loss) else None,
            "evaluations": self.evaluations,
            "candidate": None if self.candidate is None
            else self.candidate.to_json(),
            "tree": None if self.tree is None else self.tree.to_json(),
        }
        if self.entry is not None:
            out["catalog"] = {"name": self.entry.name,
                              "params": dict(self.entry.params)}
        return out


def catalog_realize(target: Tree, resolution: int = 512) -> SynthesisResult:
    """Closed-form realization, confirmed by a full extraction."""
    violations = validate(target)
    if violations:
        raise InfeasibleTarget(violations)
    entry = _match_catalog(target)
    phi = entry.construct()
    ext = extract_full(phi, resolution=resolution)
    loss = tree_loss(ext.tree, target)
    err = endpoint_error(ext.tree, target)
    status = "exact" if err < CATALOG_TOL else "approximate"
    return SynthesisResult(phi, loss, ext.tree, status, entry=entry)


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------


@dataclass
class SynthesisProblem:
    """A validated target plus the optimizer budget.

    The product degrees are not free: deg B1 and deg B2 must equal the
    target's lower and upper half-plane valences.
    """

    target: Tree
    restarts: int = 16
    budget: int = 100_000
    seed: int = 0
    tol: float = 1e-2

    @property
    def deg_b1(self) -> int:
        return sum(n.valence for n in self.target.nodes.values() if n.sign < 0)

    @property
    def deg_b2(self) -> int:
        return sum(n.valence for n in self.target.nodes.values() if n.sign > 0)


def _squash(px: float, py: float) -> complex:
    """Unconstrained plane into the open disk, radially: |w| = r/(1+r)."""
    r = math.hypot(px, py)
    w = complex(px, py) / (1.0 + r)
    if abs(w) > 1.0 - 1e-9:
        w *= (1.0 - 1e-9) / abs(w)
    return w


def _params_to_blaschke(x, deg1: int, deg2: int):
    z1 = [_squash(x[2 * k], x[2 * k + 1]) for k in range(deg1)]
    off = 2 * deg1
    z2 = [_squash(x[off + 2 * k], x[off + 2 * k + 1]) for k in range(deg2)]
    return (Blaschke(z1, cmath.exp(1j * x[-2])),
            Blaschke(z2, cmath.exp(1j * x[-1])))


def _real_critical_values(phi: RealSmirnov) -> list[float]:
    """Real values of phi at the critical points in the closed disk.

    These are exactly the points where the real preimage count can step:
    interior critical points with real value, and circle critical points
    where level arcs end.  Values are deduplicated to 1e-8.
    """
    w = phi.w_poly()
    if w.degree < 1:
        return []
    vals = []
    for root, mult in find_roots(w).clusters():
        r = abs(root)
        # an m-fold root is only located to about eps^(1/m), so widen the
        # circle band accordingly before trusting "strictly inside"
        guard = max(1e-6, 50.0 * 2.2e-16 ** (1.0 / mult))
        if r > 1.0 + guard:
            continue
        if r < 1.0 - guard:
            v = phi.eval(root)
            if is_infinite(v):
                continue
            if abs(v.imag) <= 1e-6 * max(1.0, abs(v)):
                vals.append(v.real)
        else:
            try:
                v = phi.boundary_value(math.atan2(root.imag, root.real))
            except BoundaryNotReal:
                continue
            if math.isfinite(v):
                vals.append(v)
    vals.sort()
    out: list[float] = []
    for v in vals:
        if not out or v - out[-1] > 1e-8:
            out.append(v)
    return out


def _surrogate_loss(phi: RealSmirnov, tprof, tarcs) -> float:
    """Extraction-free loss: exact interval integral from root counts,
    plus a smooth pull parking a candidate breakpoint on every target
    breakpoint (the integral alone is flat once heights agree almost
    everywhere, which is what lets simplex descent polish endpoints)."""
    bps = _real_critical_values(phi)
    cuts = sorted({_arc(b) for b in bps}
                  | {_arc(b) for b in tprof.breakpoints})
    grid = [-HALF_PI, *cuts, HALF_PI]
    loss = 0.0
    try:
        for u0, u1 in zip(grid, grid[1:]):
            if u1 - u0 < 1e-14:
                continue
            x = math.tan(0.5 * (u0 + u1))
            loss += (abs(valence_at(phi, x)[0] - tprof.multiplicity_at(x))
                     * (u1 - u0))
    except ValueError:
        return 1e6
    barcs = [_arc(b) for b in bps]
    for ta in tarcs:
        loss += PULL_WEIGHT * (min(abs(ba - ta) for ba in barcs)
                               if barcs else math.pi)
    return loss


def synthesize_search(problem: SynthesisProblem) -> SynthesisResult:
    """Simplex descent with restarts over Blaschke zeros and phases.

    Each restart minimizes the algebraic loss, rebuilding a fresh simplex
    at its own optimum until that stops paying; the restart's best point
    is then confirmed by a full extraction.  Returns as soon as a
    confirmed candidate is exact; otherwise returns the best shape-
    matching candidate, or raises BudgetExhausted when not even the shape
    was found.
    """
    target = problem.target
    violations = validate(target)
    if violations:
        raise InfeasibleTarget(violations)
    deg1, deg2 = problem.deg_b1, problem.deg_b2
    if deg1 > 4 or deg2 > 4:
        raise ValueError("search is capped at Blaschke degree 4 per product")
    tprof = profile(target)
    tcode = canonical_code(target)
    tarcs = [_arc(b) for b in tprof.breakpoints if math.isfinite(b)]
    ncoords = 2 * (deg1 + deg2)
    budget = int(problem.budget)
    evals = 0
    best: SynthesisResult | None = None

    def objective(x):
        nonlocal evals
        evals += 1
        b1, b2 = _params_to_blaschke(x, deg1, deg2)
        p1, q1 = b1.as_rational()
        p2, q2 = b2.as_rational()
        aa = p1 * q2
        bb = p2 * q1
        den = aa - bb
        if den.is_zero():
            return 1e7
        penalty = 0.0
        if den.degree >= 1:
            for r0 in find_roots(den).roots:
                rr = abs(r0)
                if rr < 1.0 - 1e-6:
                    penalty += 1.0 + (1.0 - rr)
        if penalty > 0.0:
            return CONSTRAINT_WEIGHT * penalty
        phi = RealSmirnov((aa + bb).scale(1j), den)
        return _surrogate_loss(phi, tprof, tarcs)

    for restart in range(max(1, int(problem.restarts))):
        if evals >= budget:
            break
        rng = np.random.default_rng((problem.seed, restart))
        x = np.concatenate([rng.normal(0.0, 0.8, ncoords),
                            rng.uniform(0.0, 2.0 * math.pi, 2)])
        fbest = INF
        for _ in range(6):
            remaining = budget - evals
            if remaining <= 0:
                break
            res = minimize(
                objective, x, method="Nelder-Mead",
                options={"maxfev": min(2500, remaining), "xatol": 1e-8,
                         "fatol": 1e-12, "adaptive": True},
            )
            if not res.fun < fbest - 1e-12:
                if res.fun < fbest:
                    x, fbest = res.x, res.fun
                break
            x, fbest = res.x, res.fun
        if fbest >= 1.0:
            continue
        b1, b2 = _params_to_blaschke(x, deg1, deg2)
        try:
            phi = from_blaschke(b1, b2)
        except (NotRelativelyPrime, DenominatorVanishesInDisk):
            continue
        try:
            ext = extract_full(phi, resolution=256, max_resolution=1024,
                               seed=problem.seed)
        except ExtractionError:
            continue
        loss = tree_loss(ext.tree, target)
        if best is None or loss < best.loss:
            best = SynthesisResult(phi, loss, ext.tree, "approximate",
                                   evaluations=evals)
        if canonical_code(ext.tree) != tcode:
            continue
        if endpoint_error(ext.tree, target) < problem.tol:
            report = crosscheck(phi, target, n_samples=200,
                                seed=problem.seed,
                                delta=max(problem.tol, 1e-3))
            if report.ok:
                return SynthesisResult(phi, loss, ext.tree, "exact",
                                       evaluations=evals)

    if best is not None and canonical_code(best.tree) == tcode:
        best.evaluations = evals
        return best
    if best is None:
        best = SynthesisResult(None, INF, None, "failed", evaluations=evals)
    else:
        best.status = "failed"
        best.evaluations = evals
    raise BudgetExhausted(best)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


@dataclass
class VerifyReport:
    """Independent residuals for a synthesis candidate.

    construction covers the function itself (zeros inside the disk, outer
    denominator, real boundary values); extraction and crosscheck re-derive
    the tree and compare root counts against it.
    """

    construction_ok: bool
    notes: list[str]
    boundary_max_im: float
    den_min_radius: float
    tree: Tree | None = None
    extraction_error: str | None = None
    crosscheck: object = None
    matches_result_tree: bool | None = None

    @property
    def ok(self) -> bool:
        return (self.construction_ok and self.tree is not None
                and self.crosscheck is not None and self.crosscheck.ok)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "construction_ok": self.construction_ok,
            "notes": list(self.notes),
            "boundary_max_im": self.boundary_max_im,
            "den_min_radius": (self.den_min_radius
                               if math.isfinite(self.den_min_radius) else None),
            "tree": None if self.tree is None else self.tree.to_json(),
            "extraction_error": self.extraction_error,
            "crosscheck": (None if self.crosscheck is None
                           else self.crosscheck.to_json()),
            "matches_result_tree": self.matches_result_tree,
        }


def verify(result: SynthesisResult, n_samples: int = 200, seed: int = 0,
           delta: float = 1e-3, resolution: int = 512) -> VerifyReport:
    """Re-derive everything the result claims, from the candidate alone."""
    if result.status == "failed" or result.candidate is None:
        raise ValueError("nothing to verify: the synthesis failed")
    phi = result.candidate
    notes: list[str] = []
    construction_ok = True

    for name, b in (("B1", phi.b1), ("B2", phi.b2)):
        if b is None:
            continue
        for a in b.zeros:
            if abs(a) >= 1.0:
                construction_ok = False
                notes.append("%s zero %s lies outside the unit disk"
                             % (name, complex(a)))

    den_min_radius = INF
    if phi.den.degree >= 1:
        radii = np.abs(find_roots(phi.den).roots)
        den_min_radius = float(radii.min())
        # the verdict comes from a winding count on a slightly smaller
        # circle rather than from the root radii: an m-fold boundary pole
        # scatters its computed roots over a ring of radius ~ eps^(1/m),
        # some of it inside the circle, while the winding number is
        # evaluation-based and does not care.  Poles within 0.02 of the
        # circle are treated as boundary poles.
        try:
            n_inside = winding_count(phi.den, Poly([1.0]), 0.98)
        except CircleTooClose:
            n_inside = 1 if den_min_radius < 1.0 - 1e-6 else 0
        if n_inside > 0:
            construction_ok = False
            notes.append("denominator vanishes inside the disk "
                         "(min |root| = %.6f)" % den_min_radius)

    boundary_max_im = 0.0
    if phi.num.degree + phi.den.degree > 0:
        _, ims = phi.boundary_im_samples(512, delta=1e-3)
        if ims.size:
            boundary_max_im = float(ims.max())
        if boundary_max_im > 1e-6:
            construction_ok = False
            notes.append("boundary values are not real "
                         "(max |Im| = %.3g)" % boundary_max_im)

    tree = None
    extraction_error = None
    report = None
    matches = None
    if construction_ok:
        try:
            ext = extract_full(phi, resolution=resolution, seed=seed)
            tree = ext.tree
        except ExtractionError as exc:
            extraction_error = "%s: %s" % (type(exc).__name__, exc)
        if tree is not None:
            report = crosscheck(phi, tree, n_samples=n_samples,
                                seed=seed + 1, delta=delta)
            if result.tree is not None:
                matches = is_isomorphic(tree, result.tree, mode="shape")

    return VerifyReport(construction_ok, notes, boundary_max_im,
                        den_min_radius, tree, extraction_error, report,
                        matches)
