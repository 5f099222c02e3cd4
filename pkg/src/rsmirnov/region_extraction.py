"""Extract the plane valence tree of a rational real Smirnov function.

The open unit disk splits along the level set ``Im phi = 0`` into regions
where ``Im phi`` has a constant sign.  Each region covers its half plane a
fixed number of times (its valence), adjacent regions of the same sign that
meet at a branch point of the level set weld into collections, and the
adjacency of collections across the traced level curves is a tree whose
edges carry the open real intervals those curves map onto.

The pipeline here:

1. ``partition``    -- classify a grid of the disk by the sign of Im phi and
                       label the connected sign regions.
2. ``region_valence`` -- count, per region, the roots of ``phi = lambda`` for
                       several generic ``lambda`` in the matching half plane.
3. ``find_branch_points`` -- interior critical points with real critical
                       value (the only places level arcs can cross).
4. ``trace_segments`` -- follow every level arc with a predictor/corrector
                       walk, identify the two flanking regions, and record
                       the (monotone) image interval and both endpoints.
5. ``extract_tree`` / ``extract_full`` -- weld regions into collections,
                       tile arc pieces into whole interfaces, and assemble
                       the tree, retrying at doubled resolution whenever a
                       consistency check trips.
6. ``crosscheck``   -- verify an extracted tree against direct root counts
                       at fresh sample points.

Everything is deterministic for a fixed seed; failures surface as typed
exceptions rather than wrong trees.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.ndimage as ndi

from ._kernels import (
    TRACE_HIT_BRANCH,
    TRACE_HIT_CIRCLE,
    TRACE_HIT_POLE,
    TRACE_MAX_STEPS,
    TRACE_NON_MONOTONE,
    TRACE_STALLED,
    classify_grid,
    horner_scalar,
    trace_arc,
)
from .blaschke_smirnov import InconsistentValence, halfplane_valences, is_infinite
from .complex_poly import Poly, find_roots
from .valence_tree import Interval, Node, Tree, profile, validate

__all__ = [
    "DEFAULT_RESOLUTION",
    "MAX_RESOLUTION",
    "ExtractionError",
    "ResolutionTooCoarse",
    "RootNearInterface",
    "TraceStalled",
    "NonMonotone",
    "ExtractionMismatch",
    "Region",
    "GridPartition",
    "BranchPoint",
    "End",
    "BoundaryArc",
    "Collection",
    "Extraction",
    "CrosscheckReport",
    "partition",
    "region_valence",
    "find_branch_points",
    "trace_segments",
    "trace_interface",
    "merge_collections",
    "extract_tree",
    "extract_full",
    "crosscheck",
    "render_svg",
]

DEFAULT_RESOLUTION = 512
MAX_RESOLUTION = 4096
POLE_CUTOFF = 1e8
BP_RADIUS = 1e-3
LEVEL_IM_TOL = 1e-6

_STRUCTURE_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=int)


class ExtractionError(RuntimeError):
    """Base class for everything that can go wrong during extraction."""


class ResolutionTooCoarse(ExtractionError):
    """The grid cannot separate the sign regions at this resolution."""


class RootNearInterface(ExtractionError):
    """Sampled roots keep landing too close to region boundaries."""


class TraceStalled(ExtractionError):
    """A level-curve trace could not make progress."""


class NonMonotone(ExtractionError):
    """Re phi failed to stay monotone along a traced arc."""


class ExtractionMismatch(ExtractionError):
    """The traced interfaces and regions do not fit together as a tree."""


_RETRYABLE = (
    ResolutionTooCoarse,
    RootNearInterface,
    TraceStalled,
    NonMonotone,
    ExtractionMismatch,
    InconsistentValence,
)


# ---------------------------------------------------------------------------
# grid partition


@dataclass(frozen=True)
class Region:
    """One connected component of {Im phi > 0} or {Im phi < 0} on the grid."""

    id: int
    sign: int
    n_cells: int
    area: float
    centroid: complex
    anchor: complex  # cell centre deepest inside the region


@dataclass
class GridPartition:
    """Sign classification and region labelling of the disk on a square grid.

    ``cls[iy, ix]`` is +1 / -1 by the sign of Im phi, 2 where the value is
    too close to zero to call, and 0 outside the disk.  ``labels`` numbers
    the positive regions 1..n_plus and the negative ones
    n_plus+1..n_plus+n_minus.
    """

    resolution: int
    cls: np.ndarray
    labels: np.ndarray
    regions: dict[int, Region]
    n_plus: int
    n_minus: int

    @property
    def h(self) -> float:
        return 2.0 / self.resolution

    def cell_center(self, ix: int, iy: int) -> complex:
        h = self.h
        return complex(-1.0 + (ix + 0.5) * h, -1.0 + (iy + 0.5) * h)

    def cell_of(self, z) -> tuple[int, int] | None:
        h = self.h
        ix = int((z.real + 1.0) / h)
        iy = int((z.imag + 1.0) / h)
        if 0 <= ix < self.resolution and 0 <= iy < self.resolution:
            return ix, iy
        return None

    def label_at(self, z) -> int:
        cell = self.cell_of(z)
        if cell is None:
            return 0
        return int(self.labels[cell[1], cell[0]])

    def class_at(self, z) -> int:
        cell = self.cell_of(z)
        if cell is None:
            return 0
        return int(self.cls[cell[1], cell[0]])

    def mask(self, region_id: int) -> np.ndarray:
        return self.labels == region_id

    def ids(self, sign: int = 0) -> list[int]:
        return sorted(
            rid for rid, r in self.regions.items() if sign == 0 or r.sign == sign
        )


def partition(phi, resolution: int = DEFAULT_RESOLUTION) -> GridPartition:
    """Classify the disk by the sign of Im phi and label the regions.

    Raises ResolutionTooCoarse when a region is only a few cells wide or
    when a region encloses cells of the opposite sign (a sign pocket the
    grid cannot be trusted to have resolved correctly).
    """
    res = int(resolution)
    if res < 64:
        raise ValueError("resolution must be at least 64")
    band = 2.5 / res
    margin = 1.0 / res
    cls = classify_grid(
        phi.num.coeffs, phi.den.coeffs, phi.w_poly().coeffs, res, margin, band
    )
    labels = np.zeros((res, res), dtype=np.int32)
    lab_p, n_plus = ndi.label(cls == 1, structure=_STRUCTURE_4)
    lab_m, n_minus = ndi.label(cls == -1, structure=_STRUCTURE_4)
    pm = cls == 1
    labels[pm] = lab_p[pm]
    mm = cls == -1
    labels[mm] = lab_m[mm] + n_plus

    h = 2.0 / res
    regions: dict[int, Region] = {}
    for rid in range(1, n_plus + n_minus + 1):
        mask = labels == rid
        n_cells = int(mask.sum())
        if n_cells < 4:
            raise ResolutionTooCoarse(
                f"region {rid} occupies only {n_cells} cells at resolution {res}"
            )
        filled = ndi.binary_fill_holes(mask)
        holes = filled & ~mask
        if holes.any() and np.any(np.abs(cls[holes]) == 1):
            raise ResolutionTooCoarse(
                f"region {rid} encloses cells of another sign at resolution {res}"
            )
        iy, ix = np.nonzero(mask)
        xs = -1.0 + (ix + 0.5) * h
        ys = -1.0 + (iy + 0.5) * h
        dist = ndi.distance_transform_cdt(mask)
        kbest = int(np.argmax(dist))
        ay, ax = np.unravel_index(kbest, dist.shape)
        regions[rid] = Region(
            id=rid,
            sign=1 if rid <= n_plus else -1,
            n_cells=n_cells,
            area=n_cells * h * h,
            centroid=complex(xs.mean(), ys.mean()),
            anchor=complex(-1.0 + (ax + 0.5) * h, -1.0 + (ay + 0.5) * h),
        )
    return GridPartition(res, cls, labels, regions, n_plus, n_minus)


# ---------------------------------------------------------------------------
# per-region valence


def region_valence(
    phi, gp: GridPartition, region_id: int, k_samples: int = 4, seed: int = 0,
    max_tries: int = 48,
) -> int:
    """Valence of one region: roots of phi = lambda that land in it.

    lambda is drawn from the half plane matching the region's sign.  A draw
    is discarded whenever any root of N - lambda*D sits too close to the
    circle or to a region boundary to be attributed with confidence; the
    counts of the surviving draws must all agree.
    """
    region = gp.regions[region_id]
    sign = region.sign
    rng = np.random.default_rng((seed, region_id))
    res = gp.resolution
    rim = 5.0 / res
    counts: list[int] = []
    for _ in range(max_tries):
        if len(counts) >= k_samples:
            break
        lam = complex(rng.uniform(-2.5, 2.5), sign * rng.uniform(0.3, 2.5))
        rep = find_roots(phi.num - phi.den * lam)
        count = 0
        clean = True
        for root, mult in zip(rep.roots, rep.multiplicities):
            ar = abs(root)
            if abs(ar - 1.0) < rim:
                clean = False
                break
            if ar > 1.0:
                continue
            if gp.class_at(root) != sign:
                clean = False  # in the uncertain band, or a mislabelled cell
                break
            if gp.label_at(root) == region_id:
                count += int(mult)
        if clean:
            counts.append(count)
    if len(counts) < k_samples:
        raise RootNearInterface(
            f"could not place {k_samples} clean samples in region {region_id} "
            f"after {max_tries} draws"
        )
    if len(set(counts)) != 1:
        raise InconsistentValence(
            f"region {region_id} valence samples disagree: {sorted(set(counts))}"
        )
    return counts[0]


# ---------------------------------------------------------------------------
# branch points


@dataclass(frozen=True)
class BranchPoint:
    """Interior critical point whose critical value is real."""

    index: int
    z: complex
    value: float


def find_branch_points(phi) -> list[BranchPoint]:
    """Interior zeros of W = N'D - ND' that lie on the level set Im phi = 0.

    These are the only points where level arcs may meet; everywhere else the
    level set is a disjoint union of smooth arcs.
    """
    w = phi.w_poly()
    if w.degree < 1:
        return []
    rep = find_roots(w)
    kept: list[complex] = []
    for root, mult in rep.clusters():
        # an m-fold root is located to ~eps^(1/m), so the exclusion zone
        # around the circle must widen with multiplicity
        guard = max(1e-6, 50.0 * 2.2e-16 ** (1.0 / mult))
        if abs(root) > 1.0 - guard:
            continue
        val = phi.eval(root)
        if is_infinite(val):
            continue
        if abs(val.imag) > LEVEL_IM_TOL * max(1.0, abs(val)):
            continue
        kept.append(complex(root))
    kept.sort(key=lambda z: (z.real, z.imag))
    return [
        BranchPoint(index=i, z=z, value=float(phi.eval(z).real))
        for i, z in enumerate(kept)
    ]


# ---------------------------------------------------------------------------
# level-curve tracing


@dataclass(frozen=True)
class End:
    """Where a traced arc terminates and the boundary value of Re phi there.

    kind is "circle" (the arc reached the unit circle), "pole" (|phi| blew
    up at a circle pole; value is +-inf), or "branch" (the arc ran into an
    interior branch point; value is its exact critical value).
    """

    kind: str
    value: float
    branch: int | None = None


@dataclass(frozen=True)
class BoundaryArc:
    """A traced piece of the level set with its flanking regions.

    Re phi increases strictly along ``points``; ``upper`` / ``lower`` are
    the region labels on the side where Im phi is positive / negative.
    """

    points: np.ndarray
    upper: int
    lower: int
    lo: End
    hi: End

    @property
    def interval(self) -> Interval:
        return Interval(self.lo.value, self.hi.value)


def _newton_to_level(phi, z0: complex) -> complex | None:
    """Pull a seed point onto the level set Im phi = 0 (or give up)."""
    ncoef = phi.num.coeffs
    dcoef = phi.den.coeffs
    wcoef = phi.w_poly().coeffs
    z = complex(z0)
    for _ in range(15):
        dv = horner_scalar(dcoef, z)
        if abs(dv) < 1e-150:
            return None
        w = horner_scalar(ncoef, z) / dv
        if abs(w.imag) <= 1e-11 * max(1.0, abs(w)):
            # points already inside a pole's blow-up zone seed nothing useful:
            # the arc stub between here and the pole is reached from farther out
            return z if abs(w) < 0.01 * POLE_CUTOFF else None
        fp = horner_scalar(wcoef, z) / (dv * dv)
        if abs(fp) < 1e-150:
            return None
        z = z - w.imag * 1j * fp.conjugate() / (abs(fp) ** 2)
        if abs(z) > 1.05:
            return None
    return None


def _seed_candidates(gp: GridPartition):
    """Seed points for tracing: near-zero cells, then sign-change midpoints."""
    cls = gp.cls
    h = gp.h
    iy, ix = np.nonzero(cls == 2)
    for y, x in zip(iy.tolist(), ix.tolist()):
        yield gp.cell_center(x, y), ((y, x),)
    horiz = cls[:, :-1] * cls[:, 1:]
    iy, ix = np.nonzero(horiz == -1)
    for y, x in zip(iy.tolist(), ix.tolist()):
        yield complex(-1.0 + (x + 1.0) * h, -1.0 + (y + 0.5) * h), ((y, x), (y, x + 1))
    vert = cls[:-1, :] * cls[1:, :]
    iy, ix = np.nonzero(vert == -1)
    for y, x in zip(iy.tolist(), ix.tolist()):
        yield complex(-1.0 + (x + 0.5) * h, -1.0 + (y + 1.0) * h), ((y, x), (y + 1, x))


def _mark_covered(covered: np.ndarray, pts: np.ndarray, h: float, res: int) -> None:
    ix = np.clip(((pts.real + 1.0) / h).astype(int), 0, res - 1)
    iy = np.clip(((pts.imag + 1.0) / h).astype(int), 0, res - 1)
    for dy in range(-2, 3):
        yy = np.clip(iy + dy, 0, res - 1)
        for dx in range(-2, 3):
            covered[yy, np.clip(ix + dx, 0, res - 1)] = True


def _make_end(phi, bps: list[BranchPoint], z: complex, status: int, bp_hit: int) -> End:
    if status == TRACE_HIT_BRANCH:
        bp = bps[bp_hit]
        return End("branch", bp.value, bp.index)
    if status == TRACE_HIT_POLE:
        nv = horner_scalar(phi.num.coeffs, z)
        dv = horner_scalar(phi.den.coeffs, z)
        positive = (nv * dv.conjugate()).real > 0
        return End("pole", math.inf if positive else -math.inf)
    # TRACE_HIT_CIRCLE
    t = math.atan2(z.imag, z.real)
    return End("circle", float(phi.boundary_value(t)))


def _flank_regions(phi, gp: GridPartition, pts: np.ndarray,
                   bps: list[BranchPoint]) -> tuple[int, int]:
    """Labels of the regions on the Im phi > 0 and Im phi < 0 sides of an arc."""
    n = len(pts)
    dcoef = phi.den.coeffs
    wcoef = phi.w_poly().coeffs
    h = gp.h
    probe_at = []
    for idx in (n // 2, n // 4, (3 * n) // 4, n // 8, (7 * n) // 8):
        if 0 <= idx < n and idx not in probe_at:
            probe_at.append(idx)
    for idx in probe_at:
        m = complex(pts[idx])
        if bps and min(abs(m - bp.z) for bp in bps) < 2 * BP_RADIUS:
            continue
        dv = horner_scalar(dcoef, m)
        if abs(dv) < 1e-150:
            continue
        fp = horner_scalar(wcoef, m) / (dv * dv)
        if abs(fp) < 1e-150:
            continue
        tau = fp.conjugate() / abs(fp)  # walking direction of increasing Re phi
        for mul in (1.0, 2.0, 4.0, 8.0):
            delta = mul * h
            z_up = m + 1j * tau * delta  # Im phi grows along i*tau
            z_dn = m - 1j * tau * delta
            if gp.class_at(z_up) != 1 or gp.class_at(z_dn) != -1:
                continue
            wu = phi.eval(z_up)
            wd = phi.eval(z_dn)
            if is_infinite(wu) or is_infinite(wd):
                continue
            if wu.imag > 0 and wd.imag < 0:
                return gp.label_at(z_up), gp.label_at(z_dn)
    raise TraceStalled("could not identify the regions flanking a traced arc")


def trace_segments(phi, gp: GridPartition,
                   branch_points: list[BranchPoint] | None = None) -> list[BoundaryArc]:
    """Trace every arc of the level set Im phi = 0 inside the disk.

    Each returned arc is maximal between arc endpoints (circle, pole, or
    branch point), carries its flanking region labels, and has strictly
    increasing Re phi along its points.  Arcs traced twice from different
    seeds are deduplicated by their flank pair and overlapping images.
    """
    bps = find_branch_points(phi) if branch_points is None else list(branch_points)
    bp_z = np.array([bp.z for bp in bps], dtype=np.complex128)
    ncoef = phi.num.coeffs
    dcoef = phi.den.coeffs
    wcoef = phi.w_poly().coeffs
    res = gp.resolution
    h = gp.h
    h0 = min(2e-3, 1.0 / res)
    h_max = min(8e-3, 4.0 / res)
    covered = np.zeros((res, res), dtype=bool)
    segments: list[BoundaryArc] = []
    images: dict[tuple[int, int], list[tuple[float, float]]] = {}

    def run(z0: complex, direction: float):
        pts, status, bp_hit = trace_arc(
            ncoef, dcoef, wcoef, z0, direction, h0=h0, h_max=h_max,
            pole_cutoff=POLE_CUTOFF, branch_points=bp_z, bp_radius=BP_RADIUS,
        )
        if status in (TRACE_STALLED, TRACE_NON_MONOTONE, TRACE_MAX_STEPS):
            pts, status, bp_hit = trace_arc(
                ncoef, dcoef, wcoef, z0, direction, h0=h0 / 4, h_max=h_max / 2,
                pole_cutoff=POLE_CUTOFF, branch_points=bp_z, bp_radius=BP_RADIUS,
            )
        if status == TRACE_NON_MONOTONE:
            raise NonMonotone(f"Re phi not monotone along the arc through {z0:.6f}")
        if status in (TRACE_STALLED, TRACE_MAX_STEPS):
            raise TraceStalled(f"trace from {z0:.6f} stalled")
        return pts, status, bp_hit

    for seed, cells in _seed_candidates(gp):
        if any(covered[c] for c in cells):
            continue
        z = _newton_to_level(phi, seed)
        if z is None:
            continue
        if abs(z) > 1.0 - 3.0 / res:
            continue  # cancellation band along the circle, not an interior arc
        if bps and min(abs(z - bp.z) for bp in bps) < 1.5 * BP_RADIUS:
            continue
        cell = gp.cell_of(z)
        if cell is None or covered[cell[1], cell[0]]:
            continue
        fwd, st_f, bp_f = run(z, +1.0)
        bwd, st_b, bp_b = run(z, -1.0)
        pts = np.concatenate([bwd[::-1], fwd[1:]]) if len(fwd) > 1 else bwd[::-1]
        lo = _make_end(phi, bps, complex(pts[0]), st_b, bp_b)
        hi = _make_end(phi, bps, complex(pts[-1]), st_f, bp_f)
        if not lo.value < hi.value:
            raise NonMonotone(
                f"arc through {z:.6f} has a degenerate image "
                f"({lo.value}, {hi.value})"
            )
        upper, lower = _flank_regions(phi, gp, pts, bps)
        _mark_covered(covered, pts, h, res)
        key = (upper, lower)
        if any(max(lo.value, a) < min(hi.value, b) for a, b in images.get(key, ())):
            continue  # same arc reached from another seed
        images.setdefault(key, []).append((lo.value, hi.value))
        segments.append(BoundaryArc(pts, upper, lower, lo, hi))

    segments = _reconcile_circle_ends(segments)
    segments.sort(key=lambda s: (s.lo.value, s.hi.value, s.upper, s.lower))
    return segments


def _reconcile_circle_ends(segments: list[BoundaryArc]) -> list[BoundaryArc]:
    """Give arcs that end at the same circle point one shared endpoint value.

    Several arcs can terminate at a single boundary point (a critical point
    of the boundary values); each trace then measures the common value with
    its own rounding noise, and the mismatch would read as a spurious overlap
    of edge intervals.  Endpoints within one resolution scale of each other
    are clustered and assigned the median of their measured values.
    """
    ends = []  # (segment index, end attribute, endpoint location, value)
    for i, seg in enumerate(segments):
        for attr, z in (("lo", seg.points[0]), ("hi", seg.points[-1])):
            end: End = getattr(seg, attr)
            if end.kind == "circle" and math.isfinite(end.value):
                ends.append((i, attr, complex(z), end.value))
    if len(ends) < 2:
        return segments

    parent = list(range(len(ends)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(ends)):
        for j in range(i + 1, len(ends)):
            if abs(ends[i][2] - ends[j][2]) < 3e-3:
                parent[find(i)] = find(j)

    clusters: dict[int, list[int]] = {}
    for i in range(len(ends)):
        clusters.setdefault(find(i), []).append(i)
    replacements: dict[tuple[int, str], float] = {}
    for group in clusters.values():
        if len(group) < 2:
            continue
        value = float(np.median([ends[i][3] for i in group]))
        for i in group:
            replacements[(ends[i][0], ends[i][1])] = value
    if not replacements:
        return segments

    out = []
    for i, seg in enumerate(segments):
        lo, hi = seg.lo, seg.hi
        if (i, "lo") in replacements:
            lo = End("circle", replacements[(i, "lo")])
        if (i, "hi") in replacements:
            hi = End("circle", replacements[(i, "hi")])
        out.append(BoundaryArc(seg.points, seg.upper, seg.lower, lo, hi))
    return out


def _tile(group: list[BoundaryArc]) -> tuple[list[BoundaryArc], Interval]:
    """Order arc pieces between one pair of regions into a single interface.

    Consecutive pieces must hand over at a shared branch point and the outer
    ends must be circle or pole ends; the image of the whole interface is
    then the open interval between the outer values.
    """
    group = sorted(group, key=lambda s: (s.lo.value, s.hi.value))
    for a, b in zip(group, group[1:]):
        if a.hi.kind != "branch" or b.lo.kind != "branch" or a.hi.branch != b.lo.branch:
            raise ExtractionMismatch(
                "traced pieces of one interface do not join at a branch point"
            )
    if group[0].lo.kind == "branch" or group[-1].hi.kind == "branch":
        raise ExtractionMismatch("an interface terminates at an interior branch point")
    try:
        interval = Interval(group[0].lo.value, group[-1].hi.value)
    except ValueError as exc:
        raise ExtractionMismatch(f"interface has a degenerate image: {exc}") from exc
    return group, interval


def trace_interface(phi, gp: GridPartition, upper_id: int, lower_id: int,
                    segments: list[BoundaryArc] | None = None) -> BoundaryArc:
    """The full interface between two adjacent regions, as one arc."""
    if segments is None:
        segments = trace_segments(phi, gp)
    group = [s for s in segments if s.upper == upper_id and s.lower == lower_id]
    if not group:
        raise ExtractionMismatch(
            f"regions {upper_id} and {lower_id} share no traced interface"
        )
    ordered, _ = _tile(group)
    pts = np.concatenate([s.points for s in ordered])
    return BoundaryArc(pts, upper_id, lower_id, ordered[0].lo, ordered[-1].hi)


# ---------------------------------------------------------------------------
# collections and tree assembly


@dataclass(frozen=True)
class Collection:
    """A maximal weld of same-sign regions; one node of the valence tree."""

    id: str
    sign: int
    members: tuple[int, ...]
    valence: int


def merge_collections(regions, branch_regions) -> list[Collection]:
    """Weld same-sign regions that share a branch point, transitively.

    ``regions`` maps region id -> (sign, valence); ``branch_regions`` is an
    iterable of sets of region ids incident to one branch point.  Welding
    never joins regions of opposite sign.  Returns the collections sorted
    with positive ones first, named c1, c2, ...
    """
    parent = {rid: rid for rid in regions}

    def find(r):
        while parent[r] != r:
            parent[r] = parent[parent[r]]
            r = parent[r]
        return r

    for group in branch_regions:
        by_sign: dict[int, list] = {}
        for rid in group:
            by_sign.setdefault(regions[rid][0], []).append(rid)
        for same in by_sign.values():
            for rid in same[1:]:
                parent[find(rid)] = find(same[0])

    clusters: dict = {}
    for rid in regions:
        clusters.setdefault(find(rid), []).append(rid)
    rows = []
    for members in clusters.values():
        members = tuple(sorted(members))
        sign = regions[members[0]][0]
        rows.append((-sign, members, sum(regions[r][1] for r in members)))
    rows.sort()
    return [
        Collection(f"c{i + 1}", -negsign, members, val)
        for i, (negsign, members, val) in enumerate(rows)
    ]


def _assemble(gp: GridPartition, valences: dict[int, int],
              segments: list[BoundaryArc],
              bps: list[BranchPoint]) -> tuple[Tree, list[Collection], dict[int, str]]:
    """Weld regions into collections and connect them into the valence tree.

    Welding is done while walking outward from a root collection: a branch
    point consumed by a collection no longer welds the opposite-sign regions
    that meet there (they continue into different complement components), so
    each closure only follows branch points not consumed by an earlier one.
    """
    regions = gp.regions
    if not segments:
        if len(regions) != 1:
            raise ExtractionMismatch(
                "multiple sign regions but no traced interfaces between them"
            )
        ((rid, region),) = regions.items()
        name = "p1" if region.sign > 0 else "m1"
        tree = Tree([Node(name, region.sign, valences[rid])], [])
        return tree, [Collection(name, region.sign, (rid,), valences[rid])], {rid: name}

    segs_own: dict[int, list[BoundaryArc]] = {rid: [] for rid in regions}
    for seg in segments:
        segs_own[seg.upper].append(seg)
        segs_own[seg.lower].append(seg)

    bp_regions: dict[int, set[int]] = {}
    for seg in segments:
        for end in (seg.lo, seg.hi):
            if end.kind == "branch":
                bp_regions.setdefault(end.branch, set()).update(
                    (seg.upper, seg.lower)
                )
    bps_of_region: dict[int, set[int]] = {rid: set() for rid in regions}
    for b, rids in bp_regions.items():
        for rid in rids:
            bps_of_region[rid].add(b)

    consumed: set[int] = set()
    assigned: dict[int, str] = {}

    def close(seed_rid: int) -> tuple[int, ...]:
        sign = regions[seed_rid].sign
        members = {seed_rid}
        stack = [seed_rid]
        while stack:
            rid = stack.pop()
            for b in bps_of_region[rid]:
                if b in consumed:
                    continue
                for other in bp_regions[b]:
                    if (
                        other not in members
                        and other not in assigned
                        and regions[other].sign == sign
                    ):
                        members.add(other)
                        stack.append(other)
        for rid in members:
            consumed.update(bps_of_region[rid])
        return tuple(sorted(members))

    plus_regions = [r for r in regions.values() if r.sign > 0]
    pool = plus_regions or list(regions.values())
    pool.sort(key=lambda r: (-r.area, r.centroid.imag, r.centroid.real, r.id))
    root_rid = pool[0].id
    root_sign = regions[root_rid].sign

    counters = {1: 0, -1: 0}
    nodes: list[Node] = []
    edges: list[tuple[str, str, Interval]] = []
    collections: list[Collection] = []
    parent_of: dict[str, str] = {}

    def make_node(members: tuple[int, ...], sign: int) -> str:
        counters[sign] += 1
        name = ("p" if sign > 0 else "m") + str(counters[sign])
        val = sum(valences[r] for r in members)
        nodes.append(Node(name, sign, val))
        collections.append(Collection(name, sign, members, val))
        for rid in members:
            assigned[rid] = name
        return name

    root_members = close(root_rid)
    root_name = make_node(root_members, root_sign)
    queue = deque([(root_name, root_members, root_sign)])
    while queue:
        name, members, sign = queue.popleft()
        groups: dict[int, list[BoundaryArc]] = {}
        for rid in members:
            for seg in segs_own[rid]:
                own = seg.upper if sign > 0 else seg.lower
                if own != rid:
                    continue
                opp = seg.lower if sign > 0 else seg.upper
                groups.setdefault(opp, []).append(seg)
        pending = []
        for opp, group in groups.items():
            holder = assigned.get(opp)
            if holder is not None:
                if holder == parent_of.get(name):
                    continue  # the interface back to the parent, already an edge
                raise ExtractionMismatch(
                    f"interface from {name} reaches already-placed node {holder}"
                )
            ordered, interval = _tile(group)
            pending.append((interval.lo, interval.hi, opp, interval))
        pending.sort()
        for _, _, opp, interval in pending:
            if opp in assigned:
                raise ExtractionMismatch(
                    "two traced interfaces lead into one collection"
                )
            child_members = close(opp)
            for other in pending:
                if other[2] != opp and other[2] in child_members:
                    raise ExtractionMismatch(
                        "two traced interfaces lead into one collection"
                    )
            child = make_node(child_members, -sign)
            parent_of[child] = name
            edges.append((name, child, interval))
            queue.append((child, child_members, -sign))

    missing = sorted(rid for rid in regions if rid not in assigned)
    if missing:
        raise ExtractionMismatch(
            f"regions {missing} were never reached by any traced interface"
        )
    edge_pairs = {(a, b) for a, b, _ in edges} | {(b, a) for a, b, _ in edges}
    for seg in segments:
        pair = (assigned[seg.upper], assigned[seg.lower])
        if pair not in edge_pairs:
            raise ExtractionMismatch(
                f"stray interface between non-adjacent collections {pair}"
            )
    tree = Tree(nodes, edges)
    return tree, collections, assigned


# ---------------------------------------------------------------------------
# crosscheck


@dataclass
class CrosscheckReport:
    """Direct root counts at fresh sample points versus an extracted tree."""

    samples: int
    mismatches: list[dict]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "ok": self.ok,
            "mismatches": self.mismatches,
        }


def crosscheck(phi, tree: Tree, n_samples: int = 200, seed: int = 0,
               delta: float = 1e-3) -> CrosscheckReport:
    """Compare the tree's valence profile against direct root counts.

    Draws sample points in both half planes (expected count: the half-plane
    valences) and on the real axis away from breakpoints (expected count:
    the profile's local multiplicity).  At real sample points only interior
    roots are counted; the circle preimages that a real value always has are
    not part of the count.
    """
    from .blaschke_smirnov import valence_at

    prof = profile(tree)
    rng = np.random.default_rng(seed)
    n_half = n_samples // 4
    n_real = n_samples - 2 * n_half
    mismatches: list[dict] = []
    total = 0

    for sign, expected in ((1, prof.v_plus), (-1, prof.v_minus)):
        for _ in range(n_half):
            lam = complex(rng.uniform(-3.0, 3.0), sign * rng.uniform(0.2, 3.0))
            got = valence_at(phi, lam)[0]
            total += 1
            if got != expected:
                mismatches.append(
                    {
                        "kind": "upper" if sign > 0 else "lower",
                        "point": [lam.real, lam.imag],
                        "expected": expected,
                        "got": got,
                    }
                )

    finite = [b for b in prof.breakpoints if math.isfinite(b)]
    lo = (min(finite) - 2.0) if finite else -3.0
    hi = (max(finite) + 2.0) if finite else 3.0
    drawn = 0
    attempts = 0
    while drawn < n_real and attempts < 100 * n_real:
        attempts += 1
        x = rng.uniform(lo, hi)
        if finite and min(abs(x - b) for b in finite) < delta:
            continue
        drawn += 1
        total += 1
        expected = prof.multiplicity_at(x)
        got = valence_at(phi, x)[0]
        if got != expected:
            mismatches.append(
                {"kind": "real", "point": x, "expected": expected, "got": got}
            )
    return CrosscheckReport(total, mismatches)


# ---------------------------------------------------------------------------
# top-level extraction


@dataclass
class Extraction:
    """Everything produced by one successful extraction run."""

    tree: Tree
    resolution: int
    partition: GridPartition
    region_valences: dict[int, int]
    branch_points: list[BranchPoint]
    segments: list[BoundaryArc]
    collections: list[Collection]
    node_of_region: dict[int, str]
    halfplane: tuple[int, int]


def _attempt(phi, res: int, seed: int) -> Extraction:
    gp = partition(phi, res)
    valences = {rid: region_valence(phi, gp, rid, seed=seed) for rid in gp.ids()}
    for rid, val in valences.items():
        if val == 0:
            raise ResolutionTooCoarse(
                f"region {rid} captured no roots; likely a grid artifact"
            )
    v_plus, v_minus = halfplane_valences(phi, seed=seed)
    got_plus = sum(v for r, v in valences.items() if gp.regions[r].sign > 0)
    got_minus = sum(v for r, v in valences.items() if gp.regions[r].sign < 0)
    if (got_plus, got_minus) != (v_plus, v_minus):
        raise InconsistentValence(
            f"region valences sum to ({got_plus}, {got_minus}) but the "
            f"half-plane counts are ({v_plus}, {v_minus})"
        )
    bps = find_branch_points(phi)
    segments = trace_segments(phi, gp, bps)
    tree, collections, node_of_region = _assemble(gp, valences, segments, bps)
    violations = validate(tree)
    if violations:
        raise ExtractionMismatch(
            "assembled tree is invalid: " + "; ".join(str(v) for v in violations)
        )
    report = crosscheck(phi, tree, n_samples=36, seed=seed + 1)
    if not report.ok:
        raise ExtractionMismatch(
            f"extracted tree contradicts direct counts: {report.mismatches[:3]}"
        )
    return Extraction(
        tree=tree,
        resolution=res,
        partition=gp,
        region_valences=valences,
        branch_points=bps,
        segments=segments,
        collections=collections,
        node_of_region=node_of_region,
        halfplane=(v_plus, v_minus),
    )


def extract_full(phi, resolution: int = DEFAULT_RESOLUTION,
                 max_resolution: int = MAX_RESOLUTION, seed: int = 0) -> Extraction:
    """Extract the valence tree, doubling the grid resolution on failure."""
    res = int(resolution)
    while True:
        try:
            return _attempt(phi, res, seed)
        except _RETRYABLE:
            if 2 * res > max_resolution:
                raise
            res *= 2


def extract_tree(phi, resolution: int = DEFAULT_RESOLUTION,
                 max_resolution: int = MAX_RESOLUTION, seed: int = 0) -> Tree:
    """The plane valence tree of phi (see extract_full for the details)."""
    return extract_full(phi, resolution, max_resolution, seed).tree


# ---------------------------------------------------------------------------
# rendering


_SVG_COLORS = {1: "#aecbfa", -1: "#f6b09a", 2: "#e8e8e8"}


def render_svg(gp: GridPartition, segments=(), collections=(), size: int = 640) -> str:
    """Plain SVG picture of the partition, traced arcs, and node labels."""
    res = gp.resolution
    stride = max(1, res // 256)
    scale = size / 2.0
    h = gp.h

    def sx(x: float) -> float:
        return (x + 1.0) * scale

    def sy(y: float) -> float:
        return (1.0 - y) * scale  # svg y grows downward

    cell = stride * h * scale
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    cls = gp.cls
    for iy in range(0, res, stride):
        row = cls[iy]
        ix = 0
        while ix < res:
            c = int(row[ix])
            if c == 0:
                ix += stride
                continue
            start = ix
            while ix < res and int(row[ix]) == c:
                ix += stride
            x0 = sx(-1.0 + start * h)
            y0 = sy(-1.0 + (iy + stride) * h)
            width = (ix - start) * h * scale
            parts.append(
                f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{width:.2f}" '
                f'height="{cell:.2f}" fill="{_SVG_COLORS[c]}"/>'
            )
    parts.append(
        f'<circle cx="{scale:.1f}" cy="{scale:.1f}" r="{scale:.1f}" '
        'fill="none" stroke="#444" stroke-width="1.5"/>'
    )
    for seg in segments:
        pts = seg.points[:: max(1, len(seg.points) // 400)]
        coords = " ".join(f"{sx(p.real):.2f},{sy(p.imag):.2f}" for p in pts)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="#222" '
            'stroke-width="1.2"/>'
        )
    for coll in collections:
        biggest = max(coll.members, key=lambda rid: gp.regions[rid].n_cells)
        anchor = gp.regions[biggest].anchor
        parts.append(
            f'<text x="{sx(anchor.real):.1f}" y="{sy(anchor.imag):.1f}" '
            'font-family="sans-serif" font-size="16" text-anchor="middle">'
            f"{coll.id}:{coll.valence}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts)
