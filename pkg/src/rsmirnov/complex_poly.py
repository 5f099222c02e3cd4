"""Complex polynomial arithmetic, root finding, and disk root counting.

Polynomials are stored with ascending coefficients (c[0] + c[1] z + ...).
The root finder is a simultaneous Aberth-Ehrlich iteration with random
perturbation restarts, followed by a Newton polish and multiplicity
clustering.  Root counts inside a circle are the basic primitive behind
every valence computation; an argument-principle winding count is provided
as an independent cross-check.
"""

import numpy as np

from . import _kernels

#: default distance below which two computed roots are treated as one
#: multiple root
CLUSTER_TOL = 1e-6

#: default distance from the unit circle at which a root is flagged as
#: sitting on the boundary
BOUNDARY_TOL = 1e-9


class NonConvergence(Exception):
    """Root iteration exhausted its budget (ill-conditioned input)."""


class CircleTooClose(Exception):
    """A zero or pole sits too close to the winding contour."""


class Poly:
    """Immutable complex polynomial with ascending coefficients.

    Trailing zero coefficients are trimmed on construction, so ``degree``
    is always the index of the last nonzero coefficient (the zero
    polynomial keeps a single zero coefficient and reports degree 0).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128)).ravel()
        nz = np.nonzero(c)[0]
        if nz.size == 0:
            c = c[:1] if c.size else np.zeros(1, dtype=np.complex128)
        else:
            c = c[: nz[-1] + 1]
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return self.degree == 0 and self.coeffs[0] == 0

    def __call__(self, z):
        if np.isscalar(z) or np.asarray(z).shape == ():
            return _kernels.horner_scalar(self.coeffs, z)
        return _kernels.horner_many(self.coeffs, z)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        c = np.zeros(n, dtype=np.complex128)
        c[: len(self.coeffs)] += self.coeffs
        c[: len(other.coeffs)] += other.coeffs
        return Poly(c)

    def __neg__(self):
        return Poly(-self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __mul__(self, other):
        if np.isscalar(other):
            return self.scale(other)
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Poly([0])
        return Poly(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def scale(self, a):
        return Poly(self.coeffs * complex(a))

    def derivative(self):
        if self.degree == 0:
            return Poly([0])
        k = np.arange(1, len(self.coeffs))
        return Poly(self.coeffs[1:] * k)

    def monic(self):
        return Poly(self.coeffs / self.coeffs[-1])

    def __pow__(self, n):
        out = Poly([1])
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __repr__(self):
        return "Poly(%s)" % np.array2string(self.coeffs, precision=6)


def _as_poly(p):
    return p if isinstance(p, Poly) else Poly(p)


def poly_from_roots(roots, lead=1.0):
    """Monic-from-roots constructor, scaled by ``lead``."""
    c = np.array([complex(lead)], dtype=np.complex128)
    for r in roots:
        c = np.convolve(c, np.array([-complex(r), 1.0], dtype=np.complex128))
    return Poly(c)


def compose_rational(p, rnum, rden, power=None):
    """Numerator of p(rnum/rden) * rden**power, with power >= deg p.

    Writing p(w) = sum c_k w^k, the returned polynomial is
    sum c_k rnum^k rden^(power-k).  With power = deg p this is the usual
    clearing of denominators; a larger power pads with rden factors so two
    compositions can share one denominator.
    """
    n = p.degree
    if power is None:
        power = n
    if power < n:
        raise ValueError("power must be at least deg p")
    out = Poly([0])
    num_pow = Poly([1])
    den_pows = [Poly([1])]
    for _ in range(power):
        den_pows.append(den_pows[-1] * rden)
    for k in range(n + 1):
        if p.coeffs[k] != 0:
            out = out + (num_pow * den_pows[power - k]).scale(p.coeffs[k])
        if k < n:
            num_pow = num_pow * rnum
    return out


def compose_mobius(p, mnum, mden):
    """Compose p with the fractional-linear map mnum/mden.

    Returns the rational pair (numerator, denominator); for example z**2
    composed with (1+z)/(1-z) gives ((1+z)**2, (1-z)**2).
    """
    mnum = _as_poly(mnum)
    mden = _as_poly(mden)
    num = compose_rational(p, mnum, mden)
    return num, mden ** p.degree


class RootReport:
    """All roots of a polynomial, with multiplicities.

    ``roots`` has length equal to the degree (each multiple root repeated),
    ``multiplicities`` is aligned with it, ``residual`` is the largest
    |p(root)| over the cluster centers relative to the coefficient scale,
    and ``boundary`` flags roots within BOUNDARY_TOL of the unit circle.
    """

    def __init__(self, roots, multiplicities, residual, boundary):
        self.roots = roots
        self.multiplicities = multiplicities
        self.residual = residual
        self.boundary = boundary

    def clusters(self):
        """Distinct roots as a list of (value, multiplicity) pairs."""
        out = []
        k = 0
        while k < len(self.roots):
            m = int(self.multiplicities[k])
            out.append((self.roots[k], m))
            k += m
        return out


def _initial_guesses(coeffs, rng):
    n = len(coeffs) - 1
    ratios = np.abs(coeffs[:-1] / coeffs[-1])
    radius = 1.0 + (ratios.max() if ratios.size else 0.0)
    radius = min(radius, 1e6)
    ang = 2.0 * np.pi * (np.arange(n) + 0.37) / n
    jitter = 0.05 * (rng.random(n) - 0.5) if rng is not None else 0.0
    return (0.5 + 0.5 * radius) * np.exp(1j * (ang + jitter))


def _newton_polish(coeffs, roots, steps=3):
    dcoeffs = (Poly(coeffs)).derivative().coeffs
    for _ in range(steps):
        p = _kernels.horner_many(coeffs, roots)
        dp = _kernels.horner_many(dcoeffs, roots)
        mask = np.abs(dp) > 1e-280
        upd = np.where(mask, p / np.where(mask, dp, 1.0), 0.0)
        # do not let a polish step fling a root far away (multiple roots)
        big = np.abs(upd) > 0.1 * (1.0 + np.abs(roots))
        upd[big] = 0.0
        roots = roots - upd
    return roots


def _cluster(roots, coeffs, base_tol):
    """Group computed roots into multiplicity clusters.

    A first pass merges everything within base_tol.  A second pass merges
    groups whose centers are within an amplified tolerance when the low
    derivatives of p at the joint centroid all vanish numerically (the ring
    of iterates around a root of multiplicity m has radius ~ eps^(1/m),
    which a fixed tolerance misses for m >= 3).
    """
    n = len(roots)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) < base_tol:
                union(i, j)

    def groups():
        g = {}
        for i in range(n):
            g.setdefault(find(i), []).append(i)
        return list(g.values())

    # second pass: derivative-verified merging of suspicious near-groups
    amp_tol = max(200.0 * base_tol, 1e-4)
    scale = np.abs(coeffs).max()
    p = Poly(coeffs)
    changed = True
    while changed:
        changed = False
        gs = groups()
        centers = [np.mean([roots[i] for i in g]) for g in gs]
        for a in range(len(gs)):
            for b in range(a + 1, len(gs)):
                if abs(centers[a] - centers[b]) >= amp_tol:
                    continue
                m = len(gs[a]) + len(gs[b])
                c = (centers[a] * len(gs[a]) + centers[b] * len(gs[b])) / m
                d = p
                ok = True
                for _ in range(m):
                    if abs(d(c)) > 1e-7 * scale:
                        ok = False
                        break
                    d = d.derivative()
                if ok:
                    union(gs[a][0], gs[b][0])
                    changed = True
            if changed:
                break
    return groups()


def find_roots(p, tol=1e-13, max_iter=400, cluster_tol=CLUSTER_TOL,
               boundary_tol=BOUNDARY_TOL):
    """All complex roots of p with multiplicities.

    Aberth-Ehrlich simultaneous iteration with up to three random
    perturbation restarts, Newton polish, then multiplicity clustering.
    Raises NonConvergence when the budget is exhausted.
    """
    p = _as_poly(p)
    c = p.coeffs.copy()
    # relative trim of vanishing leading coefficients
    scale = np.abs(c).max()
    if scale == 0:
        raise ValueError("cannot take roots of the zero polynomial")
    while len(c) > 1 and abs(c[-1]) < 1e-14 * scale:
        c = c[:-1]
    if len(c) - 1 < 1:
        raise ValueError("find_roots requires degree >= 1")
    # strip exact zero roots (monomial factors appear all over the place)
    n_zero = 0
    while c[0] == 0:
        c = c[1:]
        n_zero += 1
    all_roots = [0.0 + 0.0j] * n_zero
    deg = len(c) - 1
    if deg > 0:
        roots = None
        rng = None
        for attempt in range(4):
            guesses = _initial_guesses(c, rng)
            cand, _, ok = _kernels.aberth_iterate(c, guesses, tol, max_iter)
            if ok:
                roots = cand
                break
            rng = np.random.default_rng(0xC0FFEE + attempt)
        if roots is None:
            raise NonConvergence(
                "Aberth iteration failed after restarts (degree %d)" % deg
            )
        roots = _newton_polish(c, roots)
        all_roots.extend(roots.tolist())

    arr = np.array(all_roots, dtype=np.complex128)
    groups = _cluster(arr, p.coeffs, cluster_tol)
    out = []
    mult = []
    for g in groups:
        center = np.mean(arr[list(g)])
        if abs(center) < 1e-300:
            center = 0.0 + 0.0j
        for _ in g:
            out.append(center)
            mult.append(len(g))
    out = np.array(out, dtype=np.complex128)
    mult = np.array(mult, dtype=np.int64)
    order = np.lexsort((out.imag, out.real))
    out, mult = out[order], mult[order]
    pv = _kernels.horner_many(p.coeffs, out)
    residual = float(np.abs(pv).max() / scale)
    boundary = np.abs(np.abs(out) - 1.0) < boundary_tol
    return RootReport(out, mult, residual, boundary)


def count_roots_in_disk(p, radius=1.0, tol=BOUNDARY_TOL):
    """Number of roots with |root| < radius, plus near-circle warnings.

    Roots within tol of the circle |z| = radius are *not* counted; they are
    reported in the warnings list as (root, distance) pairs, since a root
    numerically on the circle is outside the open disk for valence
    purposes.
    """
    rep = find_roots(p)
    count = 0
    warnings = []
    for r in rep.roots:
        d = abs(abs(r) - radius)
        if d < tol:
            warnings.append((r, d))
        elif abs(r) < radius:
            count += 1
    return count, warnings


def winding_count(p, q, radius, n_samples=4096):
    """Winding number of t -> p(r e^{it})/q(r e^{it}) around 0.

    Computed as winding(p) - winding(q) from accumulated phase increments.
    The sampling is doubled (up to 2^20 points) until every increment is
    below pi/2; failure to get there, or a sample modulus collapsing to
    zero, raises CircleTooClose.
    """
    p, q = _as_poly(p), _as_poly(q)

    def poly_winding(c):
        if len(c.coeffs) == 1:
            if c.coeffs[0] == 0:
                raise CircleTooClose("zero polynomial has no winding")
            return 0
        n = max(64, n_samples)
        scale = np.abs(c.coeffs).max()
        while True:
            t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
            z = radius * np.exp(1j * t)
            w = c(z)
            if np.abs(w).min() < 1e-13 * scale:
                raise CircleTooClose(
                    "polynomial modulus collapses on the contour"
                )
            ratio = w / np.roll(w, 1)
            dphase = np.angle(ratio)
            if np.abs(dphase).max() < 0.5 * np.pi:
                total = dphase.sum() / (2.0 * np.pi)
                return int(np.rint(total))
            if n >= 2 ** 20:
                raise CircleTooClose(
                    "phase increments stay too large; a root is within "
                    "sampling distance of the contour"
                )
            n *= 2

    return poly_winding(p) - poly_winding(q)
