"""Finite Blaschke products and rational real Smirnov functions.

A rational function holomorphic on the unit disk with real boundary values
almost everywhere can be written as

    phi = i (B1 + B2) / (B1 - B2)

for relatively prime finite Blaschke products B1, B2 such that B1 - B2 has
no zeros in the disk (the denominator is outer).  This module builds such
functions either from a Blaschke pair or from a reduced rational pair N/D,
evaluates them, computes valences (preimage counts) by root counting, and
estimates integral means.

Convention: (phi - i)/(phi + i) = B2/B1, so the valence on the upper half
plane is deg B2 and on the lower half plane deg B1.
"""

import cmath
import math

import mpmath
import numpy as np

from . import _kernels
from .complex_poly import (
    BOUNDARY_TOL,
    Poly,
    compose_rational,
    count_roots_in_disk,
    find_roots,
)

#: returned by eval at poles
INFINITY = complex(math.inf, 0.0)

#: |zero| must stay below 1 minus this margin
ZERO_MARGIN = 1e-12

#: boundary samples with |D(z)| below this (times coefficient scale) count
#: as poles when validating realness
POLE_EVAL_TOL = 1e-13


class NotRelativelyPrime(Exception):
    """The two Blaschke products share a zero."""


class DenominatorVanishesInDisk(Exception):
    """The denominator has a zero inside the open unit disk (not outer)."""


class BoundaryNotReal(Exception):
    """Boundary samples have imaginary parts above tolerance away from poles."""

    def __init__(self, max_im, worst_t):
        self.max_im = max_im
        self.worst_t = worst_t
        super().__init__(
            "max |Im phi(e^it)| = %.3e at t = %.6f" % (max_im, worst_t)
        )


class InconsistentValence(Exception):
    """Sampled valences disagree where theory demands constancy."""


class QuadratureUnstable(Exception):
    """Integral-mean refinement failed to settle near a circle pole."""


def is_infinite(w):
    return isinstance(w, complex) and (math.isinf(w.real) or math.isinf(w.imag))


class Blaschke:
    """Finite Blaschke product: unimodular constant times factors
    (a - z)/(1 - conj(a) z), with the plain factor z used for a zero at the
    origin."""

    __slots__ = ("zeros", "constant")

    def __init__(self, zeros=(), constant=1.0):
        z = np.atleast_1d(np.asarray(zeros, dtype=np.complex128)) if len(zeros) \
            else np.empty(0, dtype=np.complex128)
        if z.size and np.abs(z).max() >= 1.0 - ZERO_MARGIN:
            raise ValueError("Blaschke zeros must satisfy |a| < 1 - 1e-12")
        c = complex(constant)
        if abs(abs(c) - 1.0) > 1e-12:
            raise ValueError("|constant| must be 1 within 1e-12")
        self.zeros = z
        self.constant = c

    @property
    def degree(self):
        return len(self.zeros)

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        out = np.full(z.shape, self.constant, dtype=np.complex128)
        for a in self.zeros:
            if a == 0:
                out = out * z
            else:
                out = out * (a - z) / (1.0 - np.conj(a) * z)
        if out.shape == ():
            return complex(out)
        return out

    def as_rational(self):
        """The pair (P, Q) of polynomials with B = P/Q."""
        p = np.array([self.constant], dtype=np.complex128)
        q = np.array([1.0], dtype=np.complex128)
        n_origin = 0
        for a in self.zeros:
            if a == 0:
                n_origin += 1
            else:
                p = np.convolve(p, np.array([a, -1.0], dtype=np.complex128))
                q = np.convolve(q, np.array([1.0, -np.conj(a)],
                                            dtype=np.complex128))
        if n_origin:
            p = np.concatenate([np.zeros(n_origin, dtype=np.complex128), p])
        return Poly(p), Poly(q)

    def to_json(self):
        return {
            "zeros": [[float(a.real), float(a.imag)] for a in self.zeros],
            "constant": [float(self.constant.real), float(self.constant.imag)],
        }

    @classmethod
    def from_json(cls, obj):
        zeros = [complex(re, im) for re, im in obj.get("zeros", [])]
        cre, cim = obj.get("constant", [1.0, 0.0])
        return cls(zeros, complex(cre, cim))

    def __repr__(self):
        return "Blaschke(deg=%d)" % self.degree


def _min_pairwise_distance(za, zb):
    if len(za) == 0 or len(zb) == 0:
        return math.inf
    d = np.abs(za[:, None] - zb[None, :])
    return float(d.min())


def _poly_to_mp(coeffs):
    return [mpmath.mpc(c.real, c.imag) for c in coeffs]


def _mp_horner(coeffs_mp, z):
    acc = coeffs_mp[-1]
    for c in coeffs_mp[-2::-1]:
        acc = acc * z + c
    return acc


class RealSmirnov:
    """Rational real Smirnov function in reduced form N/D.

    The Blaschke pair is kept when the function was built from one;
    v_plus_nominal(= deg B2) and v_minus_nominal (= deg B1) are the
    half-plane valences.  Instances are treated as immutable.
    """

    def __init__(self, num, den, b1=None, b2=None, v_plus=None, v_minus=None):
        self.num = num
        self.den = den
        self.b1 = b1
        self.b2 = b2
        self.v_plus_nominal = v_plus
        self.v_minus_nominal = v_minus
        self._w = None
        self._circle_poles = None

    # -- basic evaluation ---------------------------------------------------

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        """N(z)/D(z); INFINITY where the denominator vanishes numerically."""
        dscale = np.abs(self.den.coeffs).max()
        if np.isscalar(z) or np.asarray(z).shape == ():
            nv = self.num(complex(z))
            dv = self.den(complex(z))
            if abs(dv) < POLE_EVAL_TOL * dscale:
                return INFINITY
            return nv / dv
        z = np.asarray(z, dtype=np.complex128)
        nv = self.num(z)
        dv = self.den(z)
        pole = np.abs(dv) < POLE_EVAL_TOL * dscale
        out = np.where(pole, INFINITY, nv / np.where(pole, 1.0, dv))
        return out

    def w_poly(self):
        """Numerator W = N'D - ND' of the derivative (phi' = W/D^2)."""
        if self._w is None:
            self._w = (self.num.derivative() * self.den
                       - self.num * self.den.derivative())
        return self._w

    def circle_poles(self):
        """Angles t of the denominator zeros on the unit circle."""
        if self._circle_poles is None:
            if self.den.degree == 0:
                self._circle_poles = []
            else:
                rep = find_roots(self.den)
                ts = []
                for r, m in rep.clusters():
                    if abs(abs(r) - 1.0) < 1e-6:
                        ts.append(math.atan2(r.imag, r.real) % (2 * math.pi))
                self._circle_poles = sorted(ts)
        return self._circle_poles

    def derivative_value(self, z):
        dv = self.den(complex(z))
        if abs(dv) < 1e-300:
            return INFINITY
        return self.w_poly()(complex(z)) / (dv * dv)

    # -- boundary -----------------------------------------------------------

    def boundary_value(self, t, im_tol=1e-8):
        """Re phi(e^{it}), escalating to high precision when doubles cannot
        separate a real boundary value from cancellation noise near a pole.

        Returns +-inf at circle poles (the sign is the one-sided limit when
        both sides agree, +inf by convention when they disagree).  Raises
        BoundaryNotReal if the imaginary residual survives escalation.
        """
        re, im, is_pole = self._boundary_eval(t)
        if is_pole:
            s1 = self._boundary_eval(t + 1e-9)[0]
            s2 = self._boundary_eval(t - 1e-9)[0]
            if s1 < 0 and s2 < 0:
                return -math.inf
            return math.inf
        if abs(im) > im_tol:
            raise BoundaryNotReal(abs(im), t)
        return re

    def _boundary_eval(self, t):
        """(Re, Im, at_pole) of phi(e^{it}) with automatic escalation."""
        z = cmath.exp(1j * t)
        nv = self.num(z)
        dv = self.den(z)
        dscale = np.abs(self.den.coeffs).max()
        nscale = np.abs(self.num.coeffs).max()
        if abs(dv) > 1e-7 * dscale:
            w = nv / dv
            # double precision leaves |Im| ~ |w| * 1e-16 of cancellation
            # noise; trust the fast path only when the result is already an
            # order under the 1e-8 realness tolerance
            if abs(w.imag) < 1e-9:
                return w.real, w.imag, False
        with mpmath.workdps(40):
            zmp = mpmath.expjpi(mpmath.mpf(t) / mpmath.pi)
            nmp = _mp_horner(_poly_to_mp(self.num.coeffs), zmp)
            dmp = _mp_horner(_poly_to_mp(self.den.coeffs), zmp)
            if abs(dmp) < 1e-25 * max(dscale, 1.0) * max(nscale, 1.0):
                return math.inf, 0.0, True
            wmp = nmp / dmp
            return float(wmp.real), float(wmp.imag), False

    def boundary_im_samples(self, n, delta=1e-4):
        """|Im phi| at n equispaced boundary samples, excluding arcs within
        delta of circle poles.  Returns (t values, |Im| values)."""
        t = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        keep = np.ones(n, dtype=bool)
        for tp in self.circle_poles():
            d = np.abs((t - tp + math.pi) % (2.0 * math.pi) - math.pi)
            keep &= d > delta
        tk = t[keep]
        ims = np.empty(tk.shape[0])
        for k, tt in enumerate(tk):
            ims[k] = abs(self._boundary_eval(float(tt))[1])
        return tk, ims

    # -- serialization ------------------------------------------------------

    def to_json(self):
        if self.b1 is not None and self.b2 is not None:
            return {"b1": self.b1.to_json(), "b2": self.b2.to_json()}
        enc = lambda p: [[float(c.real), float(c.imag)] for c in p.coeffs]
        return {"num": enc(self.num), "den": enc(self.den)}

    @classmethod
    def from_json(cls, obj):
        if "b1" in obj and "b2" in obj:
            return from_blaschke(
                Blaschke.from_json(obj["b1"]), Blaschke.from_json(obj["b2"])
            )
        dec = lambda cs: Poly(
            [complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
             for c in cs]
        )
        return from_rational(dec(obj["num"]), dec(obj["den"]))

    def __repr__(self):
        return "RealSmirnov(deg N=%d, deg D=%d, v=(%s, %s))" % (
            self.num.degree,
            self.den.degree,
            self.v_plus_nominal,
            self.v_minus_nominal,
        )


# -- constructors -----------------------------------------------------------

def from_blaschke(b1, b2):
    """phi = i(B1+B2)/(B1-B2); rejects shared zeros and non-outer B1-B2."""
    if _min_pairwise_distance(b1.zeros, b2.zeros) < 1e-8:
        raise NotRelativelyPrime("B1 and B2 share a zero within 1e-8")
    p1, q1 = b1.as_rational()
    p2, q2 = b2.as_rational()
    a = p1 * q2
    b = p2 * q1
    num = (a + b).scale(1j)
    den = a - b
    if den.is_zero():
        raise NotRelativelyPrime("B1 - B2 is identically zero")
    n_inside, _ = count_roots_in_disk(den, 1.0, BOUNDARY_TOL)
    if n_inside > 0:
        raise DenominatorVanishesInDisk(
            "B1 - B2 has %d zero(s) in the open disk" % n_inside
        )
    return RealSmirnov(num, den, b1=b1, b2=b2,
                       v_plus=b2.degree, v_minus=b1.degree)


def from_rational(num, den, check_boundary=True, n_boundary=512,
                  circle_tol=BOUNDARY_TOL):
    """Reduced rational phi = N/D with outer denominator and real boundary
    values.  The nominal half-plane valences are sampled at lambda = +-i
    (with a deterministic perturbation).

    circle_tol is the width of the band around the unit circle inside
    which a denominator root counts as a legal boundary pole rather than
    an interior zero.  A caller constructing a denominator with a known
    m-fold circle root must widen it, since the computed roots of an
    m-fold root scatter in a ring of radius ~ eps^(1/m) around it.
    """
    num = num if isinstance(num, Poly) else Poly(num)
    den = den if isinstance(den, Poly) else Poly(den)
    if den.is_zero():
        raise ValueError("denominator is identically zero")
    if den.degree >= 1:
        n_inside, _ = count_roots_in_disk(den, 1.0, circle_tol)
        if n_inside > 0:
            raise DenominatorVanishesInDisk(
                "denominator has %d zero(s) in the open disk" % n_inside
            )
        # reduced form: no shared zeros
        if num.degree >= 1:
            rn = find_roots(num)
            rd = find_roots(den)
            if _min_pairwise_distance(rn.roots, rd.roots) < 1e-8:
                raise ValueError("numerator and denominator share a zero; "
                                 "reduce the fraction first")
    phi = RealSmirnov(num, den)
    if check_boundary and num.degree + den.degree > 0:
        ts, ims = phi.boundary_im_samples(n_boundary, delta=1e-3)
        if ims.size:
            worst = int(np.argmax(ims))
            if ims[worst] > 1e-8:
                raise BoundaryNotReal(float(ims[worst]), float(ts[worst]))
    vp, _ = valence_at(phi, 1j * 1.0371)
    vm, _ = valence_at(phi, -1j * 0.9643)
    phi.v_plus_nominal = vp
    phi.v_minus_nominal = vm
    return phi


def random_blaschke(rng, degree, rmax=0.85):
    """Random product: zeros uniform in the disk of radius rmax, random
    unimodular constant.  Deterministic given the generator state."""
    r = rmax * np.sqrt(rng.random(degree))
    th = 2.0 * np.pi * rng.random(degree)
    zeros = r * np.exp(1j * th)
    c = np.exp(2j * np.pi * rng.random())
    return Blaschke(zeros, c)


def random_helson(rng, deg1, deg2, rmax=0.85, max_tries=100):
    """Random Helson-form function with deg B1 = deg1, deg B2 = deg2,
    retrying until the pair is relatively prime with outer difference."""
    for _ in range(max_tries):
        b1 = random_blaschke(rng, deg1, rmax)
        b2 = random_blaschke(rng, deg2, rmax)
        try:
            return from_blaschke(b1, b2)
        except (NotRelativelyPrime, DenominatorVanishesInDisk):
            continue
    raise RuntimeError("no admissible Blaschke pair after %d tries" % max_tries)


# -- valence and related counts ----------------------------------------------

def valence_at(phi, lam, tol=BOUNDARY_TOL):
    """Number of solutions of phi(w) = lambda in the open unit disk.

    Counts roots of N - lambda D inside the disk; roots within tol of the
    circle are excluded and reported as warnings (they occur legitimately
    when lambda is real and touches the boundary range).
    """
    p = phi.num - phi.den.scale(complex(lam))
    if p.is_zero():
        raise ValueError("phi is constant and equal to lambda")
    if p.degree == 0:
        return 0, []
    return count_roots_in_disk(p, 1.0, tol)


def halfplane_valences(phi, seed=0, n_check=8):
    """(v on C+, v on C-).

    With a Helson pair present this is (deg B2, deg B1), cross-checked by
    sampling; otherwise both half planes are sampled and constancy is
    asserted.  Raises InconsistentValence when samples disagree (numerical
    failure: the valence is constant on each half plane).
    """
    rng = np.random.default_rng(seed)

    def sample(sign, n):
        counts = []
        for _ in range(n):
            lam = complex(
                rng.uniform(-3.0, 3.0), sign * rng.uniform(0.2, 3.0)
            )
            c, _ = valence_at(phi, lam)
            counts.append(c)
        return counts

    up = sample(+1, n_check)
    lo = sample(-1, n_check)
    if phi.b1 is not None and phi.b2 is not None:
        expect = (phi.b2.degree, phi.b1.degree)
        if any(c != expect[0] for c in up) or any(c != expect[1] for c in lo):
            raise InconsistentValence(
                "sampled valences %s/%s disagree with Blaschke degrees %s"
                % (up, lo, expect)
            )
        return expect
    if len(set(up)) != 1 or len(set(lo)) != 1:
        raise InconsistentValence(
            "sampled valences not constant: C+ %s, C- %s" % (up, lo)
        )
    return up[0], lo[0]


def deficiency_indices(phi, seed=0):
    """Codimensions of the ranges of T_phi - lambda over each half plane.

    For rational phi the inner factor at every lambda is a finite Blaschke
    product, so the indices coincide with the half-plane valences.
    """
    return halfplane_valences(phi, seed=seed)


def integral_means(phi, p, r, n0=2048, rel_tol=1e-5, n_max=1 << 21):
    """M_p(r, phi): trapezoidal estimate with doubling refinement.

    The integrand is smooth for r < 1, but circle poles make it sharply
    peaked as r -> 1; refinement doubles the sampling until the estimate
    settles or the cap is hit (QuadratureUnstable).
    """
    if not 0.0 <= r < 1.0:
        raise ValueError("radius must lie in [0, 1)")
    if p <= 0:
        raise ValueError("exponent must be positive")
    if r == 0.0:
        return abs(phi.eval(0.0))
    n = n0
    prev = None
    while n <= n_max:
        t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        z = r * np.exp(1j * t)
        vals = np.abs(np.asarray(phi.eval(z)))
        est = float(np.mean(vals ** p)) ** (1.0 / p)
        if prev is not None and abs(est - prev) <= rel_tol * abs(est):
            return est
        prev = est
        n *= 2
    raise QuadratureUnstable(
        "integral mean did not settle by n = %d (r = %g)" % (n_max, r)
    )


# -- closure operations -------------------------------------------------------

def real_affine(phi, a, b):
    """a*phi + b for real a != 0, b; half-plane valences swap when a < 0."""
    a = float(a)
    b = float(b)
    if a == 0:
        raise ValueError("a must be nonzero")
    num = phi.num.scale(a) + phi.den.scale(b)
    vp, vm = phi.v_plus_nominal, phi.v_minus_nominal
    if a < 0:
        vp, vm = vm, vp
    return RealSmirnov(num, phi.den, v_plus=vp, v_minus=vm)


def precompose_inner(phi, c):
    """phi composed with a finite Blaschke product c (valences scale by
    deg c)."""
    if c.degree < 1:
        raise ValueError("precomposition requires deg C >= 1")
    pc, qc = c.as_rational()
    m = max(phi.num.degree, phi.den.degree)
    num = compose_rational(phi.num, pc, qc, m)
    den = compose_rational(phi.den, pc, qc, m)
    n_inside, _ = count_roots_in_disk(den, 1.0, BOUNDARY_TOL)
    if n_inside > 0:
        raise DenominatorVanishesInDisk(
            "composed denominator vanishes in the disk (numerical)"
        )
    vp = None if phi.v_plus_nominal is None else phi.v_plus_nominal * c.degree
    vm = None if phi.v_minus_nominal is None else phi.v_minus_nominal * c.degree
    return RealSmirnov(num, den, v_plus=vp, v_minus=vm)
