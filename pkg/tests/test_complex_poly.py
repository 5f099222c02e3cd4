"""Tests for polynomial arithmetic, the Aberth root finder, and root counting.

Root-count oracles use numpy's companion-matrix eigenvalue solver, which
shares no code with the Aberth iteration under test.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rsmirnov.complex_poly import (
    CircleTooClose,
    Poly,
    compose_mobius,
    compose_rational,
    count_roots_in_disk,
    find_roots,
    poly_from_roots,
    winding_count,
)


def np_roots_in_disk(p, radius=1.0):
    """Independent oracle: companion-matrix eigenvalues, strict interior."""
    c = p.coeffs[::-1]  # numpy wants descending
    return int(np.sum(np.abs(np.roots(c)) < radius))


class TestArithmetic:
    def test_monomial_product(self):
        p = Poly([0, 1]) * Poly([0, 1])
        assert p.degree == 2
        assert np.allclose(p.coeffs, [0, 0, 1])

    def test_additive_inverse_degree_convention(self):
        p = Poly([1, 2, 3])
        z = p + (-p)
        assert z.is_zero()
        assert z.degree == 0

    def test_compose_square_with_mobius(self):
        n, d = compose_mobius(Poly([0, 0, 1]), Poly([1, 1]), Poly([1, -1]))
        assert np.allclose(n.coeffs, [1, 2, 1])   # (1+z)^2
        assert np.allclose(d.coeffs, [1, -2, 1])  # (1-z)^2

    def test_compose_rational_padding(self):
        # p(w) = w with power 3 gives rnum*rden^2
        p = Poly([0, 1])
        out = compose_rational(p, Poly([0, 1]), Poly([1, -1]), power=3)
        expect = Poly([0, 1]) * Poly([1, -1]) * Poly([1, -1])
        assert np.allclose(out.coeffs, expect.coeffs)

    def test_scale_and_eval(self):
        p = Poly([1, 1]).scale(2)
        assert p(3.0) == pytest.approx(8.0)
        vals = p(np.array([0.0, 1.0, 2.0]))
        assert np.allclose(vals, [2, 4, 6])

    def test_trailing_zeros_trimmed(self):
        p = Poly([1, 2, 0, 0])
        assert p.degree == 1

    def test_power(self):
        p = Poly([1, 1]) ** 4
        assert np.allclose(p.coeffs, [1, 4, 6, 4, 1])


class TestFindRoots:
    def test_quadratic(self):
        rep = find_roots(Poly([-1, 1, 1]))  # z^2 + z - 1
        got = sorted(rep.roots.real.tolist())
        assert got[0] == pytest.approx(-1.6180339887, abs=1e-9)
        assert got[1] == pytest.approx(0.6180339887, abs=1e-9)
        assert rep.residual < 1e-12

    def test_pure_cube(self):
        rep = find_roots(Poly([0, 0, 0, 1]))  # z^3
        assert len(rep.roots) == 3
        assert np.all(rep.multiplicities == 3)
        assert np.allclose(rep.roots, 0)

    def test_expanded_product(self):
        p = poly_from_roots([0.5, 2.0])
        rep = find_roots(p)
        got = sorted(rep.roots.real.tolist())
        assert got == pytest.approx([0.5, 2.0], abs=1e-10)

    def test_multiple_root_clustering(self):
        # (z - 0.5)^2 (z + 0.3)
        p = poly_from_roots([0.5, 0.5, -0.3])
        rep = find_roots(p)
        pairs = rep.clusters()
        mults = sorted(m for _, m in pairs)
        assert mults == [1, 2]

    def test_triple_root_off_origin(self):
        p = poly_from_roots([0.4 + 0.2j] * 3)
        rep = find_roots(p)
        assert sorted(m for _, m in rep.clusters()) == [3]
        assert abs(rep.roots[0] - (0.4 + 0.2j)) < 1e-4

    def test_boundary_flags(self):
        p = poly_from_roots([1.0, 0.5])
        rep = find_roots(p)
        assert rep.boundary.sum() == 1

    def test_degree_zero_rejected(self):
        with pytest.raises(ValueError):
            find_roots(Poly([3.0]))


class TestCountRootsInDisk:
    def test_quadratic_one_inside(self):
        count, warnings = count_roots_in_disk(Poly([-1, 1, 1]), 1.0)
        assert count == 1
        assert warnings == []

    def test_root_outside(self):
        count, _ = count_roots_in_disk(Poly([-2, 1]), 1.0)
        assert count == 0

    def test_quartic_interior_count(self):
        # numerator of ((1+z)/(1-z))^4 - i; two of the four roots are inside
        n = Poly([1, 4, 6, 4, 1])
        d = Poly([1, -4, 6, -4, 1])
        p = n - d.scale(1j)
        count, _ = count_roots_in_disk(p, 1.0)
        assert count == np_roots_in_disk(p)
        assert count == 2

    def test_circle_root_warned_not_counted(self):
        p = poly_from_roots([1.0 + 0.0j, 0.2])
        count, warnings = count_roots_in_disk(p, 1.0, tol=1e-9)
        assert count == 1
        assert len(warnings) == 1


class TestWinding:
    def test_single_zero(self):
        assert winding_count(Poly([0, 1]), Poly([1]), 0.9) == 1

    def test_two_zeros(self):
        p = poly_from_roots([0.5, 0.6])
        assert winding_count(p, Poly([1]), 0.9) == 2

    def test_rational_matches_root_count(self):
        # numerator/denominator of iz/(1-z^2) - (0.3+0.4j)
        lam = 0.3 + 0.4j
        num = Poly([-lam, 1j, lam])
        den = Poly([1, 0, -1])
        w = winding_count(num, den, 0.999)
        c_num = np_roots_in_disk(num, 0.999)
        c_den = np_roots_in_disk(den, 0.999)
        assert w == c_num - c_den
        assert w == 1

    def test_zero_on_contour_rejected(self):
        with pytest.raises(CircleTooClose):
            winding_count(poly_from_roots([1.0]), Poly([1]), 1.0)


# -- property-based invariants ------------------------------------------------

well_separated = st.lists(
    st.tuples(
        st.floats(-2, 2, allow_nan=False, allow_infinity=False),
        st.floats(-2, 2, allow_nan=False, allow_infinity=False),
    ),
    min_size=1,
    max_size=12,
).filter(
    lambda pts: all(
        abs(complex(*a) - complex(*b)) > 0.3
        for i, a in enumerate(pts)
        for b in pts[i + 1:]
    )
)


@given(well_separated)
@settings(max_examples=60, deadline=None)
def test_roots_reconstruct_coefficients(pts):
    roots = [complex(*p) for p in pts]
    p = poly_from_roots(roots)
    rep = find_roots(p)
    q = poly_from_roots(rep.roots)
    scale = np.abs(p.coeffs).max()
    assert np.abs(q.coeffs - p.coeffs).max() < 1e-8 * scale


@given(well_separated)
@settings(max_examples=40, deadline=None)
def test_disk_count_matches_winding(pts):
    roots = [complex(*p) for p in pts]
    p = poly_from_roots(roots)
    tol = 1e-9
    count, warnings = count_roots_in_disk(p, 1.0, tol)
    if warnings:
        return  # boundary warnings void the comparison by contract
    if any(abs(abs(r) - 1.0) < 0.05 for r in roots):
        return  # keep the winding contour honestly clear of roots
    w = winding_count(p, Poly([1]), 1.0 - 2 * tol)
    assert count == w


@given(
    well_separated,
    st.complex_numbers(min_magnitude=0.1, max_magnitude=5, allow_nan=False,
                       allow_infinity=False),
)
@settings(max_examples=40, deadline=None)
def test_count_invariant_under_scaling(pts, const):
    roots = [complex(*p) for p in pts]
    p = poly_from_roots(roots)
    c1, _ = count_roots_in_disk(p, 1.0)
    c2, _ = count_roots_in_disk(p.scale(const), 1.0)
    assert c1 == c2
