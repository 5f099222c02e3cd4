"""Reference functions used across the test suite and the docs.

Each is a small rational real Smirnov function with known range, boundary
values, and valence structure:

- upper_halfplane_map:  i(1+z)/(1-z), a bijection of the disk onto the
  upper half plane; boundary values -cot(t/2).
- lower_halfplane_map:  its negative, covering the lower half plane.
- fourth_power_map:     ((1+z)/(1-z))^4, covering C minus the origin;
  boundary values cot^4(t/2).
- koebe:                z/(1-z)^2, univalent onto C minus the slit
  (-inf, -1/4]; boundary values -(1/2)/(1-cos t).
- double_slit:          iz/(1-z^2), univalent onto C minus the two slits
  (-inf, -1/2] and [1/2, inf); boundary values -(1/2)csc t.
"""

from .blaschke_smirnov import Blaschke, from_blaschke, from_rational
from .complex_poly import Poly


def upper_halfplane_map():
    return from_blaschke(Blaschke(), Blaschke([0.0]))


def lower_halfplane_map():
    return from_blaschke(Blaschke([0.0]), Blaschke())


def fourth_power_map():
    return from_rational(Poly([1, 4, 6, 4, 1]), Poly([1, -4, 6, -4, 1]))


def koebe():
    return from_rational(Poly([0, 1]), Poly([1, -2, 1]))


def double_slit():
    return from_rational(Poly([0, 1j]), Poly([1, 0, -1]))


def all_fixtures():
    """name -> function, for parametrized tests and the docs."""
    return {
        "upper_halfplane_map": upper_halfplane_map(),
        "lower_halfplane_map": lower_halfplane_map(),
        "fourth_power_map": fourth_power_map(),
        "koebe": koebe(),
        "double_slit": double_slit(),
    }
