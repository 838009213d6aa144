"""Charge lattice, pairing, central charges, sublevel enumeration."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tropwall.gaussian import GaussianRational
from tropwall.lattice import (
    CentralCharge,
    ChargeLattice,
    LatticeError,
    Sector,
    sublevel_classes,
)


def std_lattice(n=2):
    rows = (
        tuple(1 if i == 0 else 0 for i in range(n)),
        tuple(1 if i == 1 else 0 for i in range(n)),
    )
    return ChargeLattice(rank=n, boundary_map=rows)


def test_pairing_is_determinant_of_boundaries():
    lat = std_lattice()
    assert lat.pairing((1, 0), (0, 1)) == 1
    assert lat.pairing((0, 1), (1, 0)) == -1
    assert lat.pairing((1, 0), (1, 0)) == 0
    assert lat.pairing((2, 1), (1, 1)) == 1


def test_pairing_through_boundary_map():
    # Rank 3 with two generators sharing a boundary class.
    lat = ChargeLattice(rank=3, boundary_map=((1, 0, 0), (0, 1, 1)))
    assert lat.pairing((0, 1, 0), (0, 0, 1)) == 0
    assert lat.pairing((1, 0, 0), (0, 0, 1)) == 1


@given(
    st.tuples(st.integers(-5, 5), st.integers(-5, 5)),
    st.tuples(st.integers(-5, 5), st.integers(-5, 5)),
)
def test_pairing_antisymmetry(a, b):
    lat = std_lattice()
    assert lat.pairing(a, b) == -lat.pairing(b, a)


def test_primitive_part_and_content():
    lat = std_lattice()
    assert lat.content((4, 6)) == 2
    assert lat.primitive_part((4, 6)) == ((2, 3), 2)
    assert lat.primitive_part((0, 5)) == ((0, 1), 5)
    with pytest.raises(LatticeError):
        lat.primitive_part((0, 0))


def test_central_charge_additive_and_affine():
    lat = std_lattice()
    Z = CentralCharge(
        lattice=lat,
        base=(GaussianRational(1, 0), GaussianRational(0, 1)),
        grad_x=(GaussianRational(1), GaussianRational(1)),
        grad_y=(GaussianRational(0, 1), GaussianRational(0, 1)),
    )
    u = (Fraction(2), Fraction(3))
    z1 = Z.value((1, 0), u)
    z2 = Z.value((0, 1), u)
    assert Z.value((1, 1), u) == z1 + z2
    assert Z.value((3, 2), u) == z1 * 3 + z2 * 2
    # Affine in u: value at midpoint is the average.
    v = (Fraction(4), Fraction(7))
    mid = (Fraction(3), Fraction(5))
    assert Z.value((1, 1), mid) * 2 == Z.value((1, 1), u) + Z.value((1, 1), v)


def test_sector_membership():
    s = Sector(GaussianRational(1, 0), GaussianRational(0, 1))
    assert s.contains(GaussianRational(1, 1))
    assert s.contains(GaussianRational(1, 0))
    assert s.contains(GaussianRational(0, 1))
    assert not s.contains(GaussianRational(-1, 1))
    assert not s.contains(GaussianRational(1, -1))
    so = Sector(GaussianRational(1, 0), GaussianRational(0, 1), lo_open=True)
    assert not so.contains(GaussianRational(1, 0))
    with pytest.raises(LatticeError):
        Sector(GaussianRational(1, 0), GaussianRational(-1, 0))


def pentagon_charge():
    """Two focus-focus singularities; Z1 = (ux+1) + i*uy, Z2 = ux + i(uy+1)."""
    lat = std_lattice()
    return CentralCharge(
        lattice=lat,
        base=(GaussianRational(1, 0), GaussianRational(0, 1)),
        grad_x=(GaussianRational(1), GaussianRational(1)),
        grad_y=(GaussianRational(0, 1), GaussianRational(0, 1)),
    )


def test_sublevel_classes_small_cutoff():
    Z = pentagon_charge()
    sector = Sector(GaussianRational(1, 0), GaussianRational(0, 1))
    u = (Fraction(0), Fraction(0))
    # |Z_(a,b)|^2 = a^2 + b^2 at the origin.
    got = sublevel_classes(Z, u, sector, Fraction(3, 2))
    assert set(got) == {(1, 0), (0, 1), (1, 1)}
    got2 = sublevel_classes(Z, u, sector, Fraction(5, 2))
    assert set(got2) == {
        (a, b) for a in range(3) for b in range(3)
        if 0 < a * a + b * b < Fraction(25, 4)
    }


def test_sublevel_classes_sorted_by_phase_then_norm():
    Z = pentagon_charge()
    sector = Sector(GaussianRational(1, 0), GaussianRational(0, 1))
    u = (Fraction(0), Fraction(0))
    got = sublevel_classes(Z, u, sector, Fraction(3))
    # Phase of (a, b) at origin is atan2(b, a); ties broken by norm.
    import math

    phases = [math.atan2(b, a) for a, b in got]
    assert phases == sorted(phases)
    # Same-ray classes ordered by norm.
    i1, i2 = got.index((1, 1)), got.index((2, 2))
    assert i1 < i2


def test_sublevel_rejects_zero_or_out_of_sector_generator():
    Z = pentagon_charge()
    u = (Fraction(-1), Fraction(0))  # first generator charge vanishes here
    sector = Sector(GaussianRational(1, 0), GaussianRational(0, 1))
    with pytest.raises(LatticeError):
        sublevel_classes(Z, u, sector, Fraction(2))
    narrow = Sector(GaussianRational(2, 1), GaussianRational(1, 2))
    with pytest.raises(LatticeError):
        sublevel_classes(Z, (Fraction(0), Fraction(0)), narrow, Fraction(2))


@given(st.integers(1, 6))
def test_sublevel_matches_brute_force(lam):
    Z = pentagon_charge()
    sector = Sector(GaussianRational(1, 0), GaussianRational(0, 1))
    u = (Fraction(1, 2), Fraction(1, 3))
    got = set(sublevel_classes(Z, u, sector, Fraction(lam)))
    brute = set()
    for a in range(0, 4 * lam + 2):
        for b in range(0, 4 * lam + 2):
            if (a, b) == (0, 0):
                continue
            if Z.value((a, b), u).norm2() < lam * lam:
                brute.add((a, b))
    assert got == brute
