"""Truncated series ring: axioms, log/exp, slab round trips, threading."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tropwall.gaussian import GaussianRational
from tropwall.lattice import CentralCharge, ChargeLattice
from tropwall.series import (
    SeriesContext,
    SeriesError,
    SlabFunction,
    TruncatedSeries,
    counts_from_slab,
    get_threads,
    set_threads,
    slab_from_counts,
)

LAT = ChargeLattice(rank=2, boundary_map=((1, 0), (0, 1)))


def ctx(order=6):
    return SeriesContext(lattice=LAT, max_degree=order)


def energy_ctx(lam):
    Z = CentralCharge(
        lattice=LAT,
        base=(GaussianRational(1, 0), GaussianRational(0, 1)),
        grad_x=(GaussianRational(1), GaussianRational(1)),
        grad_y=(GaussianRational(0, 1), GaussianRational(0, 1)),
    )
    return SeriesContext(
        lattice=LAT,
        charge=Z,
        point=(Fraction(0), Fraction(0)),
        energy_cutoff=Fraction(lam),
    )


small_terms = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)),
    st.fractions(min_value=-20, max_value=20, max_denominator=5),
    max_size=5,
)


def series_from(terms, context):
    return TruncatedSeries(context, {g: c for g, c in terms.items()})


@given(small_terms, small_terms, small_terms)
@settings(max_examples=60)
def test_ring_axioms(ta, tb, tc):
    c = ctx(5)
    a, b, d = series_from(ta, c), series_from(tb, c), series_from(tc, c)
    assert (a + b) + d == a + (b + d)
    assert a * b == b * a
    assert (a * b) * d == a * (b * d)
    assert a * (b + d) == a * b + a * d
    assert a + TruncatedSeries.zero(c) == a
    assert a * TruncatedSeries.one(c) == a


@given(small_terms)
@settings(max_examples=40)
def test_inverse_round_trip(terms):
    c = ctx(5)
    f = series_from(terms, c) + 1
    if f.constant_term() == 0:
        return
    assert f * f.inverse() == TruncatedSeries.one(c)


@given(small_terms)
@settings(max_examples=40)
def test_log_exp_round_trip(terms):
    c = ctx(5)
    terms = {g: v for g, v in terms.items() if sum(g) > 0}
    f = series_from(terms, c)
    assert f.exp_of().log1p_of() == f
    g = f + 1
    assert g.log1p_of().exp_of() == g


def test_exp_additivity():
    c = ctx(6)
    x = TruncatedSeries.monomial(c, (1, 0))
    y = TruncatedSeries.monomial(c, (0, 1))
    assert (x + y).exp_of() == x.exp_of() * y.exp_of()


def test_geometric_series_inverse():
    c = ctx(7)
    x = TruncatedSeries.monomial(c, (1, 0))
    inv = (TruncatedSeries.one(c) - x).inverse()
    assert inv == sum(
        (TruncatedSeries.monomial(c, (d, 0)) for d in range(1, 8)),
        TruncatedSeries.one(c),
    )


@given(st.integers(-4, 4), st.integers(-4, 4))
def test_int_pow_is_homomorphism(e1, e2):
    c = ctx(5)
    f = 1 + TruncatedSeries.monomial(c, (1, 0)) + TruncatedSeries.monomial(c, (1, 1), Fraction(1, 2))
    assert f.int_pow(e1) * f.int_pow(e2) == f.int_pow(e1 + e2)


def test_rational_pow():
    c = ctx(6)
    f = 1 + TruncatedSeries.monomial(c, (1, 0))
    h = f.pow(Fraction(1, 2))
    assert h * h == f
    assert f.pow(Fraction(2)) == f * f


def test_binomial_pow_coefficients():
    c = ctx(5)
    f = 1 + TruncatedSeries.monomial(c, (1, 0))
    g = f.pow(Fraction(-1, 2))
    # (1+x)^(-1/2) = 1 - x/2 + 3x^2/8 - 5x^3/16 + ...
    assert g.coeff((1, 0)) == Fraction(-1, 2)
    assert g.coeff((2, 0)) == Fraction(3, 8)
    assert g.coeff((3, 0)) == Fraction(-5, 16)


def test_energy_truncation_drops_heavy_terms():
    c = energy_ctx(2)  # keep |Z|^2 < 4; at origin |Z_(a,b)|^2 = a^2+b^2
    f = TruncatedSeries(c, {(1, 0): 1, (1, 1): 1, (2, 0): 1, (0, 2): 1})
    assert set(f.terms) == {(1, 0), (1, 1)}
    x = TruncatedSeries.monomial(c, (1, 0))
    y = TruncatedSeries.monomial(c, (0, 1))
    assert (x * y).coeff((1, 1)) == 1
    assert (x * x).is_zero()


def test_truncation_compatibility():
    big = ctx(8)
    small = ctx(4)
    f = 1 + TruncatedSeries.monomial(big, (1, 0)) + TruncatedSeries.monomial(big, (0, 1))
    g = 1 - TruncatedSeries.monomial(big, (1, 1), Fraction(2, 3))
    lhs = (f * g).truncated(small)
    rhs = f.truncated(small) * g.truncated(small)
    assert lhs == rhs
    assert f.inverse().truncated(small) == f.truncated(small).inverse()


def test_negative_class_rejected():
    c = ctx(4)
    with pytest.raises(SeriesError):
        TruncatedSeries(c, {(-1, 0): Fraction(1)})


def test_slab_round_trip_focus_focus():
    """Counts (-1)^(d-1)/d^2 on multiples of a generator give exactly 1 + x."""
    c = ctx(8)
    slab = slab_from_counts(
        lambda d: Fraction((-1) ** (d - 1), d * d), (1, 0), c
    )
    expect = 1 + TruncatedSeries.monomial(c, (1, 0))
    assert slab.series == expect
    back = counts_from_slab(slab)
    assert back == {
        d: Fraction((-1) ** (d - 1), d * d) for d in range(1, 9)
    }


@given(
    st.dictionaries(
        st.integers(1, 5), st.fractions(min_value=-10, max_value=10, max_denominator=6), max_size=4
    )
)
@settings(max_examples=40)
def test_slab_counts_round_trip(counts):
    c = ctx(5)
    counts = {d: v for d, v in counts.items() if v != 0}
    slab = slab_from_counts(counts, (0, 1), c)
    assert counts_from_slab(slab) == counts


def test_slab_rejects_imprimitive_direction_and_stray_support():
    c = ctx(6)
    with pytest.raises(SeriesError):
        slab_from_counts({1: Fraction(1)}, (2, 0), c)
    bad = 1 + TruncatedSeries.monomial(c, (1, 1))
    with pytest.raises(SeriesError):
        SlabFunction((1, 0), bad)


def test_serialization_sorted_and_exact():
    c = energy_ctx(3)
    f = TruncatedSeries(c, {(1, 1): Fraction(-1, 2), (1, 0): 2, (0, 1): Fraction(1, 3)})
    # Equal-energy classes tie-break lexicographically.
    assert f.to_table() == "0,1\t1/3\n1,0\t2/1\n1,1\t-1/2"


def test_threaded_multiplication_is_deterministic():
    c = ctx(7)
    f = sum(
        (TruncatedSeries.monomial(c, (a, b), Fraction(a + 1, b + 2))
         for a in range(4) for b in range(4)),
        TruncatedSeries.one(c),
    )
    g = f * f + f
    old = get_threads()
    try:
        set_threads(4)
        h = f * f + f
    finally:
        set_threads(old)
    assert g == h
    assert g.to_table() == h.to_table()
