"""q-deformed quantum-torus series and refined transforms.

Coefficients are Laurent polynomials in the half-power q^(1/2), stored by
their q^(1/2)-exponent.  Monomial products pick up the symmetric weight
q^{pairing/2}, so the commutator is

    [z^a, z^b] = (q^{m/2} - q^{-m/2}) z^{a+b},   m = pairing(a, b).

The adjoint action of the quantum dilogarithm generator
(1/d) Li2(q^{1/2} c z^{gamma0}) -- with c the quadratic-refinement sign of
gamma0 -- collapses to pure Laurent coefficients:

    ad(z^{gamma'}) = sum_k  -c^k [m]_{q^k} / (d k) * z^{gamma' + k gamma0}

with m = pairing(gamma0, gamma'), which is how the refined elementary
transforms are computed without ever dividing by (1 - q^k).  The sign
twist is what makes the refined pentagon identity hold on the nose, and
at q = 1 the transform multiplies z^{gamma'} by (1 - c z^{gamma0})^m.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

from .lattice import Class, LatticeError
from .series import SeriesContext, SeriesError, TruncatedSeries


class QLaurent:
    """Laurent polynomial in q^(1/2): exponent (of q^(1/2)) -> rational."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[int, Fraction]] = None):
        clean: Dict[int, Fraction] = {}
        if terms:
            for e, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[int(e)] = c
        self.terms = clean

    @classmethod
    def constant(cls, c) -> "QLaurent":
        return cls({0: Fraction(c)})

    @classmethod
    def monomial(cls, exponent: int, c=1) -> "QLaurent":
        return cls({exponent: Fraction(c)})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QLaurent.constant(other)
        if not isinstance(other, QLaurent):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QLaurent.constant(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return QLaurent(terms)

    __radd__ = __add__

    def __neg__(self):
        return QLaurent({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QLaurent.constant(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QLaurent({e: c * Fraction(other) for e, c in self.terms.items()})
        terms: Dict[int, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return QLaurent(terms)

    __rmul__ = __mul__

    def scale(self, r) -> "QLaurent":
        return self * Fraction(r)

    def bar(self) -> "QLaurent":
        """The q <-> 1/q involution."""
        return QLaurent({-e: c for e, c in self.terms.items()})

    def at_one(self) -> Fraction:
        """Specialization q = 1."""
        return sum(self.terms.values(), Fraction(0))

    def at(self, s: Fraction) -> Fraction:
        """Evaluate at a rational value of q^(1/2)."""
        s = Fraction(s)
        if s == 0:
            raise ZeroDivisionError("cannot specialize at q^(1/2) = 0")
        return sum(c * s**e for e, c in self.terms.items())

    def serialize(self) -> str:
        bits = []
        for e in sorted(self.terms):
            c = self.terms[e]
            bits.append(f"{e}/2:{c.numerator}/{c.denominator}")
        return ";".join(bits) if bits else "0"

    def __repr__(self):
        return f"QLaurent({self.serialize()})"


def q_int(n: int) -> QLaurent:
    """The symmetric quantum integer [n]_q = (q^{n/2}-q^{-n/2})/(q^{1/2}-q^{-1/2})."""
    if n <= 0:
        raise ValueError("q_int needs a positive integer")
    return QLaurent({n - 1 - 2 * j: Fraction(1) for j in range(n)})


def q_int_signed(m: int, step: int = 1) -> QLaurent:
    """[m]_{q^step} for any integer m, with [-m] = -[m] and [0] = 0."""
    if m == 0:
        return QLaurent()
    base = q_int(abs(m))
    out = QLaurent({e * step: c for e, c in base.terms.items()})
    return out if m > 0 else -out


class QuantumTorusSeries:
    """Normal-ordered truncated series with QLaurent coefficients."""

    __slots__ = ("context", "terms")

    def __init__(self, context: SeriesContext, terms: Optional[Dict[Class, QLaurent]] = None):
        self.context = context
        clean: Dict[Class, QLaurent] = {}
        if terms:
            for g, c in terms.items():
                g = context.lattice.check_class(g)
                if isinstance(c, (int, Fraction)):
                    c = QLaurent.constant(c)
                if c.is_zero():
                    continue
                if not context.keeps(g):
                    if any(x < 0 for x in g):
                        raise SeriesError(f"class {g} outside the nonnegative monoid")
                    continue
                clean[g] = c
        self.terms = clean

    @classmethod
    def one(cls, context) -> "QuantumTorusSeries":
        return cls(context, {context.lattice.zero(): QLaurent.constant(1)})

    @classmethod
    def monomial(cls, context, gamma, coeff=1) -> "QuantumTorusSeries":
        if isinstance(coeff, (int, Fraction)):
            coeff = QLaurent.constant(coeff)
        return cls(context, {tuple(gamma): coeff})

    def coeff(self, gamma) -> QLaurent:
        return self.terms.get(tuple(gamma), QLaurent())

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, QuantumTorusSeries):
            return NotImplemented
        return self.context == other.context and self.terms == other.terms

    def __add__(self, other):
        if self.context != other.context:
            raise SeriesError("context mismatch")
        terms = dict(self.terms)
        for g, c in other.terms.items():
            terms[g] = terms.get(g, QLaurent()) + c
        return QuantumTorusSeries(self.context, terms)

    def __neg__(self):
        return QuantumTorusSeries(self.context, {g: -c for g, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "QuantumTorusSeries":
        if isinstance(c, (int, Fraction)):
            c = QLaurent.constant(c)
        return QuantumTorusSeries(self.context, {g: x * c for g, x in self.terms.items()})

    def q_mul(self, other: "QuantumTorusSeries") -> "QuantumTorusSeries":
        """Normal-ordered product with the symmetric weight q^{pairing/2}."""
        if self.context != other.context:
            raise SeriesError("context mismatch")
        lat = self.context.lattice
        keeps = self.context.keeps
        terms: Dict[Class, QLaurent] = {}
        for ga, ca in self.terms.items():
            for gb, cb in other.terms.items():
                g = lat.add(ga, gb)
                if not keeps(g):
                    continue
                m = lat.pairing(ga, gb)
                w = ca * cb * QLaurent.monomial(m)
                terms[g] = terms.get(g, QLaurent()) + w
        return QuantumTorusSeries(self.context, terms)

    def at_one(self) -> TruncatedSeries:
        """Classical limit as a commutative truncated series."""
        return TruncatedSeries(
            self.context, {g: c.at_one() for g, c in self.terms.items()}
        )


@dataclass(frozen=True)
class QDilogTransform:
    """The refined elementary transform attached to one charge ray.

    Acts as the adjoint of (1/d) Li2(q^{1/2} z^{gamma0}); sign +1 gives the
    transform itself, -1 its inverse.
    """

    context: SeriesContext
    gamma0: Class
    d: int = 1
    sign: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("divisibility must be positive")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def inverse(self) -> "QDilogTransform":
        return QDilogTransform(self.context, self.gamma0, self.d, -self.sign)

    def ad(self, series: QuantumTorusSeries) -> QuantumTorusSeries:
        """One application of the commutator with the generator."""
        from .dt import quadratic_refinement

        ctx = self.context
        lat = ctx.lattice
        eps = quadratic_refinement(lat, self.gamma0)
        terms: Dict[Class, QLaurent] = {}
        for g, c in series.terms.items():
            m = lat.pairing(self.gamma0, g)
            if m == 0:
                continue
            k = 1
            while True:
                target = lat.add(g, lat.scale(k, self.gamma0))
                if not ctx.keeps(target):
                    break
                w = q_int_signed(m, step=k).scale(
                    Fraction(-self.sign * eps**k, self.d * k)
                )
                terms[target] = terms.get(target, QLaurent()) + c * w
                k += 1
        return QuantumTorusSeries(ctx, terms)

    def apply(self, series: QuantumTorusSeries) -> QuantumTorusSeries:
        """exp(ad) of the generator on a series."""
        out = series
        term = series
        fact = 1
        for k in range(1, self.context.nilpotency_order() + 1):
            term = self.ad(term)
            if term.is_zero():
                break
            fact *= k
            out = out + term.scale(Fraction(1, fact))
        return out


def q_dilog(context: SeriesContext, gamma0, d: int = 1) -> QDilogTransform:
    gamma0 = context.lattice.check_class(gamma0)
    return QDilogTransform(context, gamma0, d)


def apply_sequence(transforms, series: QuantumTorusSeries) -> QuantumTorusSeries:
    """Apply transforms right-to-left (the last listed acts first)."""
    for t in reversed(list(transforms)):
        series = t.apply(series)
    return series


@dataclass(frozen=True)
class QFraction:
    """A quotient of two Laurent polynomials in q^(1/2)."""

    num: QLaurent
    den: QLaurent

    def __post_init__(self):
        if self.den.is_zero():
            raise ZeroDivisionError("zero denominator")

    @classmethod
    def of(cls, x) -> "QFraction":
        if isinstance(x, QFraction):
            return x
        if isinstance(x, (int, Fraction)):
            x = QLaurent.constant(x)
        return cls(x, QLaurent.constant(1))

    def __add__(self, other):
        other = QFraction.of(other)
        return QFraction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __mul__(self, other):
        other = QFraction.of(other)
        return QFraction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __neg__(self):
        return QFraction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-QFraction.of(other))

    def __eq__(self, other):
        other = QFraction.of(other)
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((len(self.num.terms), len(self.den.terms)))

    def at_one(self) -> Fraction:
        d = self.den.at_one()
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at q = 1")
        return self.num.at_one() / d

    def __repr__(self):
        return f"QFraction({self.num.serialize()} / {self.den.serialize()})"


def refined_weight(disc) -> QFraction:
    """q-deformed disc weight: quantum vertex multiplicities and the
    initial-leg factor (-1)^(w-1) / (w [w]_q)."""
    if not disc.children:
        d = disc.cover_degree
        return QFraction(
            QLaurent.constant(Fraction((-1) ** (d - 1), d)), q_int(d)
        )
    a, b = disc.children
    det = abs(
        a.direction[0] * b.direction[1] - a.direction[1] * b.direction[0]
    )
    from .lattice import GenericityError

    if det == 0:
        raise GenericityError("parallel edge directions at a trivalent vertex")
    mult = QFraction.of(q_int(a.weight * b.weight * det))
    return refined_weight(a) * refined_weight(b) * mult


def refined_omega(base, u, gamma, lam) -> QFraction:
    """Sum of refined weights of generic discs; q = 1 recovers the
    unrefined count."""
    from .tropical import _is_direct_class, enumerate_discs
    from .lattice import GenericityError

    gamma = base.lattice.check_class(gamma)
    if not _is_direct_class(gamma):
        raise GenericityError(
            "refined enumeration is exact only for multiplicity-free or "
            "single-generator classes"
        )
    total = QFraction.of(0)
    for disc in enumerate_discs(base, u, gamma, lam):
        total = total + refined_weight(disc)
    return total
