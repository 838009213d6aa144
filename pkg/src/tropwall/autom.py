"""Wall-crossing automorphisms of the truncated torus algebra.

An automorphism is determined by a pair of twist series (g1, g2), both
congruent to 1, acting on a monomial through the boundary class:

    F(z^gamma) = z^gamma * g1^{v1} * g2^{v2},   v = boundary(gamma).

The elementary transform attached to a slab with primitive direction gamma0
and slab function f twists by g1 = f^{n1}, g2 = f^{n2} with
(n1, n2) = sign * (b2, -b1) for b = boundary(gamma0), which realizes

    F(z^gamma) = z^gamma * f^{sign * <gamma, gamma0>}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .gaussian import GaussianRational, phase_compare
from .lattice import Class, GenericityError, LatticeError
from .series import SeriesContext, SeriesError, SlabFunction, TruncatedSeries


class AutomError(RuntimeError):
    pass


def _sign_value(sign_convention: str) -> int:
    if sign_convention == "plus":
        return 1
    if sign_convention == "minus":
        return -1
    raise AutomError(f"unknown sign convention {sign_convention!r}")


class Automorphism:
    """Filtered automorphism given by its twist pair (g1, g2)."""

    __slots__ = ("context", "twists")

    def __init__(self, context: SeriesContext, twists: Tuple[TruncatedSeries, TruncatedSeries]):
        g1, g2 = twists
        if g1.context != context or g2.context != context:
            raise AutomError("twist series context mismatch")
        if g1.constant_term() != 1 or g2.constant_term() != 1:
            raise AutomError("twist series must be congruent to 1")
        self.context = context
        self.twists = (g1, g2)

    @classmethod
    def identity(cls, context: SeriesContext) -> "Automorphism":
        one = TruncatedSeries.one(context)
        return cls(context, (one, one))

    def is_identity(self) -> bool:
        return self.twists[0].is_one() and self.twists[1].is_one()

    def __eq__(self, other):
        if not isinstance(other, Automorphism):
            return NotImplemented
        return self.context == other.context and self.twists == other.twists

    def __hash__(self):
        return hash((self.context, self.twists))

    def __repr__(self):
        return f"Automorphism(g1={self.twists[0]!r}, g2={self.twists[1]!r})"

    # -- action --------------------------------------------------------

    def apply(self, series: TruncatedSeries) -> TruncatedSeries:
        """Push a series through the automorphism, monomial by monomial."""
        if series.context != self.context:
            raise AutomError("series context mismatch")
        lat = self.context.lattice
        g1, g2 = self.twists
        # Cache integer powers of the twists across monomials.
        pow1: Dict[int, TruncatedSeries] = {0: TruncatedSeries.one(self.context)}
        pow2: Dict[int, TruncatedSeries] = {0: TruncatedSeries.one(self.context)}

        def power(cache, g, e):
            if e not in cache:
                cache[e] = g.int_pow(e)
            return cache[e]

        out = TruncatedSeries.zero(self.context)
        for gamma in series.support():
            c = series.terms[gamma]
            v1, v2 = lat.boundary(gamma)
            term = TruncatedSeries.monomial(self.context, gamma, c)
            if v1:
                term = term * power(pow1, g1, v1)
            if v2:
                term = term * power(pow2, g2, v2)
            out = out + term
        return out

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self after other: (self . other)(x) = self(other(x))."""
        if self.context != other.context:
            raise AutomError("automorphism context mismatch")
        new = tuple(
            ga * self.apply(gb) for ga, gb in zip(self.twists, other.twists)
        )
        return Automorphism(self.context, new)

    def inverse(self) -> "Automorphism":
        """Fixed-point solve of compose(inv, self) = identity."""
        targets = tuple(g.inverse() for g in self.twists)
        inv = Automorphism(self.context, targets)
        for _ in range(self.context.nilpotency_order() + 1):
            new = tuple(inv.apply(t) for t in targets)
            if new == inv.twists:
                return inv
            inv = Automorphism(self.context, new)
        raise AutomError("inverse iteration did not stabilize")

    def log_twists(self) -> Tuple[TruncatedSeries, TruncatedSeries]:
        return tuple(g.log1p_of() for g in self.twists)

    def transport(self, context: SeriesContext) -> "Automorphism":
        """Re-truncate the twist data in another context (same lattice).

        Coefficients are unchanged; only the truncation window moves.
        """
        return Automorphism(context, tuple(g.truncated(context) for g in self.twists))


@dataclass(frozen=True)
class ElementaryTransform:
    """The automorphism attached to a single slab."""

    slab: SlabFunction
    sign_convention: str = "plus"

    def exponents(self) -> Tuple[int, int]:
        lat = self.slab.context.lattice
        b1, b2 = lat.boundary(self.slab.direction)
        s = _sign_value(self.sign_convention)
        return (s * b2, -s * b1)

    def automorphism(self) -> Automorphism:
        n1, n2 = self.exponents()
        f = self.slab.series
        return Automorphism(self.slab.context, (f.int_pow(n1), f.int_pow(n2)))

    def inverse_automorphism(self) -> Automorphism:
        n1, n2 = self.exponents()
        f = self.slab.series
        return Automorphism(self.slab.context, (f.int_pow(-n1), f.int_pow(-n2)))


def elementary(slab: SlabFunction, sign_convention: str = "plus") -> Automorphism:
    return ElementaryTransform(slab, sign_convention).automorphism()


@dataclass(frozen=True)
class DilogGenerator:
    """Lie-algebra generator of an elementary transform.

    body is the series  sum_d (l_d / d) z^{d gamma0}  where
    log f = sum_d l_d z^{d gamma0}.  Its adjoint action uses the bracket
    [z^a, z^b] = <a, b> z^{a+b}.
    """

    direction: Class
    body: TruncatedSeries

    def ad(self, series: TruncatedSeries) -> TruncatedSeries:
        ctx = series.context
        lat = ctx.lattice
        out = TruncatedSeries.zero(ctx)
        for a, ca in self.body.terms.items():
            for b, cb in series.terms.items():
                w = lat.pairing(a, b)
                if w:
                    out = out + TruncatedSeries.monomial(ctx, lat.add(a, b), ca * cb * w)
        return out

    def exp_ad(self, series: TruncatedSeries) -> TruncatedSeries:
        out = series
        term = series
        fact = 1
        for k in range(1, series.context.nilpotency_order() + 1):
            term = self.ad(term)
            if term.is_zero():
                break
            fact *= k
            out = out + term.scale(Fraction(1, fact))
        return out


def to_dilog_generator(slab: SlabFunction) -> DilogGenerator:
    """Generator whose exponentiated adjoint action inverts the slab twist."""
    lat = slab.context.lattice
    logf = slab.series.log1p_of()
    terms: Dict[Class, Fraction] = {}
    for g, c in logf.terms.items():
        _, d = lat.primitive_part(g)
        terms[g] = c / d
    return DilogGenerator(slab.direction, TruncatedSeries(slab.context, terms))


def from_dilog_generator(gen: DilogGenerator) -> SlabFunction:
    """Inverse of to_dilog_generator."""
    lat = gen.body.context.lattice
    terms: Dict[Class, Fraction] = {}
    for g, c in gen.body.terms.items():
        _, d = lat.primitive_part(g)
        terms[g] = c * d
    return SlabFunction(gen.direction, TruncatedSeries(gen.body.context, terms).exp_of())


def check_symplectic(aut: Automorphism) -> bool:
    """Whether the automorphism preserves the log-symplectic form.

    With dlog F(z_k) = P_k dlog z1 + Q_k dlog z2 the condition is
    P1*Q2 - Q1*P2 = 1 exactly in the truncated ring.
    """
    ctx = aut.context
    lat = ctx.lattice
    L1, L2 = aut.log_twists()

    def coeff_series(L, j):
        terms = {}
        for g, c in L.terms.items():
            b = lat.boundary(g)
            if b[j]:
                terms[g] = c * b[j]
        return TruncatedSeries(ctx, terms)

    one = TruncatedSeries.one(ctx)
    P1 = one + coeff_series(L1, 0)
    Q1 = coeff_series(L1, 1)
    P2 = coeff_series(L2, 0)
    Q2 = one + coeff_series(L2, 1)
    return (P1 * Q2 - Q1 * P2) == one


class OrderedProduct:
    """Phase-ordered list of slab transforms.

    Factors are kept in increasing-phase order; evaluation composes them so
    the highest-phase factor acts first.  With this reading the two-wall
    crossing of unit slabs on the generators satisfies the five-term
    identity with the positive slab 1 + z^{(1,1)} in the middle.
    """

    def __init__(self, context: SeriesContext, sign_convention: str = "plus"):
        self.context = context
        self.sign_convention = sign_convention
        self.factors: List[SlabFunction] = []

    def phase_of(self, slab: SlabFunction) -> GaussianRational:
        ctx = self.context
        return ctx.z(slab.direction)

    def insert(self, slab: SlabFunction):
        z_new = self.phase_of(slab)
        if z_new.is_zero():
            raise GenericityError("slab direction has zero central charge here")
        i = 0
        for i, existing in enumerate(self.factors):
            c = phase_compare(self.phase_of(existing), z_new)
            if c == 0:
                raise GenericityError(
                    "two slabs share a phase: merge them before ordering"
                )
            if c > 0:
                self.factors.insert(i, slab)
                return
        self.factors.append(slab)

    def evaluate(self) -> Automorphism:
        out = Automorphism.identity(self.context)
        for slab in self.factors:
            out = out.compose(elementary(slab, self.sign_convention))
        return out


def _min_degree_terms(L: TruncatedSeries):
    if L.is_zero():
        return None, {}
    d = min(sum(g) for g in L.terms)
    return d, {g: c for g, c in L.terms.items() if sum(g) == d}


def factorize(
    aut: Automorphism,
    ray_classes: Sequence[Class],
    sign_convention: str = "plus",
) -> Dict[Class, SlabFunction]:
    """Unique phase-ordered slab factorization over the given rays.

    ray_classes are primitive classes with nonzero boundary; every residual
    class must lie on one of their rays, otherwise the configuration is not
    generic for this ray set and a GenericityError is raised.
    """
    ctx = aut.context
    lat = ctx.lattice
    rays = []
    for r in ray_classes:
        r = lat.check_class(r)
        prim, mult = lat.primitive_part(r)
        if mult != 1:
            raise AutomError(f"ray class {r} is not primitive")
        if lat.boundary(r) == (0, 0):
            raise AutomError(f"ray class {r} has trivial boundary")
        rays.append(prim)
    s = _sign_value(sign_convention)

    logs: Dict[Class, Dict[int, Fraction]] = {r: {} for r in rays}

    def current_product() -> Automorphism:
        prod = OrderedProduct(ctx, sign_convention)
        for r in rays:
            if logs[r]:
                body = TruncatedSeries(
                    ctx, {lat.scale(d, r): c for d, c in logs[r].items()}
                )
                prod.insert(SlabFunction(r, body.exp_of()))
        return prod.evaluate()

    for _ in range(ctx.nilpotency_order() + 1):
        residual = current_product().inverse().compose(aut)
        L1, L2 = residual.log_twists()
        d1, t1 = _min_degree_terms(L1)
        d2, t2 = _min_degree_terms(L2)
        if d1 is None and d2 is None:
            out = {}
            for r in rays:
                if logs[r]:
                    body = TruncatedSeries(
                        ctx, {lat.scale(d, r): c for d, c in logs[r].items()}
                    )
                    out[r] = SlabFunction(r, body.exp_of())
            return out
        level = min(d for d in (d1, d2) if d is not None)
        level_terms = [
            t1 if d1 == level else {},
            t2 if d2 == level else {},
        ]
        new_ell: Dict[Tuple[Class, int], Fraction] = {}
        for k, terms in enumerate(level_terms):
            for g, c in terms.items():
                prim, mult = lat.primitive_part(g)
                if prim not in logs:
                    raise GenericityError(
                        f"residual class {g} lies on no admissible ray"
                    )
                b1, b2 = lat.boundary(prim)
                n = (s * b2, -s * b1)[k]
                if n == 0:
                    if c != 0:
                        raise AutomError(
                            f"residual twist at class {g} has no matching exponent"
                        )
                    continue
                ell = c / n
                key = (prim, mult)
                if key in new_ell:
                    if new_ell[key] != ell:
                        raise AutomError(
                            f"inconsistent twist components at class {g}"
                        )
                else:
                    new_ell[key] = ell
        # A class with both boundary components zero cannot occur (rays
        # require nonzero boundary), so every level term was consumed.
        for (prim, mult), ell in new_ell.items():
            logs[prim][mult] = logs[prim].get(mult, Fraction(0)) + ell
    raise AutomError("factorization did not terminate")
