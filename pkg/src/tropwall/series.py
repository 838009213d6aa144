"""Truncated commutative formal series over the charge monoid.

A series is a finite table  class -> exact rational coefficient.  Classes
live in the nonnegative monoid span of the lattice generators (the zero
class carries the constant term).  Truncation is by total generator degree
and/or by the energy |Z_gamma(u)| at the context base point; any product
term past the cutoff is dropped, which realizes the quotient by the energy
filtration.
"""

from __future__ import annotations

import concurrent.futures
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple

from .gaussian import GaussianRational
from .lattice import CentralCharge, ChargeLattice, Class, LatticeError


class SeriesError(ValueError):
    pass


# Worker-thread count for convolution bucketing.  Results are merged in
# canonical key order, so the outcome is identical for any thread count.
_THREADS = 1
_LOCK = threading.Lock()


def set_threads(n: int):
    global _THREADS
    with _LOCK:
        _THREADS = max(1, int(n))


def get_threads() -> int:
    return _THREADS


@dataclass(frozen=True)
class SeriesContext:
    """Shared truncation data: lattice, charge, base point, cutoffs."""

    lattice: ChargeLattice
    charge: Optional[CentralCharge] = None
    point: Optional[Tuple[Fraction, Fraction]] = None
    energy_cutoff: Optional[Fraction] = None
    max_degree: Optional[int] = None

    def __post_init__(self):
        if self.energy_cutoff is not None:
            if self.charge is None or self.point is None:
                raise SeriesError("energy cutoff needs a charge and a base point")
            if self.energy_cutoff <= 0:
                raise SeriesError("energy cutoff must be positive")
        if self.max_degree is not None and self.max_degree < 1:
            raise SeriesError("degree cutoff must be at least 1")
        if self.energy_cutoff is None and self.max_degree is None:
            raise SeriesError("a truncation (energy and/or degree) is required")

    def degree(self, gamma: Class) -> int:
        return sum(gamma)

    def energy2(self, gamma: Class) -> Fraction:
        return self.charge.value(gamma, self.point).norm2()

    def z(self, gamma: Class) -> GaussianRational:
        if self.charge is None or self.point is None:
            raise SeriesError("context has no charge data")
        return self.charge.value(gamma, self.point)

    def keeps(self, gamma: Class) -> bool:
        if any(c < 0 for c in gamma):
            return False
        if self.max_degree is not None and self.degree(gamma) > self.max_degree:
            return False
        if self.energy_cutoff is not None and sum(gamma) > 0:
            lam = self.energy_cutoff
            if self.energy2(gamma) >= lam * lam:
                return False
        return True

    def nilpotency_order(self) -> int:
        """An upper bound on the length of surviving generator sums."""
        if self.max_degree is not None:
            return self.max_degree
        # Energy-only context: bound via the sector geometry of the
        # generator charges (same estimate as sublevel enumeration).
        from .lattice import _positive_cone_bound

        lat = self.lattice
        values = [self.z(lat.generator(i)) for i in range(lat.rank)]
        values = [z for z in values if not z.is_zero()]
        if not values:
            return 1
        bound = _positive_cone_bound(values)
        lam2 = self.energy_cutoff * self.energy_cutoff
        if bound[0] == "ray":
            m2 = bound[1]
            k = 1
            while Fraction(k * k) * m2 < lam2:
                k += 1
            return k
        _, sigma, mu = bound
        k = 1
        while Fraction(k * k) * sigma * sigma * mu < lam2:
            k += 1
        return k

    def rebased(self, point) -> "SeriesContext":
        """Same truncation rules at a new chart point (parallel transport)."""
        return SeriesContext(
            lattice=self.lattice,
            charge=self.charge,
            point=(Fraction(point[0]), Fraction(point[1])),
            energy_cutoff=self.energy_cutoff,
            max_degree=self.max_degree,
        )


class TruncatedSeries:
    """Immutable finite coefficient table over the charge monoid."""

    __slots__ = ("context", "terms")

    def __init__(self, context: SeriesContext, terms: Optional[Dict[Class, Fraction]] = None):
        self.context = context
        clean: Dict[Class, Fraction] = {}
        if terms:
            for gamma, coeff in terms.items():
                gamma = context.lattice.check_class(gamma)
                c = coeff if isinstance(coeff, Fraction) else Fraction(coeff)
                if c == 0:
                    continue
                if not context.keeps(gamma):
                    if any(x < 0 for x in gamma):
                        raise SeriesError(
                            f"class {gamma} outside the nonnegative monoid"
                        )
                    continue
                clean[gamma] = c
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def one(cls, context: SeriesContext) -> "TruncatedSeries":
        return cls(context, {context.lattice.zero(): Fraction(1)})

    @classmethod
    def zero(cls, context: SeriesContext) -> "TruncatedSeries":
        return cls(context, {})

    @classmethod
    def monomial(cls, context: SeriesContext, gamma, coeff=1) -> "TruncatedSeries":
        return cls(context, {tuple(gamma): Fraction(coeff)})

    # -- basic queries ------------------------------------------------

    def coeff(self, gamma) -> Fraction:
        return self.terms.get(tuple(gamma), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coeff(self.context.lattice.zero())

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {self.context.lattice.zero(): Fraction(1)}

    def support(self):
        return sorted(self.terms)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.context == other.context and self.terms == other.terms

    def __hash__(self):
        return hash((self.context, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return "TruncatedSeries(0)"
        bits = [f"{c}*z^{g}" for g, c in sorted(self.terms.items())]
        return "TruncatedSeries(" + " + ".join(bits) + ")"

    # -- ring operations ----------------------------------------------

    def _check_context(self, other: "TruncatedSeries"):
        if self.context != other.context:
            raise SeriesError("series context mismatch")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncatedSeries.monomial(self.context, self.context.lattice.zero(), other)
        self._check_context(other)
        terms = dict(self.terms)
        for g, c in other.terms.items():
            terms[g] = terms.get(g, Fraction(0)) + c
        return TruncatedSeries(self.context, terms)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.context, {g: -c for g, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TruncatedSeries.monomial(self.context, self.context.lattice.zero(), other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, r) -> "TruncatedSeries":
        r = Fraction(r)
        return TruncatedSeries(self.context, {g: c * r for g, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check_context(other)
        keeps = self.context.keeps
        add = self.context.lattice.add
        items_b = list(other.terms.items())
        keys_a = sorted(self.terms)

        def bucket(chunk):
            acc: Dict[Class, Fraction] = {}
            for ga in chunk:
                ca = self.terms[ga]
                for gb, cb in items_b:
                    g = add(ga, gb)
                    if keeps(g):
                        acc[g] = acc.get(g, Fraction(0)) + ca * cb
            return acc

        n = get_threads()
        if n <= 1 or len(keys_a) < 4:
            partials = [bucket(keys_a)]
        else:
            chunks = [keys_a[i::n] for i in range(n)]
            with concurrent.futures.ThreadPoolExecutor(max_workers=n) as ex:
                partials = list(ex.map(bucket, chunks))
        terms: Dict[Class, Fraction] = {}
        for part in partials:
            for g in sorted(part):
                terms[g] = terms.get(g, Fraction(0)) + part[g]
        return TruncatedSeries(self.context, terms)

    __rmul__ = __mul__

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse; needs a nonzero constant term."""
        c0 = self.constant_term()
        if c0 == 0:
            raise SeriesError("series with zero constant term is not invertible")
        # f = c0(1 + h); 1/f = (1/c0) sum (-h)^k
        h = self.scale(Fraction(1) / c0) - 1
        out = TruncatedSeries.one(self.context)
        power = TruncatedSeries.one(self.context)
        for _ in range(self.context.nilpotency_order()):
            power = power * (-h)
            if power.is_zero():
                break
            out = out + power
        return out.scale(Fraction(1) / c0)

    def int_pow(self, e: int) -> "TruncatedSeries":
        if e == 0:
            return TruncatedSeries.one(self.context)
        base = self if e > 0 else self.inverse()
        e = abs(e)
        out = TruncatedSeries.one(self.context)
        acc = base
        while e:
            if e & 1:
                out = out * acc
            e >>= 1
            if e:
                acc = acc * acc
        return out

    def log1p_of(self) -> "TruncatedSeries":
        """log f for f with constant term 1 (Mercator series)."""
        if self.constant_term() != 1:
            raise SeriesError("log requires constant term 1")
        h = self - 1
        out = TruncatedSeries.zero(self.context)
        power = TruncatedSeries.one(self.context)
        for k in range(1, self.context.nilpotency_order() + 1):
            power = power * h
            if power.is_zero():
                break
            out = out + power.scale(Fraction((-1) ** (k - 1), k))
        return out

    def exp_of(self) -> "TruncatedSeries":
        """exp f for f with constant term 0."""
        if self.constant_term() != 0:
            raise SeriesError("exp requires constant term 0")
        out = TruncatedSeries.one(self.context)
        power = TruncatedSeries.one(self.context)
        fact = 1
        for k in range(1, self.context.nilpotency_order() + 1):
            power = power * self
            if power.is_zero():
                break
            fact *= k
            out = out + power.scale(Fraction(1, fact))
        return out

    def pow(self, e) -> "TruncatedSeries":
        """f^e for rational e; f must have constant term 1."""
        if isinstance(e, int) or (isinstance(e, Fraction) and e.denominator == 1):
            if self.constant_term() != 1:
                raise SeriesError("pow requires constant term 1")
            return self.int_pow(int(e))
        if self.constant_term() != 1:
            raise SeriesError("pow requires constant term 1")
        return self.log1p_of().scale(Fraction(e)).exp_of()

    def truncated(self, context: SeriesContext) -> "TruncatedSeries":
        """Re-truncate into a context with the same lattice."""
        if context.lattice != self.context.lattice:
            raise SeriesError("cannot move a series between lattices")
        return TruncatedSeries(context, dict(self.terms))

    # -- serialization ------------------------------------------------

    def to_table(self) -> str:
        """Text table: 'coords TAB p/q', sorted by (|Z|^2 or degree, lex)."""
        ctx = self.context

        def key(g):
            if ctx.energy_cutoff is not None:
                return (ctx.energy2(g), g)
            return (ctx.degree(g), g)

        lines = []
        for g in sorted(self.terms, key=key):
            coords = ",".join(str(x) for x in g)
            c = self.terms[g]
            lines.append(f"{coords}\t{c.numerator}/{c.denominator}")
        return "\n".join(lines)


def log1p(f: TruncatedSeries) -> TruncatedSeries:
    return f.log1p_of()


def exp(f: TruncatedSeries) -> TruncatedSeries:
    return f.exp_of()


@dataclass(frozen=True)
class SlabFunction:
    """Generating series 1 + sum over d of coefficients on multiples of a
    primitive class; the wall-attached function."""

    direction: Class
    series: TruncatedSeries

    def __post_init__(self):
        lat = self.series.context.lattice
        prim, mult = lat.primitive_part(self.direction)
        if mult != 1:
            raise SeriesError("slab direction must be a primitive class")
        if self.series.constant_term() != 1:
            raise SeriesError("slab function must be 1 modulo positive energy")
        for g in self.series.terms:
            if sum(g) == 0:
                continue
            try:
                p, _ = lat.primitive_part(g)
            except LatticeError:
                raise SeriesError("malformed slab support")
            if p != prim:
                raise SeriesError(
                    f"slab supported off the direction line: {g} vs {self.direction}"
                )

    @property
    def context(self) -> SeriesContext:
        return self.series.context


def max_cover_degree(context: SeriesContext, gamma: Class) -> int:
    """Largest d with d*gamma inside the truncation."""
    lat = context.lattice
    d = 0
    while context.keeps(lat.scale(d + 1, gamma)):
        d += 1
    return d


def slab_from_counts(counts, gamma, context: SeriesContext) -> SlabFunction:
    """Build f = exp( sum_d d * count(d) * z^{d gamma} ) for primitive gamma.

    counts maps the cover degree d >= 1 to a rational weighted disc count.
    """
    lat = context.lattice
    gamma = lat.check_class(gamma)
    prim, mult = lat.primitive_part(gamma)
    if mult != 1:
        raise SeriesError("slab direction must be primitive")
    terms: Dict[Class, Fraction] = {}
    for d in range(1, max_cover_degree(context, gamma) + 1):
        c = Fraction(counts(d)) if callable(counts) else Fraction(counts.get(d, 0))
        if c:
            terms[lat.scale(d, gamma)] = Fraction(d) * c
    body = TruncatedSeries(context, terms)
    return SlabFunction(gamma, body.exp_of())


def counts_from_slab(slab: SlabFunction) -> Dict[int, Fraction]:
    """Invert slab_from_counts: recover d -> weighted count from log f."""
    lat = slab.context.lattice
    logf = slab.series.log1p_of()
    out: Dict[int, Fraction] = {}
    for g, c in logf.terms.items():
        if sum(g) == 0:
            continue
        prim, d = lat.primitive_part(g)
        if prim != tuple(slab.direction):
            raise SeriesError("malformed slab support")
        out[d] = c / d
    return out
