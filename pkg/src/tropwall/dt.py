"""Integer invariants behind slab functions.

The rational weighted disc counts attached to a slab repackage integer
invariants through a multiple-cover rule twisted by a quadratic refinement
of the boundary pairing:

    sign(gamma) = (-1)^(v1*v2 + v1 + v2),   v = boundary(gamma),

which satisfies sign(a+b) = sign(a)*sign(b)*(-1)^pairing(a,b).  A slab is
in normal form when

    f = prod_d (1 - sign(d*gamma)^d z^{d gamma})^(-d*Omega_d * sign(d*gamma)^d)

equivalently log f = sum_d d*Omega_d*log(1 - sign_d z^{d gamma}) with the
leading coefficients peeled off degree by degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .lattice import ChargeLattice, Class, LatticeError
from .series import SeriesContext, SeriesError, SlabFunction, TruncatedSeries, counts_from_slab


def quadratic_refinement(lattice: ChargeLattice, gamma: Sequence[int]) -> int:
    """The sign (-1)^(v1*v2 + v1 + v2) on the boundary class v."""
    v1, v2 = lattice.boundary(gamma)
    return -1 if (v1 * v2 + v1 + v2) % 2 else 1


def slab_to_dt(slab: SlabFunction) -> Dict[int, Fraction]:
    """Peel a slab function into its normal-form exponents Omega_d.

    Returns d -> Omega(d * direction) for every cover degree the truncation
    retains.  Integrality of the result is a theorem for geometric input,
    not an assumption; use integrality_report to audit it.
    """
    ctx = slab.context
    lat = ctx.lattice
    gamma = slab.direction
    residual = slab.series.log1p_of()
    omega: Dict[int, Fraction] = {}
    d = 1
    while ctx.keeps(lat.scale(d, gamma)):
        g = lat.scale(d, gamma)
        r = residual.coeff(g)
        if r:
            c = quadratic_refinement(lat, g)
            omega[d] = Fraction(-r * c, d)
            # log(1 - c z^g) term of the normal form at weight d*Omega_d.
            inner = TruncatedSeries.monomial(ctx, g, c)
            piece = (1 - inner).log1p_of().scale(Fraction(d) * omega[d])
            residual = residual - piece
        else:
            omega[d] = Fraction(0)
        d += 1
    return omega


def dt_to_slab(omega: Dict[int, Fraction], gamma: Class, context: SeriesContext) -> SlabFunction:
    """Rebuild the normal-form slab from its exponents (inverse of slab_to_dt)."""
    lat = context.lattice
    gamma = lat.check_class(gamma)
    body = TruncatedSeries.zero(context)
    for d, om in sorted(omega.items()):
        g = lat.scale(d, gamma)
        if om == 0 or not context.keeps(g):
            continue
        c = quadratic_refinement(lat, g)
        inner = TruncatedSeries.monomial(context, g, c)
        body = body + (1 - inner).log1p_of().scale(Fraction(d) * Fraction(om))
    return SlabFunction(gamma, body.exp_of())


def multiple_cover(
    omega: Dict[int, Fraction], lattice: ChargeLattice, gamma: Class
) -> Dict[int, Fraction]:
    """Rational weighted counts from integer invariants on one ray.

    omega_tilde(d*gamma) = - sum over k dividing d of
        sign((d/k)*gamma)^d * Omega((d/k)*gamma) / k^2.
    """
    gamma = lattice.check_class(gamma)
    out: Dict[int, Fraction] = {}
    for d in sorted(omega):
        total = Fraction(0)
        for k in range(1, d + 1):
            if d % k:
                continue
            m = d // k
            om = omega.get(m, Fraction(0))
            if om:
                c = quadratic_refinement(lattice, lattice.scale(m, gamma))
                total += Fraction(c**d) * Fraction(om) / (k * k)
        out[d] = -total
    return out


def covers_to_dt(
    omega_tilde: Dict[int, Fraction], lattice: ChargeLattice, gamma: Class
) -> Dict[int, Fraction]:
    """Invert the multiple-cover rule degree by degree."""
    gamma = lattice.check_class(gamma)
    omega: Dict[int, Fraction] = {}
    for d in sorted(omega_tilde):
        lower = Fraction(0)
        for k in range(2, d + 1):
            if d % k:
                continue
            m = d // k
            om = omega.get(m, Fraction(0))
            if om:
                c = quadratic_refinement(lattice, lattice.scale(m, gamma))
                lower += Fraction(c**d) * om / (k * k)
        c_d = quadratic_refinement(lattice, lattice.scale(d, gamma))
        omega[d] = Fraction(c_d**d) * (-omega_tilde[d] - lower)
    return omega


def omega_tilde_from_slab(slab: SlabFunction) -> Dict[int, Fraction]:
    """Weighted disc counts carried by a slab: log f = sum d*count_d z^{dg}."""
    return counts_from_slab(slab)


@dataclass(frozen=True)
class InvariantRow:
    charge: Class
    omega_tilde: Fraction
    omega: Fraction
    chamber: str = "0"

    @property
    def is_integral(self) -> bool:
        return self.omega.denominator == 1


@dataclass
class InvariantTable:
    """Per-class invariants collected from one or more slabs."""

    lattice: ChargeLattice
    rows: List[InvariantRow]

    @classmethod
    def from_slab(cls, slab: SlabFunction, chamber: str = "0") -> "InvariantTable":
        lat = slab.context.lattice
        tilde = omega_tilde_from_slab(slab)
        for d in range(1, (max(tilde) if tilde else 0) + 1):
            tilde.setdefault(d, Fraction(0))
        omega = covers_to_dt(tilde, lat, slab.direction)
        rows = [
            InvariantRow(lat.scale(d, slab.direction), tilde[d], omega[d], chamber)
            for d in sorted(tilde)
        ]
        return cls(lat, rows)

    @classmethod
    def from_slabs(
        cls,
        slabs: Sequence[SlabFunction],
        chambers: Optional[Sequence[str]] = None,
    ) -> "InvariantTable":
        if chambers is None:
            chambers = [str(i) for i in range(len(slabs))]
        if len(chambers) != len(slabs):
            raise ValueError("one chamber id per slab expected")
        rows: List[InvariantRow] = []
        lat = None
        for slab, chamber in zip(slabs, chambers):
            t = cls.from_slab(slab, chamber)
            lat = t.lattice
            rows.extend(t.rows)
        rows.sort(key=lambda r: (sum(r.charge), r.charge, r.chamber))
        return cls(lat, rows)

    def to_tsv(self) -> str:
        lines = ["charge\tchamber\tomega_tilde\tomega\tintegral"]
        for r in self.rows:
            coords = ",".join(str(x) for x in r.charge)
            lines.append(
                f"{coords}\t{r.chamber}"
                f"\t{r.omega_tilde.numerator}/{r.omega_tilde.denominator}"
                f"\t{r.omega.numerator}/{r.omega.denominator}"
                f"\t{'1' if r.is_integral else '0'}"
            )
        return "\n".join(lines)


@dataclass
class IntegralityReport:
    """Audit of an invariant table.

    non_integral lists the rows whose integer invariant has a denominator;
    max_support maps each primitive direction to the largest cover degree
    with a nonzero integer invariant (0 when all vanish).
    """

    non_integral: List[InvariantRow]
    max_support: Dict[Class, int]

    @property
    def all_integral(self) -> bool:
        return not self.non_integral


def integrality_report(table: InvariantTable) -> IntegralityReport:
    bad = [r for r in table.rows if not r.is_integral]
    support: Dict[Class, int] = {}
    for r in table.rows:
        prim, mult = table.lattice.primitive_part(r.charge)
        support.setdefault(prim, 0)
        if r.omega:
            support[prim] = max(support[prim], mult)
    return IntegralityReport(bad, support)
