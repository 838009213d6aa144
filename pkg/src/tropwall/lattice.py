"""Charge lattice, skew pairing, central charges and sublevel enumeration.

Relative classes are plain integer tuples in the generator basis of the
lattice.  The skew pairing factors through the boundary map to Z^2 with the
standard symplectic form, so pairing(a, b) = det(boundary a, boundary b).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence, Tuple

from .gaussian import GaussianRational, phase_compare, phase_sort_key

Class = Tuple[int, ...]


class LatticeError(ValueError):
    pass


class GenericityError(RuntimeError):
    """Equal-phase, non-commuting charges: the generic condition fails."""


@dataclass(frozen=True)
class ChargeLattice:
    """Integer lattice of rank n with a boundary map to Z^2.

    boundary_map is a 2 x n integer matrix given as two row tuples.
    """

    rank: int
    boundary_map: Tuple[Tuple[int, ...], Tuple[int, ...]]
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.rank <= 0:
            raise LatticeError("lattice rank must be positive")
        if len(self.boundary_map) != 2 or any(
            len(row) != self.rank for row in self.boundary_map
        ):
            raise LatticeError("boundary map must be a 2 x rank integer matrix")
        if self.labels is not None and len(self.labels) != self.rank:
            raise LatticeError("one label per generator required")

    def zero(self) -> Class:
        return (0,) * self.rank

    def generator(self, i: int) -> Class:
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def check_class(self, gamma: Sequence[int]) -> Class:
        if len(gamma) != self.rank:
            raise LatticeError(
                f"class has {len(gamma)} coordinates, lattice rank is {self.rank}"
            )
        return tuple(int(c) for c in gamma)

    def boundary(self, gamma: Sequence[int]) -> Tuple[int, int]:
        g = self.check_class(gamma)
        b0 = sum(self.boundary_map[0][i] * g[i] for i in range(self.rank))
        b1 = sum(self.boundary_map[1][i] * g[i] for i in range(self.rank))
        return (b0, b1)

    def pairing(self, a: Sequence[int], b: Sequence[int]) -> int:
        """det(boundary a, boundary b) under the standard symplectic form."""
        ba, bb = self.boundary(a), self.boundary(b)
        return ba[0] * bb[1] - ba[1] * bb[0]

    def add(self, a: Sequence[int], b: Sequence[int]) -> Class:
        return tuple(x + y for x, y in zip(self.check_class(a), self.check_class(b)))

    def neg(self, a: Sequence[int]) -> Class:
        return tuple(-x for x in self.check_class(a))

    def scale(self, d: int, a: Sequence[int]) -> Class:
        return tuple(d * x for x in self.check_class(a))

    def content(self, a: Sequence[int]) -> int:
        """gcd of the coordinates; 0 for the zero class."""
        g = 0
        for x in self.check_class(a):
            g = gcd(g, abs(x))
        return g

    def primitive_part(self, a: Sequence[int]) -> Tuple[Class, int]:
        """Return (primitive class, multiplicity d >= 1) with a = d * prim."""
        c = self.content(a)
        if c == 0:
            raise LatticeError("zero class has no primitive part")
        return tuple(x // c for x in a), c


@dataclass(frozen=True)
class CentralCharge:
    """Additive assignment gamma -> Z_gamma(u), affine-linear in u per chart.

    Per generator i:  Z_i(u) = base[i] + grad_x[i]*u_x + grad_y[i]*u_y
    with Gaussian-rational coefficients; u in exact rational chart coords.
    """

    lattice: ChargeLattice
    base: Tuple[GaussianRational, ...]
    grad_x: Tuple[GaussianRational, ...] = None
    grad_y: Tuple[GaussianRational, ...] = None

    def __post_init__(self):
        n = self.lattice.rank
        if len(self.base) != n:
            raise LatticeError("one base value per generator required")
        if self.grad_x is None:
            object.__setattr__(self, "grad_x", tuple(GaussianRational(0) for _ in range(n)))
        if self.grad_y is None:
            object.__setattr__(self, "grad_y", tuple(GaussianRational(0) for _ in range(n)))
        if len(self.grad_x) != n or len(self.grad_y) != n:
            raise LatticeError("one gradient pair per generator required")

    def value(self, gamma: Sequence[int], u: Sequence) -> GaussianRational:
        """Z_gamma(u); additive in gamma, affine in u."""
        g = self.lattice.check_class(gamma)
        ux, uy = Fraction(u[0]), Fraction(u[1])
        z = GaussianRational(0)
        for i, c in enumerate(g):
            if c:
                zi = self.base[i] + self.grad_x[i] * ux + self.grad_y[i] * uy
                z = z + zi * c
        return z

    def gradient(self, gamma: Sequence[int]) -> Tuple[GaussianRational, GaussianRational]:
        """Complex gradient (dZ/du_x, dZ/du_y) of Z_gamma; constant per chart."""
        g = self.lattice.check_class(gamma)
        gx = GaussianRational(0)
        gy = GaussianRational(0)
        for i, c in enumerate(g):
            if c:
                gx = gx + self.grad_x[i] * c
                gy = gy + self.grad_y[i] * c
        return gx, gy


@dataclass(frozen=True)
class Sector:
    """An angular sector of opening strictly less than pi.

    lo and hi are direction vectors (nonzero GaussianRational); the sector
    sweeps counterclockwise from lo to hi.
    """

    lo: GaussianRational
    hi: GaussianRational
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if self.lo.is_zero() or self.hi.is_zero():
            raise LatticeError("sector boundary directions must be nonzero")
        if self.lo.cross(self.hi) <= 0:
            raise LatticeError("sector must have positive angle less than pi")

    def contains(self, z: GaussianRational) -> bool:
        if z.is_zero():
            return False
        a = self.lo.cross(z)
        b = z.cross(self.hi)
        if a < 0 or b < 0:
            return False
        if a == 0:
            return (not self.lo_open) and self.lo.dot(z) > 0
        if b == 0:
            return (not self.hi_open) and self.hi.dot(z) > 0
        return True


def charge(Z: CentralCharge, gamma: Sequence[int], u: Sequence) -> GaussianRational:
    return Z.value(gamma, u)


def _positive_cone_bound(values):
    """Bound the number of generator summands of any monoid element of
    bounded norm.

    values: nonzero generator charges spanning an angle < pi.  Returns
    (B_num, B_den_sq) meaning: any sum of k generators with |sum| < lam
    satisfies k^2 * B_den_sq < lam^2 * B_num ... encoded as a callable.
    """
    # Pick extreme-phase values z_a, z_b of the list (angle between < pi).
    za = values[0]
    zb = values[0]
    for z in values[1:]:
        if za.cross(z) < 0:
            za = z
        if zb.cross(z) > 0:
            zb = z
    det = za.cross(zb)
    if det == 0:
        # All values on one ray: |sum of k| >= k * min|z|.
        m2 = min(z.norm2() for z in values)
        return ("ray", m2)
    # Each generator z = alpha*za + beta*zb with alpha,beta >= 0 rational.
    sigma = None
    for z in values:
        alpha = (z.cross(zb)) / det
        beta = (za.cross(z)) / det
        if alpha < 0 or beta < 0 or (alpha <= 0 and beta <= 0):
            raise LatticeError("generator outside the spanned cone")
        s = alpha + beta
        sigma = s if sigma is None else min(sigma, s)
    # mu = min of |alpha*za + beta*zb|^2 on alpha+beta = 1, alpha,beta >= 0.
    qa = za.norm2()
    qb = zb.norm2()
    qab = za.dot(zb)
    # Q(t) = |t*za + (1-t)*zb|^2, t in [0,1]
    candidates = [qa, qb]
    denom = qa - 2 * qab + qb
    if denom != 0:
        t = (qb - qab) / denom
        if 0 < t < 1:
            candidates.append(
                t * t * qa + 2 * t * (1 - t) * qab + (1 - t) * (1 - t) * qb
            )
    mu = min(candidates)
    if mu <= 0:
        raise LatticeError("degenerate generator cone")
    return ("cone", sigma, mu)


def sublevel_classes(
    Z: CentralCharge,
    u: Sequence,
    sector: Sector,
    lam: Fraction,
    generators: Optional[Sequence[Class]] = None,
) -> list:
    """All nonzero monoid elements (nonnegative generator combinations)
    with |Z|^2 < lam^2, sorted by (phase, norm^2, coords).

    Finiteness needs every generator charge nonzero and inside the sector.
    """
    lam = Fraction(lam)
    if lam <= 0:
        return []
    lat = Z.lattice
    if generators is None:
        generators = [lat.generator(i) for i in range(lat.rank)]
    gens = [lat.check_class(g) for g in generators]
    values = [Z.value(g, u) for g in gens]
    for g, z in zip(gens, values):
        if z.is_zero():
            raise LatticeError(f"generator {g} has zero central charge")
        if not sector.contains(z):
            raise LatticeError(f"generator charge {z} outside the sector")

    bound = _positive_cone_bound(values)
    lam2 = lam * lam
    if bound[0] == "ray":
        m2 = bound[1]
        kmax = 1
        while Fraction(kmax * kmax) * m2 < lam2:
            kmax += 1
    else:
        _, sigma, mu = bound
        # k generators => (alpha+beta) >= k*sigma => |Z|^2 >= (k*sigma)^2*mu
        kmax = 1
        while Fraction(kmax * kmax) * sigma * sigma * mu < lam2:
            kmax += 1

    out = []

    def rec(i, total_k, acc_class, acc_z):
        if i == len(gens):
            return
        # not taking generator i at all:
        rec(i + 1, total_k, acc_class, acc_z)
        cls, z = acc_class, acc_z
        k = total_k
        while k < kmax:
            cls = lat.add(cls, gens[i])
            z = z + values[i]
            k += 1
            if z.norm2() < lam2:
                out.append((cls, z))
            rec(i + 1, k, cls, z)

    rec(0, 0, lat.zero(), GaussianRational(0))

    def key(item):
        cls, z = item
        return (phase_sort_key(z), z.norm2(), cls)

    out.sort(key=key)
    return [cls for cls, _ in out]


def compare_phases_with_norm(z1: GaussianRational, z2: GaussianRational):
    """(phase, then norm^2) comparison used for ordered products."""
    c = phase_compare(z1, z2)
    if c != 0:
        return c
    n1, n2 = z1.norm2(), z2.norm2()
    if n1 < n2:
        return -1
    if n1 > n2:
        return 1
    return 0
