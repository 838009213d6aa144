"""Planar scattering diagrams: walls, loop consistency, completion, jumps.

A wall is a straight line or ray in the exact rational plane carrying a
relative class and a slab function; along its support the phase of the
central charge of the class is constant and the modulus is monotone.  A
diagram is consistent when the path-ordered product of wall transforms
around every crossing point is the identity; completion inserts outgoing
rays (on the modulus-increasing side) until this holds to the working
truncation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .autom import Automorphism, OrderedProduct, _sign_value, elementary, factorize
from .gaussian import GaussianRational, phase_sort_key
from .lattice import CentralCharge, Class, GenericityError, LatticeError
from .series import SeriesContext, SeriesError, SlabFunction, TruncatedSeries, counts_from_slab

Point = Tuple[Fraction, Fraction]


class ScatteringError(RuntimeError):
    pass


def _point(p) -> Point:
    return (Fraction(p[0]), Fraction(p[1]))


def _primitive_int_vector(x: Fraction, y: Fraction) -> Tuple[int, int]:
    if x == 0 and y == 0:
        raise ScatteringError("zero direction vector")
    den = (x.denominator * y.denominator) // gcd(x.denominator, y.denominator)
    a, b = int(x * den), int(y * den)
    g = gcd(abs(a), abs(b))
    return (a // g, b // g)


def constant_phase_direction(
    charge: CentralCharge, gamma: Class, q: Point
) -> Tuple[int, int]:
    """Primitive direction of increasing |Z_gamma| at constant phase.

    Solves  (dZ/du) . v = s * Z_gamma(q)  for v with s > 0, using the real
    2x2 gradient matrix of Z_gamma.
    """
    z = charge.value(gamma, q)
    if z.is_zero():
        raise GenericityError(f"central charge of {gamma} vanishes at {q}")
    gx, gy = charge.gradient(gamma)
    det = gx.re * gy.im - gx.im * gy.re
    if det == 0:
        raise GenericityError(f"degenerate charge gradient for {gamma}")
    vx = (gy.im * z.re - gy.re * z.im) / det
    vy = (-gx.im * z.re + gx.re * z.im) / det
    return _primitive_int_vector(vx, vy)


@dataclass(frozen=True)
class Wall:
    """A line or ray carrying a relative class and a slab function."""

    base: Point
    direction: Tuple[int, int]
    slab: SlabFunction
    kind: str = "ray"  # "ray" | "line"

    def __post_init__(self):
        object.__setattr__(self, "base", _point(self.base))
        if self.kind not in ("ray", "line"):
            raise ScatteringError(f"unknown wall kind {self.kind!r}")
        if self.direction == (0, 0):
            raise ScatteringError("wall direction must be nonzero")

    @property
    def charge_class(self) -> Class:
        return self.slab.direction

    def contains(self, p: Point) -> bool:
        dx, dy = p[0] - self.base[0], p[1] - self.base[1]
        vx, vy = self.direction
        if dx * vy != dy * vx:
            return False
        if self.kind == "line":
            return True
        t = dx / vx if vx else dy / vy
        return t >= 0

    def half_directions(self, p: Point) -> List[Tuple[int, int]]:
        """Directions pointing away from an interior/base point p."""
        v = self.direction
        if self.kind == "line":
            return [v, (-v[0], -v[1])]
        if p == self.base:
            return [v]
        return [v, (-v[0], -v[1])]


def validate_wall(wall: Wall, charge: CentralCharge, samples: int = 3) -> None:
    """Check constant phase and monotone modulus along the support.

    Lines through a vanishing point of Z are checked on each half ray.
    """
    gamma = wall.charge_class
    v = GaussianRational(wall.direction[0], wall.direction[1])

    def probe(ts):
        pts = [
            (wall.base[0] + t * wall.direction[0], wall.base[1] + t * wall.direction[1])
            for t in ts
        ]
        zs = [charge.value(gamma, p) for p in pts]
        for z1, z2 in zip(zs, zs[1:]):
            if z1.is_zero() or z2.is_zero():
                continue
            if z1.cross(z2) != 0 or z1.dot(z2) <= 0:
                raise ScatteringError(
                    f"phase of Z_{gamma} not constant along wall at {wall.base}"
                )
        norms = [z.norm2() for z in zs]
        if any(a >= b for a, b in zip(norms, norms[1:])):
            raise ScatteringError(
                f"|Z_{gamma}| not increasing along wall direction at {wall.base}"
            )

    ts = [Fraction(k) for k in range(samples)]
    if charge.value(gamma, wall.base).is_zero():
        probe([t for t in ts])
        if wall.kind == "line":
            probe([-t for t in ts])
    else:
        probe(ts)
        if wall.kind == "line":
            # On the far half the modulus decreases toward the zero of Z
            # and increases beyond it; only phase constancy is checked.
            pts = [
                (wall.base[0] - t * wall.direction[0], wall.base[1] - t * wall.direction[1])
                for t in ts
            ]
            zs = [charge.value(gamma, p) for p in pts if not charge.value(gamma, p).is_zero()]
            for z1, z2 in zip(zs, zs[1:]):
                if z1.cross(z2) != 0:
                    raise ScatteringError(
                        f"phase of Z_{gamma} not constant along wall at {wall.base}"
                    )


@dataclass(frozen=True)
class LoopProbe:
    """A small counterclockwise circle used to test local consistency."""

    center: Point
    radius: Fraction = Fraction(1, 1024)

    def __post_init__(self):
        object.__setattr__(self, "center", _point(self.center))
        if self.radius <= 0:
            raise ScatteringError("probe radius must be positive")


@dataclass
class ScatteringDiagram:
    """Walls over a shared truncation context."""

    context: SeriesContext
    walls: List[Wall] = field(default_factory=list)
    sign_convention: str = "plus"

    @property
    def charge(self) -> CentralCharge:
        if self.context.charge is None:
            raise ScatteringError("diagram context has no central charge")
        return self.context.charge

    def add_initial_line(self, singular_point, gamma, direction, power: int = 1) -> Wall:
        """Initial wall: a full line through a zero of Z_gamma, along the
        declared invariant direction of the singularity, carrying the slab
        (1 + z^gamma)^power."""
        p = _point(singular_point)
        gamma = self.context.lattice.check_class(gamma)
        slab = SlabFunction(
            gamma, (1 + TruncatedSeries.monomial(self.context, gamma)).int_pow(power)
        )
        wall = Wall(base=p, direction=tuple(direction), slab=slab, kind="line")
        validate_wall(wall, self.charge)
        self.walls.append(wall)
        return wall

    def add_wall(self, wall: Wall, validate: bool = True) -> Wall:
        if validate:
            validate_wall(wall, self.charge)
        self.walls.append(wall)
        return wall

    # -- geometry ------------------------------------------------------

    def walls_through(self, p: Point) -> List[Wall]:
        return [w for w in self.walls if w.contains(p)]

    def crossing_points(self) -> List[Point]:
        """All pairwise support intersections, deduplicated and sorted."""
        pts = set()
        for i, a in enumerate(self.walls):
            for b in self.walls[i + 1:]:
                p = _intersect(a, b)
                if p is not None:
                    pts.add(p)
        # Zeroes of the central charge on a wall are singular, not crossings.
        out = []
        for p in sorted(pts):
            if any(
                self.charge.value(w.charge_class, p).is_zero()
                for w in self.walls_through(p)
            ):
                continue
            out.append(p)
        return out

    # -- consistency ---------------------------------------------------

    def loop_product(self, probe: LoopProbe) -> Automorphism:
        """Path-ordered product of crossed transforms around the probe.

        Factors are applied in counterclockwise crossing order starting
        just above the positive horizontal direction; the exponent is the
        sign of det(probe tangent, natural wall tangent), which is -1 on
        the modulus-increasing (outgoing) side and +1 on the incoming one.
        """
        c = probe.center
        crossings = []  # (sort key, automorphism exponent, wall)
        for wall in self.walls:
            if wall.contains(c):
                z = self.charge.value(wall.charge_class, c)
                if z.is_zero():
                    raise GenericityError(
                        f"charge of {wall.charge_class} vanishes at the probe center"
                    )
                grow = constant_phase_direction(self.charge, wall.charge_class, c)
                for h in wall.half_directions(c):
                    outgoing = (h == grow)
                    if not outgoing and h != (-grow[0], -grow[1]):
                        raise ScatteringError(
                            f"wall tangent {h} is not the constant-phase line at {c}"
                        )
                    eps = -1 if outgoing else 1
                    crossings.append(
                        (phase_sort_key(GaussianRational(h[0], h[1])), eps, wall)
                    )
            else:
                if _distance2_to_support(wall, c) < probe.radius * probe.radius:
                    raise ScatteringError(
                        "probe circle meets a wall missing its center; shrink the radius"
                    )
        crossings.sort(key=lambda item: item[0])
        keys = [k for k, _, _ in crossings]
        if len(set(keys)) != len(keys):
            raise GenericityError(f"multiple walls share a tangent at {c}")
        out = Automorphism.identity(self.context)
        probe_ctx = self.context.rebased(c) if self.context.point is not None else self.context
        for _, eps, wall in crossings:
            aut = elementary(wall.slab, self.sign_convention)
            if eps < 0:
                aut = aut.inverse()
            if probe_ctx is not self.context:
                aut = aut.transport(self.context)
            out = aut.compose(out)
        return out

    def is_consistent(self) -> bool:
        return all(
            self.loop_product(LoopProbe(p)).is_identity()
            for p in self.crossing_points()
        )

    def complete(self, max_rounds: Optional[int] = None) -> "ScatteringDiagram":
        """Insert outgoing correction rays until every crossing is
        consistent to the truncation order.  Deterministic and idempotent."""
        s = _sign_value(self.sign_convention)
        if max_rounds is None:
            max_rounds = self.context.nilpotency_order() + 2
        for _ in range(max_rounds):
            changed = False
            for p in self.crossing_points():
                changed |= self._settle_crossing(p, s)
            if not changed:
                return self
        raise ScatteringError("completion did not stabilize")

    def _settle_crossing(self, p: Point, s: int) -> bool:
        lat = self.context.lattice
        changed = False
        for _ in range(self.context.nilpotency_order() + 1):
            P = self.loop_product(LoopProbe(p))
            if P.is_identity():
                return changed
            L1, L2 = P.log_twists()
            level = min(
                sum(g) for L in (L1, L2) for g in L.terms
            )
            corrections: Dict[Tuple[Class, int], Fraction] = {}
            for k, L in enumerate((L1, L2)):
                for g, coeff in L.terms.items():
                    if sum(g) != level:
                        continue
                    prim, mult = lat.primitive_part(g)
                    b1, b2 = lat.boundary(prim)
                    n = (s * b2, -s * b1)[k]
                    if n == 0:
                        continue
                    # A new outgoing ray is crossed once with exponent -1,
                    # so its log enters the loop product negated.
                    ell = coeff / n
                    key = (prim, mult)
                    if key in corrections and corrections[key] != ell:
                        raise ScatteringError(
                            f"inconsistent residual components at {g}"
                        )
                    corrections[key] = ell
            if not corrections:
                raise GenericityError(
                    f"residual at {p} cannot be absorbed by any outgoing ray"
                )
            for (prim, mult), ell in sorted(corrections.items()):
                self._add_correction(p, prim, mult, ell)
            changed = True
        raise ScatteringError(f"crossing at {p} did not settle")

    def _add_correction(self, p: Point, prim: Class, mult: int, ell: Fraction):
        lat = self.context.lattice
        direction = constant_phase_direction(self.charge, prim, p)
        delta = TruncatedSeries.monomial(self.context, lat.scale(mult, prim), ell)
        for i, w in enumerate(self.walls):
            if w.kind == "ray" and w.base == p and w.charge_class == prim:
                body = w.slab.series.log1p_of() + delta
                new_slab = SlabFunction(prim, body.exp_of())
                self.walls[i] = replace(w, slab=new_slab)
                return
        slab = SlabFunction(prim, delta.exp_of())
        self.walls.append(Wall(base=p, direction=direction, slab=slab, kind="ray"))

    # -- products and jumps --------------------------------------------

    def theta_at(self, u) -> Automorphism:
        """Phase-ordered product of every wall transform, ordered by the
        phase of its class at the chart point u (highest phase acts first)."""
        u = _point(u)
        ctx = self.context.rebased(u) if self.context.point is not None else self.context
        prod = OrderedProduct(ctx, self.sign_convention)
        merged: Dict[Class, TruncatedSeries] = {}
        for w in self.walls:
            g = w.charge_class
            body = w.slab.series.log1p_of()
            merged[g] = merged.get(g, TruncatedSeries.zero(self.context)) + body
        for g in sorted(merged):
            series = merged[g].truncated(ctx).exp_of()
            if not (series - 1).is_zero():
                prod.insert(SlabFunction(g, series))
        return prod.evaluate().transport(self.context)


def _intersect(a: Wall, b: Wall) -> Optional[Point]:
    (ax, ay), (avx, avy) = a.base, a.direction
    (bx, by), (bvx, bvy) = b.base, b.direction
    det = avx * bvy - avy * bvx
    if det == 0:
        return None
    dx, dy = bx - ax, by - ay
    ta = Fraction(dx * bvy - dy * bvx, det)
    tb = Fraction(dx * avy - dy * avx, det)
    if a.kind == "ray" and ta < 0:
        return None
    if b.kind == "ray" and tb < 0:
        return None
    return (ax + ta * avx, ay + ta * avy)


def _distance2_to_support(wall: Wall, p: Point) -> Fraction:
    vx, vy = wall.direction
    dx, dy = p[0] - wall.base[0], p[1] - wall.base[1]
    n2 = Fraction(vx * vx + vy * vy)
    t = (dx * vx + dy * vy) / n2
    if wall.kind == "ray" and t < 0:
        t = Fraction(0)
    ex, ey = dx - t * vx, dy - t * vy
    return ex * ex + ey * ey


def candidate_rays(context: SeriesContext) -> List[Class]:
    """Primitive classes with nonzero boundary inside the truncation."""
    lat = context.lattice
    out = []

    def rec(i, acc):
        if i == lat.rank:
            if any(acc) and lat.content(acc) == 1 and lat.boundary(acc) != (0, 0):
                out.append(tuple(acc))
            return
        bound = context.max_degree if context.max_degree is not None else context.nilpotency_order()
        for c in range(0, bound + 1 - sum(acc)):
            rec(i + 1, acc + [c])

    rec(0, [])
    return sorted(out)


def jump(
    before: OrderedProduct,
    after: OrderedProduct,
    gamma: Class,
    rays: Optional[Sequence[Class]] = None,
) -> Fraction:
    """Difference of weighted disc counts at a class across a wall.

    Both products are factorized over a common admissible ray set and the
    slab-derived counts at gamma are subtracted (after minus before).
    """
    ctx = before.context
    if after.context != ctx:
        raise ScatteringError("jump sides live over different contexts")
    lat = ctx.lattice
    gamma = lat.check_class(gamma)
    prim, mult = lat.primitive_part(gamma)
    if rays is None:
        rays = candidate_rays(ctx)

    def count(prod: OrderedProduct) -> Fraction:
        slabs = factorize(prod.evaluate(), rays, prod.sign_convention)
        slab = slabs.get(prim)
        if slab is None:
            return Fraction(0)
        return counts_from_slab(slab).get(mult, Fraction(0))

    return count(after) - count(before)


def aut_weight(w: Sequence[Sequence[int]], charges: Sequence[GaussianRational]) -> int:
    """Symmetry factor of a weight-vector collection.

    w is one ascending tuple of positive integers per charge; the factor is
    the product over i and over values n of (multiplicity of n in w_i)!
    times, for each ray of the plane, (number of charges on that ray)!.
    """
    from math import factorial

    if len(w) != len(charges):
        raise ValueError("one weight vector per charge required")
    total = 1
    for wi in w:
        if list(wi) != sorted(wi) or any(x < 1 for x in wi):
            raise ValueError(f"weight vector {wi} must be ascending and positive")
        counts: Dict[int, int] = {}
        for n in wi:
            counts[n] = counts.get(n, 0) + 1
        for a in counts.values():
            total *= factorial(a)
    rays: Dict[tuple, int] = {}
    for z in charges:
        if z.is_zero():
            raise ValueError("charges on a ray must be nonzero")
        rays[phase_sort_key(z)] = rays.get(phase_sort_key(z), 0) + 1
    for b in rays.values():
        total *= factorial(b)
    return total
