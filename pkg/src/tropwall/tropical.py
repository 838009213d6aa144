"""Singular affine base, monodromy, and tropical disc enumeration.

A disc is a rooted tree of constant-phase segments.  Leaves sit at
focus-focus singular points; every internal vertex is trivalent and joins
two sub-discs whose classes have nonzero pairing; the root is the chart
point being probed.  Enumeration is recursive: a disc type is either an
initial ray from a singularity (with a cover degree) or the joint of two
previously built types at the intersection of their stop rays, and the
whole tree is rigid once the type is fixed, so counting reduces to listing
types whose final ray passes through the probe point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .gaussian import GaussianRational
from .lattice import CentralCharge, ChargeLattice, Class, GenericityError, LatticeError, _positive_cone_bound
from .scattering import (
    ScatteringDiagram,
    ScatteringError,
    constant_phase_direction,
)
from .series import SeriesContext, SlabFunction, TruncatedSeries, counts_from_slab

Point = Tuple[Fraction, Fraction]
IntVec = Tuple[int, int]


class WallMembershipError(RuntimeError):
    """The probe point sits exactly on a counting wall.

    Carries the offending vertex decomposition so callers can report which
    bound state degenerates there.
    """

    def __init__(self, point: Point, decomposition):
        self.point = point
        self.decomposition = decomposition
        super().__init__(
            f"probe point {point} lies on a wall: decomposition {decomposition}"
        )


@dataclass(frozen=True)
class Singularity:
    position: Point
    thimble_class: Class
    invariant_direction: IntVec
    branch_cut: Optional[IntVec] = None  # defaults to the invariant ray

    def cut_direction(self) -> IntVec:
        return self.branch_cut if self.branch_cut is not None else self.invariant_direction


@dataclass
class SingularBase:
    """A flat chart with focus-focus singular points."""

    lattice: ChargeLattice
    charge: CentralCharge
    singularities: List[Singularity]

    def __post_init__(self):
        for s in self.singularities:
            if not self.charge.value(s.thimble_class, s.position).is_zero():
                raise LatticeError(
                    f"thimble charge does not vanish at {s.position}"
                )

    def diagram(self, order: int, sign_convention: str = "plus") -> ScatteringDiagram:
        """Initial scattering diagram with one line per singularity."""
        ref = _generic_reference_point(self)
        ctx = SeriesContext(
            lattice=self.lattice, charge=self.charge, point=ref, max_degree=order
        )
        d = ScatteringDiagram(context=ctx, sign_convention=sign_convention)
        for s in self.singularities:
            d.add_initial_line(s.position, s.thimble_class, s.invariant_direction)
        return d


def _generic_reference_point(base: SingularBase) -> Point:
    """A chart point where no generator charge vanishes."""
    for k in range(1, 50):
        p = (Fraction(k * k + 1, 7), Fraction(k, 11))
        if all(
            not base.charge.value(base.lattice.generator(i), p).is_zero()
            for i in range(base.lattice.rank)
        ):
            return p
    raise GenericityError("no generic reference point found")


def monodromy_action(lattice: ChargeLattice, thimble: Class, gamma: Class, power: int = 1) -> Class:
    """gamma -> gamma - <thimble, gamma> * thimble, iterated power times."""
    g = lattice.check_class(gamma)
    for _ in range(abs(power)):
        w = lattice.pairing(thimble, g)
        if power > 0:
            g = lattice.add(g, lattice.scale(-w, thimble))
        else:
            g = lattice.add(g, lattice.scale(w, thimble))
    return g


def _segment_ray_crossing(p0: Point, p1: Point, base: Point, direction: IntVec):
    """Signed transversal crossing of segment p0->p1 with the open ray.

    Returns +1 / -1 for a crossing (sign of the segment direction against
    the cut direction) or None.
    """
    vx, vy = direction
    dx, dy = p1[0] - p0[0], p1[1] - p0[1]
    det = Fraction(vx) * dy - Fraction(vy) * dx
    if det == 0:
        return None, None
    ex, ey = p0[0] - base[0], p0[1] - base[1]
    s = (ex * dy - ey * dx) / det  # parameter along the ray
    t = (Fraction(vy) * ex - Fraction(vx) * ey) / det  # along the segment
    if s <= 0 or not (0 < t < 1):
        return None, None
    sign = 1 if det > 0 else -1
    return sign, t


def monodromy_transport(base: SingularBase, gamma: Class, path: Sequence) -> Class:
    """Transport a class along a chart path across branch cuts.

    Each signed cut crossing applies the focus-focus monodromy of that
    singularity; crossings are applied in path order.
    """
    lat = base.lattice
    g = lat.check_class(gamma)
    pts = [(Fraction(p[0]), Fraction(p[1])) for p in path]
    for p0, p1 in zip(pts, pts[1:]):
        hits = []
        for s in base.singularities:
            if _on_segment(s.position, p0, p1):
                raise GenericityError(f"path passes through the singular point {s.position}")
            sign, t = _segment_ray_crossing(p0, p1, s.position, s.cut_direction())
            if sign is not None:
                hits.append((t, sign, s))
        hits.sort(key=lambda h: h[0])
        for _, sign, s in hits:
            g = monodromy_action(lat, s.thimble_class, g, power=sign)
    return g


def _on_segment(q: Point, p0: Point, p1: Point) -> bool:
    dx, dy = p1[0] - p0[0], p1[1] - p0[1]
    ex, ey = q[0] - p0[0], q[1] - p0[1]
    if dx * ey - dy * ex != 0:
        return False
    dot = ex * dx + ey * dy
    return 0 <= dot <= dx * dx + dy * dy


def vertex_multiplicity(w1: int, v1: IntVec, w2: int, v2: IntVec) -> int:
    """w1 * w2 * |det(v1, v2)| at a transverse trivalent vertex."""
    det = v1[0] * v2[1] - v1[1] * v2[0]
    if det == 0:
        raise GenericityError("parallel edge directions at a trivalent vertex")
    return w1 * w2 * abs(det)


@dataclass(frozen=True)
class TropicalDisc:
    """A rigid disc type: the tree with its final (stop) ray.

    children is empty for an initial disc (then singularity_index and
    cover_degree are set) and holds the two joined sub-types otherwise.
    """

    charge_class: Class
    vertex: Point              # start of the stop ray
    momentum: IntVec           # weight * direction of the stop ray
    children: Tuple["TropicalDisc", ...] = ()
    singularity_index: int = -1
    cover_degree: int = 0

    @property
    def weight(self) -> int:
        return gcd(abs(self.momentum[0]), abs(self.momentum[1]))

    @property
    def direction(self) -> IntVec:
        w = self.weight
        return (self.momentum[0] // w, self.momentum[1] // w)

    def stop_ray_contains(self, u: Point) -> Optional[Fraction]:
        """Ray parameter of u on the open stop ray, or None."""
        vx, vy = self.direction
        dx, dy = u[0] - self.vertex[0], u[1] - self.vertex[1]
        if dx * vy != dy * vx:
            return None
        t = dx / vx if vx else dy / vy
        return t if t > 0 else None

    def check_balancing(self):
        if self.children:
            m1, m2 = (c.momentum for c in self.children)
            assert (m1[0] + m2[0], m1[1] + m2[1]) == self.momentum

    def weight_factor(self) -> Fraction:
        """Product of leaf factors and vertex multiplicities of the tree."""
        if not self.children:
            d = self.cover_degree
            return Fraction((-1) ** (d - 1), d * d)
        a, b = self.children
        mult = vertex_multiplicity(a.weight, a.direction, b.weight, b.direction)
        return a.weight_factor() * b.weight_factor() * mult

    def type_key(self):
        if not self.children:
            return ("init", self.singularity_index, self.cover_degree)
        keys = sorted(c.type_key() for c in self.children)
        return ("joint", keys[0], keys[1])

    def render_tree(self, indent: int = 0) -> str:
        pad = "  " * indent
        head = (
            f"{pad}class={','.join(map(str, self.charge_class))}"
            f" vertex=({self.vertex[0]},{self.vertex[1]})"
            f" weight={self.weight} direction=({self.direction[0]},{self.direction[1]})"
        )
        if not self.children:
            head += f" initial(singularity={self.singularity_index}, cover={self.cover_degree})"
        lines = [head]
        for c in self.children:
            lines.append(c.render_tree(indent + 1))
        return "\n".join(lines)


def energy_degree_bound(base: SingularBase, u: Point, lam: Fraction) -> int:
    """Largest number of generator summands a class of energy < lam can have."""
    values = [
        base.charge.value(base.lattice.generator(i), u)
        for i in range(base.lattice.rank)
    ]
    if any(z.is_zero() for z in values):
        raise GenericityError("a generator charge vanishes at the probe point")
    bound = _positive_cone_bound(values)
    lam2 = Fraction(lam) * Fraction(lam)
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


def disc_types(base: SingularBase, max_degree: int) -> List[TropicalDisc]:
    """All rigid disc types with class degree up to the bound."""
    lat = base.lattice
    Z = base.charge
    types: List[TropicalDisc] = []
    seen = set()

    for i, s in enumerate(base.singularities):
        deg1 = sum(s.thimble_class)
        for d in range(1, max_degree // deg1 + 1):
            cls = lat.scale(d, s.thimble_class)
            v = s.invariant_direction
            t = TropicalDisc(
                charge_class=cls,
                vertex=s.position,
                momentum=(d * v[0], d * v[1]),
                singularity_index=i,
                cover_degree=d,
            )
            types.append(t)
            seen.add(t.type_key())

    frontier = list(types)
    while frontier:
        new: List[TropicalDisc] = []
        for a in types:
            for b in frontier:
                j = _join(base, a, b, max_degree)
                if j is not None and j.type_key() not in seen:
                    seen.add(j.type_key())
                    new.append(j)
        types.extend(new)
        frontier = new
    return types


def _join(
    base: SingularBase, a: TropicalDisc, b: TropicalDisc, max_degree: int
) -> Optional[TropicalDisc]:
    lat = base.lattice
    cls = lat.add(a.charge_class, b.charge_class)
    if sum(cls) > max_degree:
        return None
    w = lat.pairing(a.charge_class, b.charge_class)
    if w == 0:
        return None
    p = _ray_intersection(a, b)
    if p is None:
        return None
    za = base.charge.value(a.charge_class, p)
    zb = base.charge.value(b.charge_class, p)
    cross = za.cross(zb)
    if cross == 0:
        return None
    # Side condition: the children must approach the vertex from the
    # admissible side, Im(Z_a conj(Z_b)) / <a, b> < 0.
    if not ((cross > 0) == (w > 0)):
        return None
    m = (a.momentum[0] + b.momentum[0], a.momentum[1] + b.momentum[1])
    if m == (0, 0):
        return None
    joint = TropicalDisc(charge_class=cls, vertex=p, momentum=m, children=(a, b))
    expected = constant_phase_direction(base.charge, cls, p)
    if joint.direction != expected:
        raise ScatteringError(
            f"stop direction {joint.direction} of class {cls} at {p} "
            f"contradicts the constant-phase direction {expected}"
        )
    return joint


def _ray_intersection(a: TropicalDisc, b: TropicalDisc) -> Optional[Point]:
    (ax, ay), (avx, avy) = a.vertex, a.direction
    (bx, by), (bvx, bvy) = b.vertex, b.direction
    det = avx * bvy - avy * bvx
    if det == 0:
        return None
    dx, dy = bx - ax, by - ay
    ta = Fraction(dx * bvy - dy * bvx, det)
    tb = Fraction(dx * avy - dy * avx, det)
    if ta <= 0 or tb <= 0:
        return None
    return (ax + ta * avx, ay + ta * avy)


def enumerate_discs(
    base: SingularBase, u, gamma: Class, lam
) -> List[TropicalDisc]:
    """All generic discs of the given class ending at u with energy < lam."""
    u = (Fraction(u[0]), Fraction(u[1]))
    lat = base.lattice
    gamma = lat.check_class(gamma)
    z = base.charge.value(gamma, u)
    lam = Fraction(lam)
    if z.norm2() >= lam * lam:
        raise LatticeError(f"class {gamma} exceeds the energy cutoff at {u}")
    bound = energy_degree_bound(base, u, lam)
    out = []
    for t in disc_types(base, max(bound, sum(gamma))):
        if t.charge_class != gamma:
            continue
        if t.children and t.vertex == u:
            raise WallMembershipError(
                u, tuple(c.charge_class for c in t.children)
            )
        if t.stop_ray_contains(u) is not None:
            t.check_balancing()
            out.append(t)
    return out


def _is_direct_class(gamma: Class) -> bool:
    """Classes the generic enumeration counts exactly: single-generator
    multiples and multiplicity-free combinations."""
    nonzero = [c for c in gamma if c]
    if len(nonzero) == 1:
        return True
    return all(c <= 1 for c in gamma)


def omega_trop(base: SingularBase, u, gamma: Class, lam) -> Fraction:
    """Weighted tropical disc count of a class at a chart point.

    Multiplicity-free and pure-cover classes are enumerated directly; all
    other classes are extracted from the completed scattering diagram,
    whose factorization carries the contracted-edge corrections that
    generic enumeration cannot see.
    """
    u = (Fraction(u[0]), Fraction(u[1]))
    lat = base.lattice
    gamma = lat.check_class(gamma)
    if _is_direct_class(gamma):
        return sum(
            (t.weight_factor() for t in enumerate_discs(base, u, gamma, lam)),
            Fraction(0),
        )
    bound = max(energy_degree_bound(base, u, Fraction(lam)), sum(gamma))
    diagram = base.diagram(order=bound).complete()
    prim, mult = lat.primitive_part(gamma)
    for p in diagram.crossing_points():
        if p == u:
            raise WallMembershipError(u, ("crossing point",))
    total = Fraction(0)
    for w in diagram.walls:
        if w.charge_class == prim and w.contains(u):
            total += counts_from_slab(w.slab).get(mult, Fraction(0))
    return total
