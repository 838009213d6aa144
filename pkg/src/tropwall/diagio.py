"""Strict line-based text format for diagram inputs and outputs.

Input grammar (one directive per line, '#' starts a comment):

    lattice <rank>
    boundary <row1> <row2>          rows are comma-separated integers
    singularity <x> <y> class=<c1,...> direction=<dx,dy> [cut=<dx,dy>]
    order <N>
    energy <lambda>

Coordinates and the energy bound accept rationals written as p/q.  The
i-th singularity must carry the i-th generator class: the central charge
of generator i is the holomorphic form (u1 - x_i) + i (u2 - y_i) centered
at that singularity, so each generator needs exactly one center.

Parse errors carry 1-based line and column numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .gaussian import GaussianRational
from .lattice import CentralCharge, ChargeLattice
from .scattering import ScatteringDiagram
from .tropical import SingularBase, Singularity


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


@dataclass
class DiagramSpec:
    """Parsed form of a diagram file, before geometric validation."""

    rank: Optional[int] = None
    boundary: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]] = None
    singularities: List[Singularity] = field(default_factory=list)
    order: Optional[int] = None
    energy: Optional[Fraction] = None

    def build_base(self) -> SingularBase:
        if self.rank is None or self.boundary is None:
            raise ParseError(1, 1, "missing lattice/boundary block")
        lattice = ChargeLattice(rank=self.rank, boundary_map=self.boundary)
        if self.singularities:
            if len(self.singularities) != self.rank:
                raise ParseError(
                    1, 1,
                    f"need exactly {self.rank} singularities to determine the "
                    f"central charge, got {len(self.singularities)}",
                )
            for i, s in enumerate(self.singularities):
                if s.thimble_class != lattice.generator(i):
                    raise ParseError(
                        1, 1,
                        f"singularity {i} must carry generator class "
                        f"{lattice.generator(i)}, got {s.thimble_class}",
                    )
            centers = [s.position for s in self.singularities]
        else:
            # Empty diagram: deterministic centers keep the charge defined.
            centers = [(Fraction(i + 1), Fraction(0)) for i in range(self.rank)]
        base = tuple(GaussianRational(-p[0], -p[1]) for p in centers)
        charge = CentralCharge(
            lattice=lattice,
            base=base,
            grad_x=tuple(GaussianRational(1) for _ in centers),
            grad_y=tuple(GaussianRational(0, 1) for _ in centers),
        )
        return SingularBase(lattice, charge, list(self.singularities))

    def build_diagram(self, default_order: int = 6,
                      sign_convention: str = "plus") -> ScatteringDiagram:
        order = self.order if self.order is not None else default_order
        return self.build_base().diagram(order, sign_convention)


def _fraction(tok: str, line: int, col: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(line, col, f"expected a rational number, got {tok!r}")


def _int_csv(tok: str, line: int, col: int) -> Tuple[int, ...]:
    out = []
    for piece in tok.split(","):
        try:
            out.append(int(piece))
        except ValueError:
            raise ParseError(line, col, f"expected comma-separated integers, got {tok!r}")
    return tuple(out)


def _tokens_with_columns(text: str):
    col = 1
    for tok in text.split(" "):
        if tok:
            yield tok, col
        col += len(tok) + 1


def parse_diagram(text: str) -> DiagramSpec:
    spec = DiagramSpec()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        toks = list(_tokens_with_columns(line))
        key, kcol = toks[0]
        args = toks[1:]
        if key == "lattice":
            if len(args) != 1:
                raise ParseError(lineno, kcol, "lattice takes one argument: the rank")
            tok, col = args[0]
            try:
                spec.rank = int(tok)
            except ValueError:
                raise ParseError(lineno, col, f"rank must be an integer, got {tok!r}")
            if spec.rank < 1:
                raise ParseError(lineno, col, "rank must be positive")
        elif key == "boundary":
            if len(args) != 2:
                raise ParseError(lineno, kcol, "boundary takes two integer rows")
            rows = tuple(_int_csv(t, lineno, c) for t, c in args)
            if spec.rank is not None and any(len(r) != spec.rank for r in rows):
                raise ParseError(lineno, args[0][1],
                                 f"boundary rows must have {spec.rank} entries")
            spec.boundary = rows
        elif key == "singularity":
            if len(args) < 4:
                raise ParseError(
                    lineno, kcol,
                    "singularity needs: x y class=... direction=...",
                )
            x = _fraction(args[0][0], lineno, args[0][1])
            y = _fraction(args[1][0], lineno, args[1][1])
            cls = direction = cut = None
            for tok, col in args[2:]:
                if "=" not in tok:
                    raise ParseError(lineno, col, f"expected key=value, got {tok!r}")
                k, v = tok.split("=", 1)
                if k == "class":
                    cls = _int_csv(v, lineno, col + len(k) + 1)
                elif k == "direction":
                    direction = _int_csv(v, lineno, col + len(k) + 1)
                elif k == "cut":
                    cut = _int_csv(v, lineno, col + len(k) + 1)
                else:
                    raise ParseError(lineno, col, f"unknown singularity field {k!r}")
            if cls is None or direction is None:
                raise ParseError(lineno, kcol,
                                 "singularity needs both class= and direction=")
            if len(direction) != 2 or (cut is not None and len(cut) != 2):
                raise ParseError(lineno, kcol, "directions live in the plane: two entries")
            spec.singularities.append(Singularity((x, y), cls, direction, cut))
        elif key == "order":
            tok, col = args[0] if args else ("", kcol)
            try:
                spec.order = int(tok)
            except ValueError:
                raise ParseError(lineno, col, f"order must be an integer, got {tok!r}")
            if spec.order < 1:
                raise ParseError(lineno, col, "order must be at least 1")
        elif key == "energy":
            tok, col = args[0] if args else ("", kcol)
            spec.energy = _fraction(tok, lineno, col)
            if spec.energy <= 0:
                raise ParseError(lineno, col, "energy bound must be positive")
        else:
            raise ParseError(lineno, kcol, f"unknown directive {key!r}")
    return spec


def load_diagram(path: str) -> DiagramSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_diagram(fh.read())


def _coords(values) -> str:
    return ",".join(str(x) for x in values)


def _series_cell(series) -> str:
    bits = []
    for g in sorted(series.terms, key=lambda g: (sum(g), g)):
        c = series.terms[g]
        bits.append(f"{_coords(g)}:{c.numerator}/{c.denominator}")
    return ";".join(bits) if bits else "0"


def dump_walls(diagram: ScatteringDiagram) -> str:
    """Deterministic delimited table of every wall and its slab."""
    rows = []
    for w in diagram.walls:
        rows.append(
            (
                sum(w.charge_class),
                w.charge_class,
                tuple(w.base),
                w.kind,
                w.direction,
                _series_cell(w.slab.series),
            )
        )
    rows.sort()
    lines = ["kind\tbase\tdirection\tclass\tslab"]
    for _, cls, base, kind, direction, slab in rows:
        lines.append(
            f"{kind}\t{_coords(base)}\t{_coords(direction)}\t{_coords(cls)}\t{slab}"
        )
    return "\n".join(lines) + "\n"
