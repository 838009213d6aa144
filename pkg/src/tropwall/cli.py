"""Command-line front end.

Subcommands:

    tropwall complete INPUT    complete the diagram, print the wall table
    tropwall enumerate INPUT   list tropical discs and the weighted count
    tropwall invariants INPUT  integer-invariant TSV for the completed diagram

Exit codes: 0 success, 1 input/usage errors (with line and column for
diagram files), 2 genericity or consistency failures, 3 probe point on a
wall (the constituent decomposition is printed).

With --out DIR the delimited tables are written into DIR together with an
SVG rendering of the diagram; output bytes are identical across runs and
thread counts.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .autom import AutomError
from .diagio import DiagramSpec, ParseError, dump_walls, load_diagram
from .dt import InvariantTable, integrality_report, quadratic_refinement
from .gaussian import GaussianRational
from .lattice import GenericityError, LatticeError, Sector
from .qtorus import refined_omega
from .scattering import ScatteringDiagram, ScatteringError
from .series import SeriesContext, set_threads
from .tropical import WallMembershipError, enumerate_discs, omega_trop


@dataclass
class RunConfig:
    input_path: str
    command: str
    order: Optional[int] = None
    energy: Optional[Fraction] = None
    sector: Optional[Sector] = None
    refined: bool = False
    out_dir: Optional[str] = None
    svg_path: Optional[str] = None
    sign_convention: str = "plus"

    def __post_init__(self):
        if self.order is not None and self.order < 1:
            raise ValueError("order must be at least 1")
        if self.energy is not None and self.energy <= 0:
            raise ValueError("energy bound must be positive")


DEFAULT_ORDER = 6


def _fraction_pair(text: str) -> Tuple[Fraction, Fraction]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected x,y — got {text!r}")
    return Fraction(parts[0]), Fraction(parts[1])


def _parse_sector(text: str) -> Sector:
    lo_txt, _, hi_txt = text.partition(":")
    if not hi_txt:
        raise ValueError(f"expected lox,loy:hix,hiy — got {text!r}")
    lo = _fraction_pair(lo_txt)
    hi = _fraction_pair(hi_txt)
    return Sector(GaussianRational(*lo), GaussianRational(*hi))


def _build_diagram(spec: DiagramSpec, config: RunConfig) -> ScatteringDiagram:
    base = spec.build_base()
    order = config.order if config.order is not None else spec.order
    if order is None:
        order = DEFAULT_ORDER
    energy = config.energy if config.energy is not None else spec.energy
    from .tropical import _generic_reference_point

    ctx = SeriesContext(
        lattice=base.lattice,
        charge=base.charge,
        point=_generic_reference_point(base),
        energy_cutoff=energy,
        max_degree=order,
    )
    diagram = ScatteringDiagram(context=ctx, sign_convention=config.sign_convention)
    for s in base.singularities:
        diagram.add_initial_line(s.position, s.thimble_class, s.invariant_direction)
    return diagram


def _in_sector(diagram: ScatteringDiagram, wall, sector: Optional[Sector]) -> bool:
    if sector is None:
        return True
    z = diagram.context.charge.value(wall.charge_class, diagram.context.point)
    return sector.contains(z)


def _emit(text: str, config: RunConfig, filename: str) -> None:
    sys.stdout.write(text)
    if config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
        path = os.path.join(config.out_dir, filename)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _render(diagram: ScatteringDiagram, config: RunConfig) -> None:
    targets = []
    if config.svg_path:
        targets.append(config.svg_path)
    if config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
        targets.append(os.path.join(config.out_dir, "diagram.svg"))
    if not targets:
        return
    from .render import render_svg

    for path in targets:
        render_svg(diagram, path)


def cmd_complete(spec: DiagramSpec, config: RunConfig) -> int:
    diagram = _build_diagram(spec, config).complete()
    keep = ScatteringDiagram(
        context=diagram.context, sign_convention=diagram.sign_convention
    )
    keep.walls = [w for w in diagram.walls if _in_sector(diagram, w, config.sector)]
    _emit(dump_walls(keep), config, "walls.tsv")
    _render(keep, config)
    return 0 if diagram.is_consistent() else 2


def cmd_enumerate(spec: DiagramSpec, config: RunConfig, at, cls) -> int:
    base = spec.build_base()
    energy = config.energy if config.energy is not None else spec.energy
    if energy is None:
        raise ValueError("enumerate needs an energy bound (--energy or file)")
    lines = []
    discs = enumerate_discs(base, at, cls, energy)
    for disc in discs:
        lines.append(disc.render_tree())
    count = omega_trop(base, at, cls, energy)
    lines.append(f"omega_trop\t{count.numerator}/{count.denominator}")
    if config.refined:
        ref = refined_omega(base, at, cls, energy)
        lines.append(f"refined_omega\t{ref.num.serialize()}|{ref.den.serialize()}")
    _emit("\n".join(lines) + "\n", config, "discs.txt")
    return 0


def cmd_invariants(spec: DiagramSpec, config: RunConfig) -> int:
    diagram = _build_diagram(spec, config).complete()
    walls = [w for w in diagram.walls if _in_sector(diagram, w, config.sector)]
    slabs = [w.slab for w in walls]
    chambers = [f"{w.kind}@{','.join(str(x) for x in w.base)}" for w in walls]
    table = InvariantTable.from_slabs(slabs, chambers)
    report = integrality_report(table)
    lat = diagram.context.lattice
    reality_ok = all(
        quadratic_refinement(lat, r.charge)
        == quadratic_refinement(lat, lat.neg(r.charge))
        for r in table.rows
    )
    lines = [table.to_tsv(), ""]
    lines.append(f"# reality: {'ok' if reality_ok else 'violated'}")
    if report.all_integral:
        lines.append("# integrality: ok")
    else:
        lines.append(f"# integrality: {len(report.non_integral)} fractional rows")
    for prim in sorted(report.max_support):
        coords = ",".join(str(x) for x in prim)
        lines.append(f"# max-support {coords}: {report.max_support[prim]}")
    _emit("\n".join(lines) + "\n", config, "invariants.tsv")
    _render(diagram, config)
    return 0


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tropwall",
        description="Exact scattering-diagram completion, tropical disc "
        "enumeration and integer invariants.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("input", help="diagram description file")
        sp.add_argument("--order", type=int, help="truncation order")
        sp.add_argument("--energy", type=Fraction, help="energy bound (rational)")
        sp.add_argument("--sector", help="phase sector lox,loy:hix,hiy")
        sp.add_argument(
            "--sign-convention", choices=("plus", "minus"), default="plus"
        )
        sp.add_argument("--svg", help="write an SVG rendering to this path")
        sp.add_argument("--out", help="directory for table + SVG artifacts")
        sp.add_argument("--threads", type=int, default=1)

    for name in ("complete", "enumerate", "invariants"):
        sp = sub.add_parser(name)
        common(sp)
        if name == "enumerate":
            sp.add_argument("--at", required=True, help="probe point x,y")
            sp.add_argument("--class", dest="cls", required=True,
                            help="charge class c1,c2,...")
            sp.add_argument("--refined", action="store_true",
                            help="also print the q-deformed count")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = RunConfig(
            input_path=args.input,
            command=args.command,
            order=args.order,
            energy=args.energy,
            sector=_parse_sector(args.sector) if args.sector else None,
            refined=getattr(args, "refined", False),
            out_dir=args.out,
            svg_path=args.svg,
            sign_convention=args.sign_convention,
        )
        set_threads(args.threads)
        spec = load_diagram(config.input_path)
        if args.command == "complete":
            return cmd_complete(spec, config)
        if args.command == "enumerate":
            at = _fraction_pair(args.at)
            cls = tuple(int(c) for c in args.cls.split(","))
            return cmd_enumerate(spec, config, at, cls)
        return cmd_invariants(spec, config)
    except WallMembershipError as e:
        decomposition = " ".join(
            ",".join(str(x) for x in g) for g in e.decomposition
        )
        print(f"error: probe point on a wall; constituents: {decomposition}",
              file=sys.stderr)
        return 3
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (GenericityError, LatticeError, ScatteringError, AutomError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
