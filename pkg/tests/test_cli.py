"""Diagram file parsing and the command-line pipelines."""

import contextlib
import io
import os
from fractions import Fraction

import pytest

from tropwall.cli import main
from tropwall.diagio import ParseError, dump_walls, parse_diagram

DIAGRAMS = os.path.join(os.path.dirname(__file__), "..", "diagrams")
PENTAGON = os.path.join(DIAGRAMS, "pentagon.diagram")
FOCUS = os.path.join(DIAGRAMS, "focus_focus.diagram")
THREE = os.path.join(DIAGRAMS, "three_singularity.diagram")


def run(args):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        rc = main(args)
    return rc, out.getvalue(), err.getvalue()


def test_parse_pentagon_file():
    with open(PENTAGON, encoding="utf-8") as fh:
        spec = parse_diagram(fh.read())
    assert spec.rank == 2
    assert spec.boundary == ((1, 0), (0, 1))
    assert spec.order == 8 and spec.energy == 20
    assert len(spec.singularities) == 2
    assert spec.singularities[0].position == (Fraction(-1), Fraction(0))
    base = spec.build_base()
    assert base.lattice.rank == 2


def test_parse_errors_carry_location():
    with pytest.raises(ParseError) as err:
        parse_diagram("lattice 2\nboundary 1,0 0,x\n")
    assert err.value.line == 2 and err.value.column == 14
    with pytest.raises(ParseError) as err:
        parse_diagram("lattice 2\nwibble 3\n")
    assert err.value.line == 2 and err.value.column == 1
    with pytest.raises(ParseError):
        parse_diagram("lattice 2\nboundary 1,0 0,1\nsingularity 0 0 class=1,0\n")


def test_complete_pentagon_inserts_one_ray(tmp_path):
    rc, out, _ = run(["complete", PENTAGON, "--order", "6"])
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "kind\tbase\tdirection\tclass\tslab"
    assert len(lines) == 4
    assert "ray\t0,0\t1,1\t1,1\t0,0:1/1;1,1:1/1" in lines


def test_complete_empty_diagram(tmp_path):
    p = tmp_path / "empty.diagram"
    p.write_text("lattice 1\nboundary 1 0\norder 4\n")
    rc, out, _ = run(["complete", str(p)])
    assert rc == 0
    assert out.strip() == "kind\tbase\tdirection\tclass\tslab"


def test_malformed_file_exits_1(tmp_path):
    p = tmp_path / "bad.diagram"
    p.write_text("lattice two\n")
    rc, _, err = run(["complete", str(p)])
    assert rc == 1
    assert "line 1" in err and "column" in err


def test_missing_file_exits_1(tmp_path):
    rc, _, err = run(["complete", str(tmp_path / "nope.diagram")])
    assert rc == 1


def test_enumerate_focus_focus():
    rc, out, _ = run(["enumerate", FOCUS, "--at", "2,0", "--class", "1"])
    assert rc == 0
    assert "omega_trop\t1/1" in out
    assert "initial" in out


def test_enumerate_pentagon_bound_state_refined():
    rc, out, _ = run(
        ["enumerate", PENTAGON, "--at", "2,2", "--class", "1,1", "--refined"]
    )
    assert rc == 0
    assert "omega_trop\t1/1" in out
    assert "refined_omega\t0/2:1/1|0/2:1/1" in out


def test_enumerate_on_wall_exits_3():
    rc, _, err = run(["enumerate", PENTAGON, "--at", "0,0", "--class", "1,1"])
    assert rc == 3
    assert "1,0" in err and "0,1" in err


def test_invariants_focus_focus():
    rc, out, _ = run(["invariants", FOCUS, "--order", "4"])
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "charge\tchamber\tomega_tilde\tomega\tintegral"
    assert lines[1].startswith("1\t") and lines[1].endswith("1/1\t1/1\t1")
    assert "# reality: ok" in out and "# integrality: ok" in out


def test_invariants_pentagon_all_unit():
    rc, out, _ = run(["invariants", PENTAGON, "--order", "4"])
    assert rc == 0
    unit_rows = [
        l for l in out.splitlines() if l.endswith("\t1/1\t1/1\t1")
    ]
    assert len(unit_rows) == 3  # one per wall, each with Omega = 1


def test_sector_filter_drops_walls():
    # Sector hugging the positive x-axis keeps only the horizontal wall.
    rc, out, _ = run(
        ["complete", PENTAGON, "--order", "4", "--sector", "1,-1:5,1"]
    )
    assert rc == 0
    body = out.strip().splitlines()[1:]
    assert len(body) == 1 and body[0].startswith("line\t-1,0\t1,0\t1,0")


def test_outputs_are_deterministic(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    rc1, o1, _ = run(["complete", THREE, "--out", str(d1), "--threads", "1"])
    rc2, o2, _ = run(["complete", THREE, "--out", str(d2), "--threads", "4"])
    assert rc1 == rc2 == 0
    assert o1 == o2
    for name in ("walls.tsv", "diagram.svg"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
    assert (d1 / "walls.tsv").read_text() == o1
