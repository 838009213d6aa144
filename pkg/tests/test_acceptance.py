"""End-to-end acceptance checks, one test per headline property.

Each test prints a single [k/11] PASS/FAIL line (visible with pytest -s),
and the pytest verdict for the test carries the same information.
"""

import contextlib
import io
import os
import random
import time
from fractions import Fraction

import pytest

from corpus import (
    focus_focus_base,
    focus_focus_diagram,
    pentagon_base,
    pentagon_diagram,
    three_singularity_base,
    three_singularity_diagram,
)
from tropwall.autom import check_symplectic, elementary
from tropwall.cli import main as cli_main
from tropwall.dt import covers_to_dt, multiple_cover, quadratic_refinement, slab_to_dt
from tropwall.gaussian import rational_sqrt_upper
from tropwall.lattice import ChargeLattice
from tropwall.qtorus import (
    QLaurent,
    QuantumTorusSeries,
    apply_sequence,
    q_dilog,
    q_int,
    refined_omega,
)
from tropwall.scattering import LoopProbe, ScatteringDiagram
from tropwall.series import (
    SeriesContext,
    SlabFunction,
    TruncatedSeries,
    counts_from_slab,
    slab_from_counts,
)
from tropwall.tropical import omega_trop

DIAGRAMS = os.path.join(os.path.dirname(__file__), "..", "diagrams")
LAM = Fraction(20)


@contextlib.contextmanager
def criterion(k, name):
    try:
        yield
    except BaseException:
        print(f"[{k:2d}/11] {name}: FAIL")
        raise
    print(f"[{k:2d}/11] {name}: PASS")


def corpus_bases():
    return [focus_focus_base(), pentagon_base(), three_singularity_base()]


def corpus_diagrams(order):
    return [
        focus_focus_diagram(order),
        pentagon_diagram(order),
        pentagon_diagram(order, power=2),
        three_singularity_diagram(min(order, 4)),
    ]


def test_criterion_01_focus_focus_multiple_covers():
    with criterion(1, "focus-focus multiple covers"):
        base = focus_focus_base()
        t0 = time.perf_counter()
        for d in range(1, 9):
            got = omega_trop(base, (2, 0), (d,), LAM)
            assert got == Fraction((-1) ** (d - 1), d * d)
        assert time.perf_counter() - t0 < 1.0


def test_criterion_02_focus_focus_slab_normal_form():
    with criterion(2, "focus-focus slab is 1 + z to order 12"):
        lat = ChargeLattice(rank=1, boundary_map=((1,), (0,)))
        ctx = SeriesContext(lattice=lat, max_degree=12)
        counts = {d: Fraction((-1) ** (d - 1), d * d) for d in range(1, 13)}
        slab = slab_from_counts(counts, (1,), ctx)
        assert slab.series == 1 + TruncatedSeries.monomial(ctx, (1,))
        for d in range(2, 13):
            assert slab.series.coeff((d,)) == 0


@pytest.mark.parametrize("order", [4, 8, 12])
def test_criterion_03_pentagon_identity(order):
    with criterion(3, f"pentagon identity at order {order}"):
        t0 = time.perf_counter()
        d = pentagon_diagram(order)
        ctx = d.context
        s1 = SlabFunction((1, 0), 1 + TruncatedSeries.monomial(ctx, (1, 0)))
        s2 = SlabFunction((0, 1), 1 + TruncatedSeries.monomial(ctx, (0, 1)))
        s12 = SlabFunction((1, 1), 1 + TruncatedSeries.monomial(ctx, (1, 1)))
        t1, t2, t12 = (elementary(s) for s in (s1, s2, s12))
        assert t2.compose(t1) == t1.compose(t12).compose(t2)
        completed = d.complete()
        rays = [w for w in completed.walls if w.kind == "ray"]
        assert len(rays) == 1
        assert rays[0].charge_class == (1, 1)
        assert rays[0].slab.series == 1 + TruncatedSeries.monomial(ctx, (1, 1))
        assert time.perf_counter() - t0 < 10.0


def test_criterion_04_loop_consistency_after_completion():
    with criterion(4, "loop products are the identity after completion"):
        for diagram in corpus_diagrams(6):
            done = diagram.complete()
            for p in done.crossing_points():
                assert done.loop_product(LoopProbe(p)).is_identity()


def test_criterion_05_enumeration_matches_factorized_diagram():
    with criterion(5, "disc enumeration matches completed-diagram counts"):
        # Probe points sit on one wall each, away from crossings and far
        # enough from the singularities that the energy ball stays small.
        for base, order, lam, probes in [
            (focus_focus_base(), 8, LAM, {(1,): (2, 0)}),
            (
                pentagon_base(),
                8,
                LAM,
                {(1, 0): (3, 0), (0, 1): (0, 3), (1, 1): (2, 2)},
            ),
            (
                three_singularity_base(),
                4,
                Fraction(9),
                {
                    (1, 0, 0): (2, 0),
                    (0, 1, 0): (0, 2),
                    (0, 0, 1): (1, 2),
                    (1, 1, 0): (2, 2),
                    (1, 0, 1): (3, 2),
                    (1, 1, 1): (Fraction(11, 10), Fraction(12, 10)),
                },
            ),
        ]:
            done = base.diagram(order).complete()
            lat = base.lattice
            for wall in done.walls:
                u = tuple(map(Fraction, probes[wall.charge_class]))
                prim, _ = lat.primitive_part(wall.charge_class)
                counts = {}
                for w in done.walls:
                    if w.contains((Fraction(u[0]), Fraction(u[1]))):
                        p2, _ = lat.primitive_part(w.charge_class)
                        if p2 == prim:
                            for d, c in counts_from_slab(w.slab).items():
                                counts[d] = counts.get(d, Fraction(0)) + c
                d = 1
                while done.context.keeps(lat.scale(d, prim)):
                    gamma = lat.scale(d, prim)
                    z = base.charge.value(gamma, u)
                    if z.norm2() < lam * lam:
                        direct = omega_trop(base, u, gamma, lam)
                        assert direct == counts.get(d, Fraction(0))
                    d += 1
                # Classes carried by no wall through u vanish on both sides.
                import itertools

                on_rays = {
                    lat.primitive_part(w.charge_class)[0]
                    for w in done.walls
                    if w.contains((Fraction(u[0]), Fraction(u[1])))
                }
                for bits in itertools.product((0, 1), repeat=lat.rank):
                    if not any(bits):
                        continue
                    p2, _ = lat.primitive_part(bits)
                    if p2 in on_rays:
                        continue
                    if base.charge.value(bits, u).norm2() < lam * lam:
                        assert omega_trop(base, u, bits, lam) == 0


def test_criterion_06_dt_dictionary():
    with criterion(6, "integer-invariant dictionary and cover rule"):
        lat = ChargeLattice(rank=2, boundary_map=((1, 0), (0, 1)))
        ctx = SeriesContext(lattice=lat, max_degree=8)
        slab = SlabFunction((1, 0), 1 + TruncatedSeries.monomial(ctx, (1, 0)))
        omega = slab_to_dt(slab)
        assert omega[1] == 1
        assert all(omega[d] == 0 for d in range(2, 9))
        tilde = multiple_cover(omega, lat, (1, 0))
        assert tilde == {
            d: Fraction((-1) ** (d - 1), d * d) for d in range(1, 9)
        }
        rng = random.Random(20260826)
        for _ in range(100):
            table = {
                d: Fraction(rng.randint(-5, 5)) for d in range(1, rng.randint(2, 7))
            }
            gamma = (rng.randint(0, 3), rng.randint(0, 3))
            if gamma == (0, 0):
                gamma = (1, 1)
            assert covers_to_dt(multiple_cover(table, lat, gamma), lat, gamma) == table


def test_criterion_07_quadratic_refinement_cocycle():
    with criterion(7, "quadratic refinement cocycle on [-8,8]^2"):
        from math import gcd

        lat = ChargeLattice(rank=2, boundary_map=((1, 0), (0, 1)))
        rng = range(-8, 9)
        sign = {(a, b): quadratic_refinement(lat, (a, b)) for a in rng for b in rng}
        for a in sign:
            for b in sign:
                s = (a[0] + b[0], a[1] + b[1])
                if s in sign:
                    assert sign[s] == sign[a] * sign[b] * (
                        (-1) ** (lat.pairing(a, b) % 2)
                    )
        for v in sign:
            if gcd(v[0], v[1]) == 1:
                assert sign[v] == -1


def test_criterion_08_refined_suite():
    with criterion(8, "refined invariants and q=1 specialization"):
        assert q_int(2) == QLaurent({1: Fraction(1), -1: Fraction(1)})
        ctx = pentagon_diagram(6).context
        t1 = q_dilog(ctx, (1, 0))
        t2 = q_dilog(ctx, (0, 1))
        t12 = q_dilog(ctx, (1, 1))
        for g in [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)]:
            m = QuantumTorusSeries.monomial(ctx, g)
            assert apply_sequence([t1, t2], m) == apply_sequence([t2, t12, t1], m)
        ff = focus_focus_base()
        for d in range(1, 5):
            got = refined_omega(ff, (2, 0), (d,), LAM)
            assert got.at_one() == omega_trop(ff, (2, 0), (d,), LAM)
        pent = pentagon_base()
        assert refined_omega(pent, (2, 2), (1, 1), LAM).at_one() == omega_trop(
            pent, (2, 2), (1, 1), LAM
        )
        three = three_singularity_base()
        assert refined_omega(three, (2, 2), (1, 1, 0), LAM).at_one() == omega_trop(
            three, (2, 2), (1, 1, 0), LAM
        )


def test_criterion_09_symplectomorphism_property():
    with criterion(9, "transforms preserve the log-symplectic form"):
        for diagram in corpus_diagrams(8):
            done = diagram.complete()
            for w in done.walls:
                assert check_symplectic(elementary(w.slab, done.sign_convention))
            for p in done.crossing_points():
                assert check_symplectic(done.loop_product(LoopProbe(p)))
        pent = pentagon_diagram(8).complete()
        for u in [(Fraction(1), Fraction(2)), (Fraction(3), Fraction(1))]:
            assert check_symplectic(pent.theta_at(u))


def test_criterion_10_wall_invariance_of_transported_products():
    with criterion(10, "transported sector products agree between probes"):
        lam = Fraction(12)
        done = pentagon_diagram(12).complete()
        ctx = done.context
        probes = [(Fraction(1), Fraction(2)), (Fraction(3), Fraction(1)),
                  (Fraction(5), Fraction(2))]
        initial = [(1, 0), (0, 1)]
        max_initial = max(
            rational_sqrt_upper(done.charge.value(g, u).norm2())
            for g in initial
            for u in probes
        )
        lam_prime = lam - max_initial
        assert lam_prime > 0
        thetas = [done.theta_at(u).transport(ctx) for u in probes]
        for other in thetas[1:]:
            for a, b in zip(thetas[0].twists, other.twists):
                diff = a - b
                for g in diff.terms:
                    for u in probes:
                        energy2 = done.charge.value(g, u).norm2()
                        # Agreement is required below the reduced bound.
                        assert energy2 >= lam_prime * lam_prime


def _run_cli(args):
    out = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
        rc = cli_main(args)
    return rc, out.getvalue()


def test_criterion_11_determinism(tmp_path):
    with criterion(11, "byte-identical output across runs and thread counts"):
        inputs = [
            os.path.join(DIAGRAMS, name)
            for name in ("focus_focus.diagram", "pentagon.diagram",
                         "three_singularity.diagram")
        ]
        for i, path in enumerate(inputs):
            runs = []
            for tag, threads in (("a", "1"), ("b", "4"), ("c", "1")):
                out_dir = tmp_path / f"{i}{tag}"
                rc1, t1 = _run_cli(
                    ["complete", path, "--out", str(out_dir), "--threads", threads]
                )
                rc2, t2 = _run_cli(["invariants", path, "--threads", threads])
                assert rc1 == 0 and rc2 == 0
                files = {
                    name: (out_dir / name).read_bytes()
                    for name in ("walls.tsv", "diagram.svg")
                }
                runs.append((t1, t2, files))
            assert runs[0] == runs[1] == runs[2]
