"""Acceptance criteria, one test each, at the stated tolerances.

Every test prints a single ``[PASS]``/``[FAIL]`` line; the lines are also
collected and repeated in the terminal summary.
"""

import math
import time

import pytest

from hausdorff_lab.hardy_atomic import (
    AtomicDecomposition,
    Ball,
    apply_to_decomposition,
    h1_bound,
    h1_upper,
    make_haar_atom,
    pushforward_atom,
    transported_matches,
    verify_atom,
)
from hausdorff_lab.hausdorff_op import cesaro_kernel, default_family, density_kernel, empirical_opnorm, lp_bound, lp_bound_fuzz
from hausdorff_lab.homogeneous_models import ModelId, make_model
from hausdorff_lab.numerics import DiscreteKernel, doubling_estimate, measure_scaling_estimate
from hausdorff_lab.report import canonical_json
from hausdorff_lab.suites import RunConfig, point_mass_cases, run_suite

from conftest import ACCEPTANCE_LINES

ALL = [m.value for m in ModelId]


@pytest.fixture
def record():
    def _record(tag: str, ok: bool, summary: str):
        line = f"[{'PASS' if ok else 'FAIL'}] {tag} {summary}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        assert ok, line

    return _record


def test_ac1_weil_disintegration(record):
    start = time.perf_counter()
    residuals = []
    rep = run_suite(RunConfig("verify weil"))
    for c in rep.checks:
        residuals.append(c.residuals["weil"])
    elapsed = time.perf_counter() - start
    ok = len(residuals) == 20 and max(residuals) < 1e-6 and elapsed < 10.0
    record("AC1", ok, f"weil residual max={max(residuals):.2e} over {len(residuals)} functions (B, C) in {elapsed:.1f}s")


def test_ac2_lp_bound_fuzz(record):
    start = time.perf_counter()
    worst, n_ok, n = 0.0, 0, 0
    for mid in ALL:
        for r in lp_bound_fuzz(make_model(mid), 100, seed=0, tol=1e-3):
            n += 1
            n_ok += r.passed
            worst = max(worst, r.ratio)
    elapsed = time.perf_counter() - start
    ok = n == 300 and n_ok == n and elapsed < 60.0
    record("AC2", ok, f"{n_ok}/{n} triples within bound*(1+1e-3), max ratio={worst:.6f}, {elapsed:.1f}s")


def test_ac3_point_mass_sharpness(record):
    worst, n = 0.0, 0
    for mid in ALL:
        m = make_model(mid)
        for kernel, p in point_mass_cases(m, seed=0):
            exact = abs(kernel.phis[0]) * float(m.modulus(kernel.params[0])) ** (-1.0 / p)
            emp = empirical_opnorm(m, kernel, p, default_family(m, 0, size=3))
            worst = max(worst, abs(emp - exact))
            n += 1
    record("AC3", n == 30 and worst <= 1e-3, f"{n} point-mass kernels, max |empirical - |phi0| mod^(-1/p)|={worst:.2e}")


def test_ac4_cesaro_arithmetic(record):
    m = make_model("real-line")
    base = density_kernel(1.0, math.inf, "1")
    kernel = cesaro_kernel(m, base)
    lp = {p: lp_bound(m, kernel, p).bound for p in (1.0, 2.0, 4.0)}
    h1 = h1_bound(m, kernel).bound
    ok = all(abs(v - p) <= 1e-3 for p, v in lp.items()) and abs(h1 - 2.0) <= 1e-3
    shown = ", ".join(f"p={p:g}: {v:.9f}" for p, v in lp.items())
    record("AC4", ok, f"Cesaro lp_bound {shown}; h1_bound={h1:.9f}")


def test_ac5_regularity_dichotomy(record):
    rep = run_suite(RunConfig("verify regularity"))
    const = [c for c in rep.checks if "constant_level" in c.name]
    decay = [c for c in rep.checks if "decay" in c.name]
    worst_const = max(c.residuals["abs_err"] for c in const)
    worst_decay = max(c.residuals["radius_64"] / c.residuals["radius_1"] for c in decay)
    ok = rep.passed and worst_const <= 1e-12 and worst_decay < 1e-6 and len(decay) > 0
    record("AC5", ok, f"constant level max err={worst_const:.1e} ({len(const)} checks); dev64/dev1 max={worst_decay:.1e} ({len(decay)} functions)")


def test_ac6_atom_axioms(record):
    rep = run_suite(RunConfig("verify atoms", trials=50))
    gen = [c for c in rep.checks if ":atom[" in c.name]
    vio = [c for c in rep.checks if "violation" in c.name]
    worst = max(max(c.residuals.values()) for c in gen)
    ok = rep.passed and len(gen) == 150 and len(vio) == 30 and worst < 1e-6
    record("AC6", ok, f"{len(gen)} generated atoms max residual={worst:.1e}; {len(vio)} violations caught on intended axiom")


def test_ac7_pushforward_on_dilations(record):
    m = make_model("real-line")
    cs = [1 / 8, 1 / 4, 1 / 2, 1.0, 2.0, 4.0, 8.0]
    atoms = [make_haar_atom(m, Ball((0.0,), 1.0)), make_haar_atom(m, Ball((2.5,), 0.3), (-1.0,)), make_haar_atom(m, Ball((-4.0,), 3.0))]
    all_pass = all(verify_atom(m, pushforward_atom(m, a, c)[0]).passed for a in atoms for c in cs)
    decomp = AtomicDecomposition([(0.6, atoms[0]), (-0.3, atoms[1]), (0.1, atoms[2])])
    slack, match = -math.inf, 0.0
    kernels = [DiscreteKernel((c,), (1.0,), (1.0,)) for c in cs] + [DiscreteKernel(tuple(cs), (1.0 / 7,) * 7, (1.0,) * 7)]
    for k in kernels:
        t = apply_to_decomposition(m, k, decomp)
        slack = max(slack, h1_upper(t) - h1_bound(m, k).bound * h1_upper(decomp))
        match = max(match, transported_matches(m, k, decomp, t))
    ok = all_pass and slack <= 1e-6 and match < 1e-6
    record("AC7", ok, f"pushforwards pass={all_pass}; mass excess over bound max={slack:.1e}; re-expansion err={match:.1e}")


def test_ac8_estimators(record):
    rows, ok = [], True
    for mid, cs, law in (
        ("real-line", (0.5, 2.0, -3.0), lambda c: abs(c)),
        ("motion-group-plane", (0.5, 2.0, 3.0), lambda c: c * c),
        ("complex-mod-circle", (0.5, 2.0, -3.0), lambda c: abs(c)),
    ):
        m = make_model(mid)
        for c in cs:
            est = measure_scaling_estimate(m, c, seed=1).value
            rel = abs(est - law(c)) / law(c)
            ok &= rel <= 0.01
            rows.append(rel)
    d = doubling_estimate(make_model("real-line"), seed=1)
    ok &= abs(d.C - 2.0) <= 0.1 and abs(d.s - 1.0) <= 0.05
    record("AC8", bool(ok), f"modulus max rel err={max(rows):.2e} over {len(rows)} (A |c|, C c^2, B |u|); doubling A C={d.C:.3f} s={d.s:.3f}")


@pytest.mark.parametrize("argv", [("estimate doubling", {}), ("verify weil", {"seed": 3}), ("verify atoms", {"trials": 5, "seed": 7})])
def test_ac9_determinism(record, argv):
    command, extra = argv
    first = canonical_json(run_suite(RunConfig(command, **extra)))
    second = canonical_json(run_suite(RunConfig(command, **extra)))
    record("AC9", first == second, f"'{command}' rerun byte-identical ({len(first)} bytes)")
