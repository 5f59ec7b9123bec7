"""Acceptance criteria, each at its stated tolerance; one PASS/FAIL line per criterion."""

import json
import math
import time

import numpy as np
import pytest

from hadfrac.generators import CorridorSpec, TrialSeed, gen_corridor_pair, gen_dominated_pair
from hadfrac.generators import gen_operator_dominance_pair, gen_similarly_ordered_triple
from hadfrac.harness import (
    ASSERTED,
    INCONCLUSIVE,
    VIOLATED,
    SuiteConfig,
    check_T3_1,
    check_T3_2,
    check_T4_1,
    check_T4_2,
    check_T4_3,
    check_T4_4,
    check_T4_5,
    check_T4_7,
    replay,
    run_suite,
)
from hadfrac.identities import closed_form_checks, reduction_checks, semigroup_checks
from hadfrac.operators import FracParams
from hadfrac.quadrature import integrate_adaptive
from oracles import graded_trapezoid
from test_quadrature import random_smooth


@pytest.fixture(scope="module")
def default_suite():
    t0 = time.perf_counter()
    res = run_suite(SuiteConfig(workers=1))
    return res, time.perf_counter() - t0


def test_1_closed_form(acceptance_log):
    t0 = time.perf_counter()
    checks = closed_form_checks()
    dt = time.perf_counter() - t0
    worst = max(c.rel_err for c in checks)
    # 36 (alpha, beta, lambda) points, each at three x values
    ok = len(checks) == 36 * 3 and worst <= 1e-8 and dt < 5
    acceptance_log("1 closed-form identity", ok,
                   f"36 parameter points x 3 x-values, max rel err {worst:.2e} <= 1e-8, {dt:.2f} s < 5 s")
    assert ok


def test_2_semigroup(acceptance_log):
    t0 = time.perf_counter()
    checks = semigroup_checks(100)
    dt = time.perf_counter() - t0
    worst = max(c.rel_err for c in checks)
    ok = len(checks) == 100 and worst <= 1e-6 and dt < 60
    acceptance_log("2 semigroup", ok, f"100 trials, max rel err {worst:.2e} <= 1e-6, {dt:.1f} s < 60 s")
    assert ok


def test_3_beta_one_reduction(acceptance_log):
    checks = [c for c in reduction_checks(50) if c.name == "reduction_hadamard"]
    worst = max(c.rel_err for c in checks)
    ok = len(checks) == 50 and worst <= 1e-10
    acceptance_log("3 beta=1 reduction", ok, f"50 functions, max rel err {worst:.2e} <= 1e-10")
    assert ok


def _degenerate_margins():
    x, p, p2 = math.e, FracParams(0.5, 0.5), FracParams(1.7, 0.25)
    out = {}
    for P in (1.0, 2.0, 4.0):
        spec = CorridorSpec(1.0, 1.0, p=P)
        f, g = gen_corridor_pair(spec, TrialSeed(1))
        out[f"T3_1 p={P}"] = check_T3_1(f, g, spec, x, p).margin
    spec = CorridorSpec(1.0, 1.0, p=2.0)
    f, g = gen_corridor_pair(spec, TrialSeed(2))
    for name, chk in (("T3_2", check_T3_2), ("T4_1", check_T4_1), ("T4_2", check_T4_2),
                      ("T4_3", check_T4_3)):
        out[name] = chk(f, g, spec, x, p).margin
    spec = CorridorSpec(gamma=2.5, delta=1.0)
    f, g = gen_operator_dominance_pair(spec, TrialSeed(3), sigma_one=True)
    out["T4_4"] = check_T4_4(f, g, spec, x, p).margin
    for flag in ("g_constant", "f_equals_h"):
        f, g, h = gen_similarly_ordered_triple(TrialSeed(4), **{flag: True})
        out[f"T4_5 {flag}"] = check_T4_5(f, g, h, x, p).margin
        out[f"T4_6 {flag}"] = check_T4_5(f, g, h, x, p, p2).margin
    f, h = gen_dominated_pair(2.0, TrialSeed(5), rho_one=True)
    out["T4_7"] = check_T4_7(f, h, 2.0, x, p).margin
    out["T4_8"] = check_T4_7(f, h, 2.0, x, p, p2).margin
    return out


def test_4_equality_degeneracies(acceptance_log):
    margins = _degenerate_margins()
    worst = max(abs(m) for m in margins.values())
    ok = worst <= 1e-9
    acceptance_log("4 equality degeneracies", ok, f"{len(margins)} checks, max |margin| {worst:.1e} <= 1e-9")
    assert ok


def test_5_inequality_suite(default_suite, acceptance_log):
    res, dt = default_suite
    asserted = [r for r in res.reports if r.theorem_id in ASSERTED]
    counts = {t: s["trials"] for t, s in res.summary.items()}
    violated = sum(r.verdict == VIOLATED for r in asserted)
    errors = sum(r.verdict == "error" for r in asserted)
    inconclusive = sum(r.verdict == INCONCLUSIVE for r in asserted)
    rate = inconclusive / len(asserted)
    ok = (all(counts[t] == 1000 for t in ASSERTED) and violated == 0 and errors == 0
          and rate <= 1e-3 and dt < 600)
    acceptance_log("5 inequality suite", ok,
                   f"{len(asserted)} trials, {violated} violated, {errors} errors, "
                   f"inconclusive {rate:.2%} <= 0.1%, {dt:.0f} s < 600 s")
    assert ok


def test_6_T4_4_census(default_suite, acceptance_log):
    res, _ = default_suite
    doc = json.loads(res.to_json())
    census = [r for r in doc["reports"] if r["theorem_id"] == "T4_4"]
    complete = (len(census) == 1000
                and all(math.isfinite(r["margin"]) and r["seed"] is not None
                        and 1.5 <= r["gamma"] <= 3.0 and 0 < r["delta"] < r["gamma"]
                        for r in census))
    violations = [r for r in census if r["verdict"] == VIOLATED]
    # replay every violation, plus the tightest trials and a spread sample of the census
    order = sorted(census, key=lambda r: r["margin"])
    sample = {r["trial_index"]: r for r in violations + order[:10] + census[::50]}
    worst = 0.0
    for rec in sample.values():
        rep = replay(rec, rtol=doc["config"]["rtol"], tol_rel=doc["config"]["tol_rel"])
        worst = max(worst, abs(rep.lhs - rec["lhs"]) / abs(rec["lhs"]),
                    abs(rep.rhs - rec["rhs"]) / abs(rec["rhs"]))
    listed = res.summary["T4_4"]["violation_seeds"]
    ok = complete and worst <= 1e-12 and len(listed) == len(violations)
    acceptance_log("6 T4_4 census", ok,
                   f"{len(census)} margins, min {order[0]['margin']:.3e}, {len(violations)} violations, "
                   f"{len(sample)} replays max rel diff {worst:.1e} <= 1e-12")
    assert ok


def test_7_quadrature_oracle(acceptance_log):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        alpha = float(rng.uniform(0.3, 2.5))
        phi = random_smooth(rng)
        ours = integrate_adaptive(phi, alpha, 1e-10).value
        ref = graded_trapezoid(phi, alpha, N=100_000)
        worst = max(worst, abs(ours - ref) / abs(ref))
    ok = worst <= 1e-7
    acceptance_log("7 quadrature oracle", ok, f"100 integrands, max rel err {worst:.2e} <= 1e-7")
    assert ok


def test_8_determinism(default_suite, acceptance_log):
    res, _ = default_suite
    again = run_suite(SuiteConfig(workers=1)).to_csv().encode()
    first = res.to_csv().encode()
    ok = first == again
    acceptance_log("8 determinism", ok, f"two default runs, {len(first)} bytes, identical={ok}")
    assert ok
