"""Acceptance criteria, one test each.

Every criterion prints a ``PASS``/``FAIL`` line; run this file directly to
see them without pytest, or read the summary pytest prints at the end.
"""

import sys
import time
from math import factorial

import numpy as np
import pytest

from vbma.errors import InputError, InvariantViolation
from vbma.forms import commutator_identity_check, random_curvature, vbma_residual
from vbma.gram import (Kind, classify, decoupling_blocks, gram_matrix, monte_carlo_min)
from vbma.rank2 import rank2_sweep
from vbma.seeding import child_seeds
from vbma import threefold, vortex

RESULTS = []


def record(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    return ok


def criterion_1():
    t0 = time.perf_counter()
    problems = []
    for n in (2, 3, 4, 5):
        inst = vortex.counterexample(n, k=4.0, r=1)
        res = vbma_residual(vortex.assemble_curvature(inst), 4.0)
        verdicts = [classify(B) for B in vortex.b_forms(inst).as_list()]
        ch = vortex.schur_chain(inst)
        case = vortex.classify_semidef_case(inst)
        if res > 1e-12:
            problems.append(f"n={n} residual {res:.2e}")
        if verdicts[0].kind != Kind.STRICTLY_SEMI_POSITIVE or verdicts[0].kernel_dimension != n - 1:
            problems.append(f"n={n} B1 {verdicts[0].kind} kernel {verdicts[0].kernel_dimension}")
        if any(v.kind != Kind.POSITIVE for v in verdicts[1:]):
            problems.append(f"n={n} B2-B4 {[str(v.kind) for v in verdicts[1:]]}")
        devs = [abs(ch.pprime), abs(ch.qprime), abs(ch.rprime), abs(ch.sprime - 0.125)]
        if max(devs) > 1e-12:
            problems.append(f"n={n} p',q',r',s' deviations {devs}")
        if case.case != "Case1" or abs(inst.c_norm_sq - 12.0) > 1e-12:
            problems.append(f"n={n} case {case.case} |C|^2 {inst.c_norm_sq}")
    elapsed = time.perf_counter() - t0
    if elapsed >= 1.0:
        problems.append(f"runtime {elapsed:.2f}s")
    return not problems, "; ".join(problems) or f"n=2..5 reproduced in {elapsed:.3f}s"


def criterion_2():
    t0 = time.perf_counter()
    out = rank2_sweep(100_000, seed=1, tol=1e-9)
    elapsed = time.perf_counter() - t0
    ok = (out["schur_violations"] == 0 and out["chain_violations"] == 0
          and out["quadratic_violations"] == 0 and elapsed < 60)
    return ok, (f"schur {out['schur_violations']}, chain {out['chain_violations']} violations "
                f"in 1e5 trials, {elapsed:.2f}s")


def criterion_3():
    t0 = time.perf_counter()
    out = threefold.det_identity_sweep(10_000, seed=2, rtol=1e-9)
    elapsed = time.perf_counter() - t0
    ok = (out["passed"] and out["max_relative_error"] <= 1e-9 and out["min_delta"] > 0
          and out["min_detA"] > 0 and elapsed < 30)
    return ok, (f"max rel err {out['max_relative_error']:.2e}, min Delta {out['min_delta']:.3g}, "
                f"min det(A) {out['min_detA']:.3g}, {elapsed:.2f}s")


def criterion_4():
    t0 = time.perf_counter()
    out = threefold.region_p_campaign(draws=100, samples=1000, seed=3)
    elapsed = time.perf_counter() - t0
    ok = (out["passed"] and out["min_g1"] > 0 and out["min_g2"] > 0
          and out["corners_checked"] > 0 and out["equal_lambda_checked"] > 0 and elapsed < 60)
    return ok, (f"min g1 {out['min_g1']:.3g}, min g2 {out['min_g2']:.3g}, "
                f"{out['corners_checked']} corners max |g2| rel {out['max_corner_g2_relative']:.1e}, "
                f"{out['equal_lambda_checked']} equal-lambda draws, {elapsed:.2f}s")


def criterion_5():
    rng = np.random.default_rng(5)
    worst = 0.0

    def herm():
        Z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        return (Z + Z.conj().T) / 2

    for _ in range(100):
        t1, t2 = herm(), herm()
        a, b = rng.uniform(0.1, 5.0, 2)
        ell = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        for k in (1, 2, 3):
            worst = max(worst, threefold.theta_powers(t1, t2, a, b, ell, k, tol=1e-12).error)
    return worst <= 1e-12, f"max relative mismatch {worst:.1e} over 300 powers"


def criterion_6():
    problems = []
    inst = vortex.counterexample(2, k=4.0, r=1)
    for m in (1, 2):
        _, rep = vortex.lift(inst, m, samples=1000, seed=60 + m)
        expected = 4 * factorial(m + 2) / 2
        if rep["top_error"] > 1e-12 * expected or rep["expected_top"] != expected:
            problems.append(f"m={m} top error {rep['top_error']:.1e}")
        if rep["verdict"].kind != Kind.STRICTLY_SEMI_POSITIVE:
            problems.append(f"m={m} verdict {rep['verdict'].kind}")
        if rep["sufficient_min"] < 0:
            problems.append(f"m={m} sufficient min {rep['sufficient_min']}")
    return not problems, "; ".join(problems) or "m=1: 12 Id, m=2: 48 Id, both StrictlySemiPositive"


def criterion_7():
    rng = np.random.default_rng(7)
    seeds = child_seeds(7, 100)
    disagreements = 0
    kinds = set()
    for i in range(100):
        theta = random_curvature(2, (1, 2, 3)[i % 3], rng)
        v = classify(gram_matrix(theta))
        kinds.add(str(v.kind))
        mc = monte_carlo_min(theta, trials=10_000, seed=seeds[i])
        if (v.min_eigenvalue > v.tol and mc < -v.tol) or (v.min_eigenvalue < -v.tol and mc > v.tol):
            disagreements += 1
    leaks = 0
    for _ in range(100):
        inst = vortex.random_instance(rng)
        try:
            decoupling_blocks(vortex.assemble_curvature(inst), inst.n, tol=1e-12)
        except (InputError, InvariantViolation):
            leaks += 1
    ok = disagreements == 0 and leaks == 0 and len(kinds) > 1
    return ok, (f"{disagreements} sign disagreements ({sorted(kinds)}), "
                f"{leaks} non-decoupled vortex instances")


def criterion_8():
    rng = np.random.default_rng(8)
    worst_comm = 0.0
    for i in range(100):
        n, r = (2, 3, 4)[i % 3], (1, 2, 3)[(i // 3) % 3]
        theta = random_curvature(n, r, rng)
        g = rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
        scale = max(1.0, theta.max_abs() ** n * float(np.max(np.abs(g))))
        worst_comm = max(worst_comm, commutator_identity_check(theta, g) / scale)
    worst_sq = 0.0
    for _ in range(100):
        Z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        p, q = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        A, B = rng.standard_normal(2)
        Cc = complex(*rng.standard_normal(2))
        worst_sq = max(worst_sq, threefold.two_form_square((Z + Z.conj().T) / 2, p, q, A, B, Cc))
    mismatches = 0
    for inst in threefold.random_instances(1000, seed=88):
        if not threefold.compare_restricted(inst).agree:
            mismatches += 1
    ok = worst_comm <= 1e-12 and worst_sq <= 1e-12 and mismatches == 0
    return ok, (f"commutator {worst_comm:.1e} rel, two-form square {worst_sq:.1e}, "
                f"{mismatches}/1000 H_W vs X verdict mismatches")


CRITERIA = [
    (1, "counterexample reproduction", criterion_1),
    (2, "rank-2 surface preservation sweep", criterion_2),
    (3, "threefold determinant identity", criterion_3),
    (4, "region P positivity of g1, g2", criterion_4),
    (5, "curvature power block formula", criterion_5),
    (6, "higher-dimensional lift", criterion_6),
    (7, "oracle equivalence", criterion_7),
    (8, "algebraic identities", criterion_8),
]


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn):
    ok, detail = fn()
    assert record(number, title, ok, detail), detail


if __name__ == "__main__":
    results = [record(num, title, *fn()) for num, title, fn in CRITERIA]
    sys.exit(0 if all(results) else 1)
