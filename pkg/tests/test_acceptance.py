"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

The lines are printed as they are produced (visible with ``-s``) and again in
the terminal summary of every run.
"""

import json
import random
import time

import numpy as np
import pytest

from metapres.classify import classify
from metapres.cli import main
from metapres.intlinalg import (
    apply_op,
    determinantal_divisors,
    factors_from_divisors,
    smith_normal_form,
    verify_decomposition,
)
from metapres.presentation import Presentation, load_presentation, relation_matrix
from metapres.randgen import (
    ExperimentConfig,
    default_names,
    estimate_full_rank_probability,
    exact_full_rank_probability,
    sample_word,
)
from metapres.tietze import check_isomorphism_record, normalize_to_snf, replay
from metapres.words import exponent_vector, free_reduce

from .conftest import FIXTURES

RESULTS: list[str] = []


def report(label, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def random_matrix(rnd, max_dim, lo, hi):
    r, c = rnd.randint(1, max_dim), rnd.randint(1, max_dim)
    return [[rnd.randint(lo, hi) for _ in range(c)] for _ in range(r)]


def random_presentation(rnd, max_n=4, max_m=4, max_len=12):
    n, m = rnd.randint(1, max_n), rnd.randint(0, max_m)
    letters = [j for j in range(-n, n + 1) if j]
    rels = tuple(
        free_reduce([rnd.choice(letters) for _ in range(rnd.randint(0, max_len))], n) for _ in range(m)
    )
    return Presentation(default_names(n), rels)


def test_criterion_1_snf_correctness():
    rnd = random.Random(20240601)
    mats = [random_matrix(rnd, 8, -20, 20) for _ in range(1000)]
    t0 = time.perf_counter()
    good = sum(verify_decomposition(M, smith_normal_form(M)) for M in mats)
    elapsed = time.perf_counter() - t0
    report(
        "criterion 1 (SNF correctness)",
        good == 1000 and elapsed <= 10,
        f"{good}/1000 decompositions verified in {elapsed:.2f}s (limit 10s)",
    )


def test_criterion_2_oracle_equivalence():
    rnd = random.Random(7)
    mismatches = []
    for _ in range(200):
        M = random_matrix(rnd, 5, -20, 20)
        if smith_normal_form(M).invariant_factors != factors_from_divisors(determinantal_divisors(M)):
            mismatches.append(M)
    report(
        "criterion 2 (determinantal divisor oracle)",
        not mismatches,
        f"{200 - len(mismatches)}/200 matrices agree exactly",
    )


def test_criterion_3_commutation_square():
    rnd = random.Random(3)
    failures = []
    steps = 0
    for k in range(200):
        p = random_presentation(rnd)
        result = normalize_to_snf(p)
        snf = result.snf
        M = relation_matrix(p).tolist()
        for op, (q, _) in zip(snf.op_log, replay(p, snf.op_log)):
            apply_op(M, op)
            steps += 1
            if relation_matrix(q).tolist() != M:
                failures.append((k, "step"))
                break
        if M != snf.D.tolist() or relation_matrix(result.presentation) != snf.D:
            failures.append((k, "final"))
        if not check_isomorphism_record(result.iso):
            failures.append((k, "iso"))
    report(
        "criterion 3 (normalization commutation square)",
        not failures,
        f"200 presentations, {steps} op steps, {len(failures)} failures",
    )


def test_criterion_4_fixtures():
    checks = {
        "bs13": lambda p, r: r.full_rank
        and r.deficiency == 1
        and r.h_rank == 1
        and r.diophantine.value == "OPEN_DEFICIENCY_ONE",
        "two_bs": lambda p, r: r.full_rank
        and [p.render_word(w) for w in r.h_basis] == ["a3", "a4"]
        and r.diophantine.value == "UNDECIDABLE_Z_EINTERPRETABLE"
        and r.direct_decomposition is not None,
        "rem2": lambda p, r: not r.full_rank and r.diophantine.value == "NOT_APPLICABLE_NOT_FULL_RANK",
    }
    outcome = []
    for name, check in checks.items():
        p = load_presentation(str(FIXTURES / f"{name}.txt"))
        r = classify(p)
        stored = json.loads((FIXTURES / f"{name}.report.json").read_text())
        outcome.append((name, bool(check(p, r)) and r.to_json() == stored))
    report(
        "criterion 4 (worked examples)",
        all(ok for _, ok in outcome),
        ", ".join(f"{n}={'ok' if ok else 'MISMATCH'}" for n, ok in outcome),
    )


def test_criterion_5_genericity():
    t0 = time.perf_counter()
    # (a) every n, m <= 2 and 1 <= ell <= 8, twenty seeds each
    weak = []
    for n in (1, 2):
        for m in (1, 2):
            for ell in range(1, 9):
                p = float(exact_full_rank_probability(n, m, ell))
                inside = 0
                for rep in range(20):
                    cfg = ExperimentConfig(n, m, (ell,), 10_000, master_seed=rep)
                    row = estimate_full_rank_probability(cfg).rows[0]
                    inside += row.ci_low <= p <= row.ci_high
                if inside < 19:
                    weak.append(f"({n},{m},{ell}) {inside}/20")
    # (b) trend for (2, 2) at 2000 trials
    cfg = ExperimentConfig(2, 2, (4, 16, 64, 256), 2000, master_seed=0)
    rows = estimate_full_rank_probability(cfg).rows
    trend_ok = all(b.p_hat >= a.p_hat or b.ci_high >= a.ci_low for a, b in zip(rows, rows[1:]))
    elapsed = time.perf_counter() - t0
    trend = " ".join(f"{r.p_hat:.4f}" for r in rows)
    report(
        "criterion 5 (genericity at small scale)",
        not weak and trend_ok and elapsed <= 60,
        f"(a) configs below 19/20: {', '.join(weak) or 'none'}; (b) p_hat over ell=4,16,64,256: {trend} "
        f"({'nondecreasing up to CI overlap' if trend_ok else 'NOT monotone'}); {elapsed:.1f}s (limit 60s)",
    )


def test_criterion_6_parity():
    rng = np.random.default_rng(6)
    bad = 0
    for _ in range(100_000):
        n, ell = int(rng.integers(1, 5)), int(rng.integers(0, 33))
        w = sample_word(n, ell, rng)
        bad += sum(exponent_vector(w, n)) % 2 != ell % 2
    odd = (1, 3, 5, 7, 9, 15, 31, 63)
    rows = estimate_full_rank_probability(ExperimentConfig(1, 1, odd, 10_000, master_seed=6)).rows
    ones = all(r.p_hat == 1.0 for r in rows)
    report(
        "criterion 6 (parity)",
        bad == 0 and ones,
        f"{bad} parity violations in 1e5 words; p_hat = 1 for n=m=1 at odd ell {odd}: {ones}",
    )


def test_criterion_7_determinism(capsys):
    argv = ["experiment", "--n", "2", "--m", "2", "--lengths", "4,16,64", "--trials", "20000",
            "--seed", "123", "--format", "csv"]
    outputs = []
    for workers in ("1", "1", "8", "8"):
        assert main(argv + ["--workers", workers]) == 0
        outputs.append(capsys.readouterr().out.encode())
    with capsys.disabled():
        report(
            "criterion 7 (determinism)",
            len(set(outputs)) == 1,
            f"{len(set(outputs))} distinct CSV outputs across 2 runs x (1 and 8 workers)",
        )


@pytest.fixture(scope="module", autouse=True)
def _reset():
    RESULTS.clear()
    yield
