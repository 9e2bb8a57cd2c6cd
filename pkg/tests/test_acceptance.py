"""Acceptance suite: eight pinned criteria, one printed PASS/FAIL line each.

Run with plain pytest; the verdict lines bypass output capture so they are
visible either way.  Every expected value here is frozen and every random
draw is seeded, so the whole suite is bit-reproducible.
"""

import math
import random
import time

import pytest

from mmalg import (
    DEFAULT_PRIME,
    EquivalenceTransform,
    Matrix,
    PrimeField,
    QQ,
    RecursionConfig,
    apply_equivalence,
    classical,
    cost_model,
    dual,
    exponent,
    known_bounds,
    mat_classical_multiply,
    multiply_via_inversion,
    pan_aggregation,
    random_equivalence,
    random_matrix,
    recursive_invert,
    recursive_multiply,
    sanity_rank_lower_bound,
    strassen_222,
    verify_brent,
    verify_trilinear_random,
)

from helpers import corrupt_one, unit_lu_matrix

PERMS = ("mkn", "knm", "nmk", "mnk", "nkm", "kmn")


def _verdict(capsys, num: int, name: str, ok: bool):
    with capsys.disabled():
        print(f"criterion {num} ({name}): {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {num} ({name}) failed"


def test_criterion_1_aggregation_validity(capsys):
    ok = True
    for n in (2, 4, 6, 8, 10, 12):
        alg = pan_aggregation(n)
        if alg.rank != n**3 // 2 + 3 * n * n:
            ok = False
        if not verify_brent(alg).valid:
            ok = False
    _verdict(capsys, 1, "aggregation validity, n up to 12, exact rank", ok)


def test_criterion_2_exponent_reproduction(capsys):
    big = pan_aggregation(34)
    ok = big.rank == 23120
    ok = ok and abs(exponent(big) - 2.8495) <= 5e-4
    ok = ok and abs(exponent(strassen_222()) - math.log2(7)) <= 1e-12
    for i, n in enumerate((14, 20, 34)):
        alg = big if n == 34 else pan_aggregation(n)
        ok = ok and verify_trilinear_random(
            alg, trials=20, prime=DEFAULT_PRIME, seed=200 + i
        )
    _verdict(capsys, 2, "exponents 2.8495 and log2 7, random checks to n=34", ok)


def test_criterion_3_verifier_agreement(capsys):
    shipped = [
        classical(2, 2, 2),
        classical(2, 3, 3),
        classical(2, 3, 4),
        classical(3, 3, 3),
        strassen_222(),
        pan_aggregation(2),
        pan_aggregation(4),
    ]
    cases = [(alg, True) for alg in shipped]
    rng = random.Random(303)
    for alg in shipped:
        for _ in range(29):
            cases.append((corrupt_one(alg, rng), False))
    assert len(cases) == 210
    disagreements = 0
    for idx, (alg, expect_valid) in enumerate(cases):
        brent_ok = verify_brent(alg).valid
        random_ok = verify_trilinear_random(
            alg, trials=20, prime=DEFAULT_PRIME, seed=1000 + idx
        )
        if brent_ok != random_ok or brent_ok != expect_valid:
            disagreements += 1
    _verdict(capsys, 3, "both verifiers agree on 210 cases", disagreements == 0)


def test_criterion_4_duality_suite(capsys):
    ok = True
    for alg, rank in ((strassen_222(), 7), (classical(2, 3, 4), 24)):
        for perm in PERMS:
            out = dual(alg, perm)
            if out.rank != rank or not verify_brent(out).valid:
                ok = False
    _verdict(capsys, 4, "all six duals valid with preserved rank", ok)


def test_criterion_5_recursion_counts(capsys):
    field = PrimeField(DEFAULT_PRIME)
    cfg = RecursionConfig(strassen_222(), threshold=1)
    rng = random.Random(505)
    started = time.perf_counter()
    ok = True
    for t in range(1, 7):
        k = 2**t
        a = random_matrix(field, k, k, rng)
        b = random_matrix(field, k, k, rng)
        product, report = recursive_multiply(cfg, a, b)
        predicted = cost_model(strassen_222(), k)
        if report.bilinear_mults != 7**t:
            ok = False
        if report.additions != predicted.additions:
            ok = False
        if product != mat_classical_multiply(a, b):
            ok = False
    elapsed = time.perf_counter() - started
    ok = ok and elapsed < 10.0
    _verdict(capsys, 5, f"7^t counts and exact products, {elapsed:.2f}s", ok)


def test_criterion_6_inversion_reductions(capsys):
    cfg = RecursionConfig(strassen_222(), threshold=4)
    rng = random.Random(606)
    ok = True
    sizes = list(range(1, 33)) + [rng.randint(2, 16) for _ in range(18)]
    assert len(sizes) == 50
    for size in sizes:
        a = unit_lu_matrix(size, rng)
        inverse, _ = recursive_invert(cfg, a)
        if mat_classical_multiply(a, inverse) != Matrix.identity(QQ, size):
            ok = False

    def block_invert(mat):
        return recursive_invert(cfg, mat)[0]

    for _ in range(50):
        m, k, n = rng.randint(1, 8), rng.randint(1, 8), rng.randint(1, 8)
        a = random_matrix(QQ, m, k, rng)
        b = random_matrix(QQ, k, n, rng)
        if multiply_via_inversion(a, b, block_invert) != mat_classical_multiply(a, b):
            ok = False
    _verdict(capsys, 6, "50 exact inversions and 50 products via inversion", ok)


def test_criterion_7_equivalence_action(capsys):
    base = strassen_222()
    ok = True
    for seed in range(100):
        transform = random_equivalence(base.dims, base.rank, seed)
        out = apply_equivalence(base, transform)
        if out.rank != 7 or not verify_brent(out).valid:
            ok = False
    identity = EquivalenceTransform.identity(base.dims, base.rank)
    ok = ok and apply_equivalence(base, identity) == base
    _verdict(capsys, 7, "100 random equivalences valid, identity fixed", ok)


def test_criterion_8_bounds_sanity(capsys):
    shipped = [
        classical(2, 2, 2),
        classical(2, 3, 3),
        classical(2, 3, 4),
        classical(3, 3, 3),
        strassen_222(),
        pan_aggregation(2),
        pan_aggregation(4),
        pan_aggregation(6),
    ]
    ok = all(sanity_rank_lower_bound(alg) for alg in shipped)
    rows = {str(row.dims): (row.lower, row.upper) for row in known_bounds().entries}
    ok = ok and rows == {
        "2x2x2": (7, 7),
        "2x3x3": (15, 16),
        "2x3x4": (19, None),
        "3x3x3": (18, None),
        "2x4x4": (None, 27),
    }
    _verdict(capsys, 8, "generic bound respected, table rows exact", ok)
