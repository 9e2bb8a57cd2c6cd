"""Duality, tensor products, squareify, and equivalence transforms."""

import math
import random
from fractions import Fraction

import pytest

from mmalg import (
    BadArgument,
    BadTransform,
    BilinearAlgorithm,
    DimensionTriple,
    DualityPermutation,
    EquivalenceTransform,
    FormatError,
    InvalidAlgorithm,
    Matrix,
    PrimeField,
    QQ,
    apply_elementary,
    apply_equivalence,
    classical,
    dual,
    exponent,
    format_transform,
    mat_classical_multiply,
    pan_aggregation,
    parse_transform,
    random_equivalence,
    random_matrix,
    squareify,
    strassen_222,
    tensor_product,
    verify_brent,
)

from helpers import P61, corrupt_one


def test_all_six_duals_of_strassen():
    alg = strassen_222()
    seen = set()
    for perm in DualityPermutation:
        d = dual(alg, perm)
        assert verify_brent(d).valid, perm
        assert d.rank == 7
        assert d.dims == perm.target_dims(alg.dims)
        seen.add(perm)
    assert len(seen) == 6


def test_all_six_duals_of_rectangular():
    alg = classical(2, 3, 4)
    expected_dims = {
        "mkn": (2, 3, 4), "knm": (3, 4, 2), "nmk": (4, 2, 3),
        "mnk": (2, 4, 3), "nkm": (4, 3, 2), "kmn": (3, 2, 4),
    }
    for name, dims in expected_dims.items():
        d = dual(alg, name)
        assert d.dims == DimensionTriple(*dims), name
        assert d.rank == 24 and verify_brent(d).valid, name


def test_dual_composition_laws():
    alg = strassen_222()
    assert dual(alg, "mkn") == alg
    assert dual(dual(dual(alg, "knm"), "knm"), "knm") == alg
    assert dual(dual(alg, "mnk"), "mnk") == alg
    rect = classical(2, 3, 4)
    assert dual(dual(dual(rect, "knm"), "knm"), "knm") == rect


def test_dual_of_pan():
    alg = pan_aggregation(2)
    for perm in ("knm", "mnk"):
        d = dual(alg, perm)
        assert verify_brent(d).valid and d.rank == alg.rank


def test_dual_requires_valid_input():
    rng = random.Random(53)
    bad = corrupt_one(strassen_222(), rng)
    with pytest.raises(InvalidAlgorithm):
        dual(bad, "knm")
    with pytest.raises(BadArgument):
        dual(strassen_222(), "xyz")


def test_tensor_product_structure():
    s = strassen_222()
    t = tensor_product(s, s)
    assert t.dims == DimensionTriple(4, 4, 4)
    assert t.rank == 49
    assert verify_brent(t).valid
    rect = tensor_product(classical(2, 1, 1), classical(1, 3, 1))
    assert rect.dims == DimensionTriple(2, 3, 1)
    assert rect.rank == 6
    assert verify_brent(rect).valid


def test_tensor_product_identity_and_associativity():
    s = strassen_222()
    one = classical(1, 1, 1)
    assert tensor_product(s, one) == s
    assert tensor_product(one, s) == s
    a, b, c = classical(2, 1, 1), classical(1, 2, 1), strassen_222()
    assert tensor_product(tensor_product(a, b), c) == tensor_product(a, tensor_product(b, c))


def test_tensor_product_multiplies_correctly():
    rng = random.Random(54)
    field = PrimeField(P61)
    t = tensor_product(strassen_222(), classical(2, 2, 2))
    assert t.dims == DimensionTriple(4, 4, 4) and t.rank == 56
    for _ in range(5):
        a = random_matrix(field, 4, 4, rng)
        b = random_matrix(field, 4, 4, rng)
        product, _ = apply_elementary(t, a, b)
        assert product == mat_classical_multiply(a, b)


def test_tensor_product_requires_valid_inputs():
    rng = random.Random(55)
    bad = corrupt_one(classical(2, 2, 2), rng)
    with pytest.raises(InvalidAlgorithm):
        tensor_product(bad, strassen_222())
    with pytest.raises(InvalidAlgorithm):
        tensor_product(strassen_222(), bad)


def test_squareify():
    sq = squareify(strassen_222())
    assert sq.dims == DimensionTriple(8, 8, 8)
    assert sq.rank == 343
    assert verify_brent(sq).valid
    assert abs(exponent(sq) - math.log2(7)) <= 1e-12

    sq = squareify(pan_aggregation(2))
    assert sq.dims == DimensionTriple(8, 8, 8)
    assert sq.rank == 4096
    assert abs(exponent(sq) - 4.0) <= 1e-12

    sq = squareify(classical(2, 3, 4))
    assert sq.dims == DimensionTriple(24, 24, 24)
    assert sq.rank == 13824
    assert verify_brent(sq).valid
    assert exponent(sq) == 3.0


def test_identity_transform_is_fixed_point():
    for alg in (strassen_222(), classical(2, 3, 4)):
        ident = EquivalenceTransform.identity(alg.dims, alg.rank)
        assert apply_equivalence(alg, ident) == alg


def test_permutation_only_transform_relabels_products():
    alg = strassen_222()
    perm = (3, 0, 6, 1, 2, 5, 4)
    ident = EquivalenceTransform.identity(alg.dims, alg.rank)
    shuffled = EquivalenceTransform(
        ident.sigma, ident.gamma, ident.nabla, ident.lam, ident.mu, ident.beta, perm
    )
    out = apply_equivalence(alg, shuffled)
    for s in range(alg.rank):
        assert out.u[s] == alg.u[perm[s]]
        assert out.v[s] == alg.v[perm[s]]
        assert out.w[s] == alg.w[perm[s]]
    assert verify_brent(out).valid


def test_transform_invariants_enforced():
    two = Matrix.from_rows(QQ, [[2, 0], [0, 2]])
    eye = Matrix.identity(QQ, 2)
    with pytest.raises(BadTransform):
        EquivalenceTransform(two, eye, eye, eye, eye, eye, (0,))
    with pytest.raises(BadTransform):
        EquivalenceTransform(eye, eye, eye, eye, eye, eye, (0, 0))
    half = Matrix.from_rows(QQ, [[Fraction(1, 2), 0], [0, Fraction(1, 2)]])
    t = EquivalenceTransform(two, half, eye, eye, eye, eye, (0,))
    assert t.sigma == two


def test_apply_equivalence_size_mismatch():
    alg = classical(2, 3, 4)
    wrong = EquivalenceTransform.identity(DimensionTriple(2, 2, 2), alg.rank)
    with pytest.raises(BadTransform):
        apply_equivalence(alg, wrong)
    short = EquivalenceTransform.identity(alg.dims, 5)
    with pytest.raises(BadTransform):
        apply_equivalence(alg, short)


def test_random_equivalence_preserves_validity():
    for alg, seeds in ((strassen_222(), range(30)), (classical(2, 3, 4), range(20)),
                       (pan_aggregation(2), range(5))):
        for seed in seeds:
            transform = random_equivalence(alg.dims, alg.rank, seed)
            out = apply_equivalence(alg, transform)
            assert out.rank == alg.rank
            assert verify_brent(out).valid, (alg.dims, seed)


def test_random_equivalence_determinism_and_invariants():
    assert random_equivalence(DimensionTriple(2, 2, 2), 7, 9) == random_equivalence(
        DimensionTriple(2, 2, 2), 7, 9
    )
    assert random_equivalence(DimensionTriple(2, 2, 2), 7, 9) != random_equivalence(
        DimensionTriple(2, 2, 2), 7, 10
    )
    for seed in range(1000):
        dims = DimensionTriple(2, 3, 4) if seed % 2 else DimensionTriple(2, 2, 2)
        t = random_equivalence(dims, 7, seed)
        for left, right, size in (
            (t.sigma, t.gamma, dims.m),
            (t.nabla, t.lam, dims.k),
            (t.mu, t.beta, dims.n),
        ):
            assert mat_classical_multiply(left, right) == Matrix.identity(QQ, size)
        assert sorted(t.perm) == list(range(7))


def test_transform_file_round_trip():
    alg = classical(2, 3, 4)
    transform = random_equivalence(alg.dims, alg.rank, 77)
    text = format_transform(transform, alg.dims)
    again, dims = parse_transform(text)
    assert again == transform
    assert dims == alg.dims
    assert format_transform(again, dims) == text


def test_transform_file_errors():
    alg = strassen_222()
    transform = random_equivalence(alg.dims, alg.rank, 3)
    lines = format_transform(transform, alg.dims).splitlines()

    with pytest.raises(FormatError) as err:
        parse_transform("")
    assert err.value.line == 1
    with pytest.raises(FormatError):
        parse_transform("mmtrans-v2 2 2 2 7\n")
    # wrong label order
    swapped = list(lines)
    sigma_at = swapped.index("sigma")
    gamma_at = swapped.index("gamma")
    swapped[sigma_at], swapped[gamma_at] = swapped[gamma_at], swapped[sigma_at]
    with pytest.raises(FormatError):
        parse_transform("\n".join(swapped))
    # perm too short
    broken = list(lines)
    broken[-1] = "1 2 3"
    with pytest.raises(FormatError):
        parse_transform("\n".join(broken))
    # perm out of range
    broken[-1] = "1 2 3 4 5 6 9"
    with pytest.raises(FormatError):
        parse_transform("\n".join(broken))
    # trailing junk
    with pytest.raises(FormatError):
        parse_transform("\n".join(lines) + "\nextra\n")
    # structurally fine but not mutually inverse
    bad = list(lines)
    sigma_row = bad.index("sigma") + 1
    bad[sigma_row] = "5 0"
    with pytest.raises(BadTransform):
        parse_transform("\n".join(bad))
