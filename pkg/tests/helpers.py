"""Shared test utilities: an independent brute-force verifier, corruption
helpers, and matrix builders.

brute_force_brent deliberately shares nothing with the package's sparse
verifier: it densifies the coefficient tensors and walks the full
six-index grid, so the two can cross-check each other.
"""

from __future__ import annotations

from fractions import Fraction

from mmalg import BilinearAlgorithm, Matrix, QQ, mat_classical_multiply

P61 = 2**61 - 1
P31 = 2**31 - 1


def _densify(slices, rows, cols):
    out = []
    for d in slices:
        grid = [[0] * cols for _ in range(rows)]
        for (r, c), val in d.items():
            grid[r][c] = int(val) if val.denominator == 1 else val
        out.append(grid)
    return out


def brute_force_brent(alg: BilinearAlgorithm) -> list:
    """All violated coefficient equations, by exhaustive six-index enumeration."""
    m, k, n = alg.dims
    u = _densify(alg.u, m, k)
    v = _densify(alg.v, k, n)
    w = _densify(alg.w, m, n)
    ranks = range(alg.rank)
    bad = []
    for l in range(m):
        for q in range(n):
            for i in range(m):
                for j in range(k):
                    for g in range(k):
                        for h in range(n):
                            total = 0
                            for s in ranks:
                                total += u[s][i][j] * v[s][g][h] * w[s][l][q]
                            expected = 1 if (i == l and j == g and h == q) else 0
                            if total != expected:
                                bad.append((l, q, i, j, g, h, total))
    return bad


def corrupt_one(alg: BilinearAlgorithm, rng) -> BilinearAlgorithm:
    """Copy with exactly one coefficient of one product changed."""
    m, k, n = alg.dims
    u = [dict(d) for d in alg.u]
    v = [dict(d) for d in alg.v]
    w = [dict(d) for d in alg.w]
    tensors = ((u, m, k), (v, k, n), (w, m, n))
    target, rows, cols = tensors[rng.randrange(3)]
    s = rng.randrange(alg.rank)
    r = rng.randrange(rows)
    c = rng.randrange(cols)
    delta = rng.choice((1, -1, 2, Fraction(1, 2)))
    target[s][(r, c)] = target[s].get((r, c), Fraction(0)) + delta
    return BilinearAlgorithm(alg.dims, alg.rank, u, v, w)


def unit_lu_matrix(size: int, rng, spread: int = 2) -> Matrix:
    """Integer matrix with every leading principal minor equal to 1."""
    lower = [[Fraction(1) if i == j else
              (Fraction(rng.randint(-spread, spread)) if i > j else Fraction(0))
              for j in range(size)] for i in range(size)]
    upper = [[Fraction(1) if i == j else
              (Fraction(rng.randint(-spread, spread)) if i < j else Fraction(0))
              for j in range(size)] for i in range(size)]
    return mat_classical_multiply(
        Matrix.from_rows(QQ, lower), Matrix.from_rows(QQ, upper)
    )
