"""Constructors for the shipped multiplication programs.

Three families: the classical one-product-per-entry scheme for any shape,
the rank-7 scheme for 2x2, and a shifted-partner aggregation scheme that
reaches rank n^3/2 + 3n^2 for any even n, which beats classical n^3 from
n = 8 onward and drives the multiplication exponent below 2.85 at n = 34.
"""

from __future__ import annotations

from .bilinear_core import BilinearAlgorithm, DimensionTriple
from .errors import BadArgument


def classical(m: int, k: int, n: int) -> BilinearAlgorithm:
    """One bilinear product a_ij * b_jh per coefficient of the result: rank mkn."""
    dims = DimensionTriple(m, k, n)
    u, v, w = [], [], []
    for i in range(m):
        for j in range(k):
            for h in range(n):
                u.append({(i, j): 1})
                v.append({(j, h): 1})
                w.append({(i, h): 1})
    return BilinearAlgorithm(dims, dims.volume, u, v, w)


def strassen_222() -> BilinearAlgorithm:
    """The rank-7 scheme for 2x2 matrices (optimal; classical needs 8)."""
    products = [
        # (u, v, w) per bilinear product
        ({(0, 0): 1, (1, 1): 1}, {(0, 0): 1, (1, 1): 1}, {(0, 0): 1, (1, 1): 1}),
        ({(1, 0): 1, (1, 1): 1}, {(0, 0): 1}, {(1, 0): 1, (1, 1): -1}),
        ({(0, 0): 1}, {(0, 1): 1, (1, 1): -1}, {(0, 1): 1, (1, 1): 1}),
        ({(1, 1): 1}, {(1, 0): 1, (0, 0): -1}, {(0, 0): 1, (1, 0): 1}),
        ({(0, 0): 1, (0, 1): 1}, {(1, 1): 1}, {(0, 0): -1, (0, 1): 1}),
        ({(1, 0): 1, (0, 0): -1}, {(0, 0): 1, (0, 1): 1}, {(1, 1): 1}),
        ({(0, 1): 1, (1, 1): -1}, {(1, 0): 1, (1, 1): 1}, {(0, 0): 1}),
    ]
    u, v, w = zip(*products)
    return BilinearAlgorithm(DimensionTriple(2, 2, 2), 7, u, v, w)


def _bump(d: dict, key: tuple, delta: int) -> None:
    val = d.get(key, 0) + delta
    if val:
        d[key] = val
    else:
        d.pop(key, None)


def pan_aggregation(n: int) -> BilinearAlgorithm:
    """Shifted-partner aggregation for square n x n multiplication, n even.

    Rank n^3/2 + 3n^2.  Writing ' for a subscript shifted by one modulo n,
    each index triple (i, j, h) of even parity i+j+h contributes one
    aggregate product

        (a_ij + a_h'i') (b_jh + b_i'j') (d_hi + d_j'h'),

    which expands to the wanted term a_ij b_jh d_hi, the shifted image of
    the wanted term at the odd-parity triple (h', i', j'), and six cross
    terms.  Each cross term degenerates in one of the three indices, so
    three families of n^2 cheap correction products - one per free index
    pair, each aggregating the degenerate factor over its lost index -
    cancel them:

      (1) a_h'i' (sum over even j of b_jh + b_i'j') d_hi     per (i, h)
      (2) a_ij b_i'j' (sum over even h of d_hi + d_j'h')     per (i, j)
      (3) (sum over even i of a_ij + a_h'i') b_jh d_j'h'     per (j, h)

    all carried with weight -1 on the output side.  "Even j" abbreviates
    i+j+h even for the fixed values of the other two indices.

    Coefficients accumulate as a multiset: when shifting makes two formal
    terms land on the same matrix entry (wraparound makes this unavoidable
    for every n), their coefficients add, so entries of magnitude 2 occur.
    """
    if not isinstance(n, int) or n < 2 or n % 2:
        raise BadArgument(f"aggregation scheme requires even n >= 2, got {n!r}")

    u, v, w = [], [], []

    def product(ua: dict, vb: dict, wd: dict) -> None:
        u.append(ua)
        v.append(vb)
        w.append(wd)

    # Aggregate products, one per even-parity triple.  The d factor d_xy
    # lands at output entry (y, x): output coefficients follow c_lq while
    # the trace form reads d_ql.
    for i in range(n):
        for j in range(n):
            for h in range(n):
                if (i + j + h) % 2:
                    continue
                i1, j1, h1 = (i + 1) % n, (j + 1) % n, (h + 1) % n
                ua: dict = {}
                vb: dict = {}
                wd: dict = {}
                _bump(ua, (i, j), 1)
                _bump(ua, (h1, i1), 1)
                _bump(vb, (j, h), 1)
                _bump(vb, (i1, j1), 1)
                _bump(wd, (i, h), 1)
                _bump(wd, (h1, j1), 1)
                product(ua, vb, wd)

    # Correction family (1): kills cross terms degenerate in j.
    for i in range(n):
        for h in range(n):
            i1, h1 = (i + 1) % n, (h + 1) % n
            vb = {}
            for j in range(n):
                if (i + j + h) % 2:
                    continue
                _bump(vb, (j, h), 1)
                _bump(vb, (i1, (j + 1) % n), 1)
            product({(h1, i1): 1}, vb, {(i, h): -1})

    # Correction family (2): kills cross terms degenerate in h.
    for i in range(n):
        for j in range(n):
            i1, j1 = (i + 1) % n, (j + 1) % n
            wd = {}
            for h in range(n):
                if (i + j + h) % 2:
                    continue
                _bump(wd, (i, h), -1)
                _bump(wd, ((h + 1) % n, j1), -1)
            product({(i, j): 1}, {(i1, j1): 1}, wd)

    # Correction family (3): kills cross terms degenerate in i.
    for j in range(n):
        for h in range(n):
            j1, h1 = (j + 1) % n, (h + 1) % n
            ua = {}
            for i in range(n):
                if (i + j + h) % 2:
                    continue
                _bump(ua, (i, j), 1)
                _bump(ua, (h1, (i + 1) % n), 1)
            product(ua, {(j, h): 1}, {(h1, j1): -1})

    rank = n**3 // 2 + 3 * n**2
    return BilinearAlgorithm(DimensionTriple(n, n, n), rank, u, v, w)
