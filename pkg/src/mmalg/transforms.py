"""Symmetry operations on bilinear programs.

Three families:

* duality - the trace form sum a_ij b_jh d_hi is invariant under cyclic
  rotation of its three factors and under transposition of all of them, so
  any correct program yields six (generally distinct) programs of the same
  rank, one per permutation of the dimension triple;
* tensor product - running one program with blocks handed to another, which
  multiplies both dimensions and ranks, turning rectangular schemes into
  square ones (squareify);
* equivalence - a change of basis on each of the three matrix spaces plus a
  relabeling of the products, which preserves correctness and rank exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .bilinear_core import (
    BilinearAlgorithm,
    DimensionTriple,
    verify_brent,
)
from .errors import BadArgument, BadTransform, FormatError, InvalidAlgorithm
from .exact_algebra import Matrix, QQ, format_matrix, mat_classical_multiply, mat_inverse


def _t(d: dict) -> dict:
    return {(c, r): val for (r, c), val in d.items()}


def _cyclic(alg: BilinearAlgorithm) -> BilinearAlgorithm:
    """Rotate the roles (A,B,D) -> (B,D,A): dims (m,k,n) -> (k,n,m)."""
    m, k, n = alg.dims
    return BilinearAlgorithm(
        DimensionTriple(k, n, m),
        alg.rank,
        [dict(d) for d in alg.v],
        [_t(d) for d in alg.w],
        [_t(d) for d in alg.u],
    )


def _swap(alg: BilinearAlgorithm) -> BilinearAlgorithm:
    """Transpose all three factors: dims (m,k,n) -> (m,n,k)."""
    m, k, n = alg.dims
    return BilinearAlgorithm(
        DimensionTriple(m, n, k),
        alg.rank,
        [dict(d) for d in alg.w],
        [_t(d) for d in alg.v],
        [dict(d) for d in alg.u],
    )


class DualityPermutation(Enum):
    """The six duals, named by the dimension triple of the result."""

    MKN = "mkn"
    KNM = "knm"
    NMK = "nmk"
    MNK = "mnk"
    NKM = "nkm"
    KMN = "kmn"

    def target_dims(self, dims: DimensionTriple) -> DimensionTriple:
        m, k, n = dims
        lookup = {"m": m, "k": k, "n": n}
        a, b, c = self.value
        return DimensionTriple(lookup[a], lookup[b], lookup[c])


_DUAL_STEPS = {
    DualityPermutation.MKN: (),
    DualityPermutation.KNM: (_cyclic,),
    DualityPermutation.NMK: (_cyclic, _cyclic),
    DualityPermutation.MNK: (_swap,),
    DualityPermutation.NKM: (_swap, _cyclic),
    DualityPermutation.KMN: (_swap, _cyclic, _cyclic),
}


def dual(alg: BilinearAlgorithm, perm) -> BilinearAlgorithm:
    """Return the dual program for the given permutation (enum or its string value).

    The input must verify; the output then verifies by construction and has
    the same rank.
    """
    if isinstance(perm, str):
        try:
            perm = DualityPermutation(perm)
        except ValueError:
            raise BadArgument(
                f"unknown duality permutation {perm!r}; "
                f"expected one of {[p.value for p in DualityPermutation]}"
            ) from None
    if not isinstance(perm, DualityPermutation):
        raise BadArgument(f"expected a DualityPermutation, got {perm!r}")
    if not verify_brent(alg).valid:
        raise InvalidAlgorithm("dual of an invalid program is undefined")
    out = alg
    for step in _DUAL_STEPS[perm]:
        out = step(out)
    return out


def _tensor(a: BilinearAlgorithm, b: BilinearAlgorithm) -> BilinearAlgorithm:
    m1, k1, n1 = a.dims
    m2, k2, n2 = b.dims
    dims = DimensionTriple(m1 * m2, k1 * k2, n1 * n2)
    u, v, w = [], [], []
    for s1 in range(a.rank):
        u1, v1, w1 = a.u[s1], a.v[s1], a.w[s1]
        for s2 in range(b.rank):
            u2, v2, w2 = b.u[s2], b.v[s2], b.w[s2]
            u.append({
                (i1 * m2 + i2, j1 * k2 + j2): c1 * c2
                for (i1, j1), c1 in u1.items()
                for (i2, j2), c2 in u2.items()
            })
            v.append({
                (g1 * k2 + g2, h1 * n2 + h2): c1 * c2
                for (g1, h1), c1 in v1.items()
                for (g2, h2), c2 in v2.items()
            })
            w.append({
                (l1 * m2 + l2, q1 * n2 + q2): c1 * c2
                for (l1, q1), c1 in w1.items()
                for (l2, q2), c2 in w2.items()
            })
    return BilinearAlgorithm(dims, a.rank * b.rank, u, v, w)


def tensor_product(a: BilinearAlgorithm, b: BilinearAlgorithm) -> BilinearAlgorithm:
    """Blockwise composition: dims and ranks multiply, indices flatten row-major.

    Both inputs must verify.  tensor_product(x, classical(1,1,1)) == x exactly.
    """
    for side, name in ((a, "first"), (b, "second")):
        if not verify_brent(side).valid:
            raise InvalidAlgorithm(f"{name} operand fails verification")
    return _tensor(a, b)


def squareify(alg: BilinearAlgorithm) -> BilinearAlgorithm:
    """Tensor the program with its two cyclic duals: an (mkn)^3-sized square
    scheme of rank R^3 with the same exponent."""
    if not verify_brent(alg).valid:
        raise InvalidAlgorithm("cannot squareify an invalid program")
    c1 = _cyclic(alg)
    c2 = _cyclic(c1)
    return _tensor(_tensor(alg, c1), c2)


@dataclass(frozen=True)
class EquivalenceTransform:
    """Basis changes (sigma, gamma), (nabla, lam), (mu, beta) plus a product
    relabeling.

    Each pair must multiply to the identity (sigma*gamma == I etc.); perm is
    a 0-based bijection and product s of the result takes its coefficients
    from product perm[s] of the source.
    """

    sigma: Matrix
    gamma: Matrix
    nabla: Matrix
    lam: Matrix
    mu: Matrix
    beta: Matrix
    perm: tuple

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(self.perm))
        for left, right, name in (
            (self.sigma, self.gamma, "sigma/gamma"),
            (self.nabla, self.lam, "nabla/lam"),
            (self.mu, self.beta, "mu/beta"),
        ):
            if left.ring != QQ or right.ring != QQ:
                raise BadTransform(f"{name} must be rational matrices")
            if left.rows != left.cols or right.rows != right.cols or left.rows != right.rows:
                raise BadTransform(f"{name} must be square of equal size")
            if mat_classical_multiply(left, right) != Matrix.identity(QQ, left.rows):
                raise BadTransform(f"{name} do not multiply to the identity")
        if sorted(self.perm) != list(range(len(self.perm))):
            raise BadTransform("perm is not a bijection on 0..R-1")

    @classmethod
    def identity(cls, dims: DimensionTriple, rank: int) -> "EquivalenceTransform":
        m, k, n = dims
        return cls(
            Matrix.identity(QQ, m), Matrix.identity(QQ, m),
            Matrix.identity(QQ, k), Matrix.identity(QQ, k),
            Matrix.identity(QQ, n), Matrix.identity(QQ, n),
            tuple(range(rank)),
        )


def _dense(d: dict, rows: int, cols: int) -> Matrix:
    zero = Fraction(0)
    return Matrix(
        QQ, rows, cols,
        [d.get((r, c), zero) for r in range(rows) for c in range(cols)],
    )


def _sparse(mat: Matrix) -> dict:
    out = {}
    for r in range(mat.rows):
        for c in range(mat.cols):
            val = mat[r, c]
            if val:
                out[(r, c)] = val
    return out


def apply_equivalence(
    alg: BilinearAlgorithm, transform: EquivalenceTransform
) -> BilinearAlgorithm:
    """Change bases and relabel products; preserves correctness and rank.

    New coefficients: u-bar^s = sigma u^t(s) nabla^T, v-bar^s = lam^T v^t(s) mu^T,
    w-bar^s = gamma^T w^t(s) beta, with t(s) = perm[s].
    """
    m, k, n = alg.dims
    if transform.sigma.rows != m or transform.nabla.rows != k or transform.mu.rows != n:
        raise BadTransform(
            f"transform sized {transform.sigma.rows}/{transform.nabla.rows}/"
            f"{transform.mu.rows} does not fit a {alg.dims} program"
        )
    if len(transform.perm) != alg.rank:
        raise BadTransform(
            f"perm length {len(transform.perm)} does not match rank {alg.rank}"
        )
    nabla_t = transform.nabla.transpose()
    lam_t = transform.lam.transpose()
    mu_t = transform.mu.transpose()
    gamma_t = transform.gamma.transpose()
    u, v, w = [], [], []
    for s in range(alg.rank):
        src = transform.perm[s]
        u.append(_sparse(transform.sigma @ _dense(alg.u[src], m, k) @ nabla_t))
        v.append(_sparse(lam_t @ _dense(alg.v[src], k, n) @ mu_t))
        w.append(_sparse(gamma_t @ _dense(alg.w[src], m, n) @ transform.beta))
    return BilinearAlgorithm(alg.dims, alg.rank, u, v, w)


_DIAG_CHOICES = (
    Fraction(1), Fraction(-1), Fraction(2), Fraction(-2),
    Fraction(1, 2), Fraction(-1, 2), Fraction(3), Fraction(1, 3),
)


def _random_invertible(size: int, rng: random.Random) -> Matrix:
    # L * D * U with unit triangular L, U and nonzero diagonal D: invertible
    # by construction, entries stay small.
    lower = [[Fraction(1) if i == j else
              (Fraction(rng.randint(-2, 2)) if i > j else Fraction(0))
              for j in range(size)] for i in range(size)]
    upper = [[Fraction(1) if i == j else
              (Fraction(rng.randint(-2, 2)) if i < j else Fraction(0))
              for j in range(size)] for i in range(size)]
    diag = [rng.choice(_DIAG_CHOICES) for _ in range(size)]
    ld = [[lower[i][j] * diag[j] for j in range(size)] for i in range(size)]
    return mat_classical_multiply(Matrix.from_rows(QQ, ld), Matrix.from_rows(QQ, upper))


def random_equivalence(
    dims: DimensionTriple, rank: int, seed: int
) -> EquivalenceTransform:
    """Deterministic-per-seed random transform with invertible-by-construction
    basis matrices and a shuffled product relabeling."""
    if not isinstance(dims, DimensionTriple):
        dims = DimensionTriple(*dims)
    if rank < 1:
        raise BadArgument("rank must be positive")
    rng = random.Random(seed)
    sigma = _random_invertible(dims.m, rng)
    nabla = _random_invertible(dims.k, rng)
    mu = _random_invertible(dims.n, rng)
    perm = list(range(rank))
    rng.shuffle(perm)
    return EquivalenceTransform(
        sigma, mat_inverse(sigma),
        nabla, mat_inverse(nabla),
        mu, mat_inverse(mu),
        tuple(perm),
    )


# ---------------------------------------------------------------------------
# Transform text format.
#
# Header:  mmtrans-v1 m k n R
# Six labeled matrix blocks (sigma, gamma: m x m; nabla, lambda: k x k;
# mu, beta: n x n), each label on its own line followed by its rows, then a
# "perm" block with one line of R 1-based product indices.
# ---------------------------------------------------------------------------

_MAGIC = "mmtrans-v1"
_LABELS = ("sigma", "gamma", "nabla", "lambda", "mu", "beta")


def format_transform(transform: EquivalenceTransform, dims: DimensionTriple) -> str:
    mats = (transform.sigma, transform.gamma, transform.nabla,
            transform.lam, transform.mu, transform.beta)
    m, k, n = dims
    rank = len(transform.perm)
    lines = [f"{_MAGIC} {m} {k} {n} {rank}"]
    for label, mat in zip(_LABELS, mats):
        lines.append(label)
        body = format_matrix(mat).splitlines()[1:]  # drop the dims header
        lines.extend(body)
    lines.append("perm")
    lines.append(" ".join(str(s + 1) for s in transform.perm))
    return "\n".join(lines) + "\n"


def parse_transform(text: str) -> tuple[EquivalenceTransform, DimensionTriple]:
    lines = text.splitlines()
    rows = [(i + 1, line.strip()) for i, line in enumerate(lines) if line.strip()]
    if not rows:
        raise FormatError(1, "empty transform file")
    lineno, header = rows[0]
    tokens = header.split()
    if len(tokens) != 5 or tokens[0] != _MAGIC:
        raise FormatError(lineno, f"expected '{_MAGIC} m k n R' header")
    try:
        m, k, n, rank = (int(t) for t in tokens[1:])
    except ValueError:
        raise FormatError(lineno, "header dimensions must be integers") from None
    if min(m, k, n, rank) < 1:
        raise FormatError(lineno, "header dimensions must be positive")
    sizes = {"sigma": m, "gamma": m, "nabla": k, "lambda": k, "mu": n, "beta": n}
    pos = 1
    mats = {}
    for label in _LABELS:
        if pos >= len(rows) or rows[pos][1] != label:
            found = rows[pos][1] if pos < len(rows) else "end of file"
            raise FormatError(
                rows[pos][0] if pos < len(rows) else len(lines),
                f"expected block '{label}', found '{found}'",
            )
        pos += 1
        size = sizes[label]
        grid = []
        for _ in range(size):
            if pos >= len(rows):
                raise FormatError(len(lines), f"block '{label}' truncated")
            rlineno, line = rows[pos]
            tokens = line.split()
            if len(tokens) != size:
                raise FormatError(rlineno, f"expected {size} entries in '{label}' row")
            try:
                grid.append([Fraction(t) for t in tokens])
            except (ValueError, ZeroDivisionError):
                raise FormatError(rlineno, f"bad entry in '{label}' row") from None
            pos += 1
        mats[label] = Matrix.from_rows(QQ, grid)
    if pos >= len(rows) or rows[pos][1] != "perm":
        raise FormatError(
            rows[pos][0] if pos < len(rows) else len(lines), "expected 'perm' block"
        )
    pos += 1
    if pos >= len(rows):
        raise FormatError(len(lines), "perm line missing")
    plineno, pline = rows[pos]
    tokens = pline.split()
    if len(tokens) != rank:
        raise FormatError(plineno, f"perm needs {rank} entries, found {len(tokens)}")
    try:
        perm = tuple(int(t) - 1 for t in tokens)
    except ValueError:
        raise FormatError(plineno, "perm entries must be integers") from None
    if any(s < 0 or s >= rank for s in perm):
        raise FormatError(plineno, f"perm entries must lie in 1..{rank}")
    if pos + 1 < len(rows):
        raise FormatError(rows[pos + 1][0], "trailing content after perm")
    transform = EquivalenceTransform(
        mats["sigma"], mats["gamma"], mats["nabla"],
        mats["lambda"], mats["mu"], mats["beta"], perm,
    )
    return transform, DimensionTriple(m, k, n)


def load_transform(path) -> tuple[EquivalenceTransform, DimensionTriple]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_transform(fh.read())


def dump_transform(transform: EquivalenceTransform, dims: DimensionTriple, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_transform(transform, dims))
