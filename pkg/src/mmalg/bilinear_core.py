"""Bilinear matrix-multiplication programs and their verification.

A bilinear algorithm for multiplying an m x k matrix A by a k x n matrix B
is a list of R products P_s = (sum_ij u^s_ij a_ij) * (sum_gh v^s_gh b_gh)
together with output coefficients w, so that c_lq = sum_s w^s_lq P_s.  The
coefficient tensors are stored sparsely: one dict per product, keyed by the
index pair, holding nonzero exact rationals.

Correctness is equivalent to the coefficient equations

    sum_s u^s_ij v^s_gh w^s_lq = [i == l] [j == g] [h == q]

(one equation per (l, q, i, j, g, h)), checked exactly by verify_brent.
The same condition can be tested probabilistically through the trilinear
trace identity sum_s l_s(A) l'_s(B) l''_s(D) = trace(A B D) at random
matrices over GF(p), where the third linear form reads D transposed:
l''_s(D) = sum_lq w^s_lq d_ql with D of shape n x m.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import BadArgument, DimensionError, ExponentUndefined, FormatError
from .exact_algebra import Matrix, _require_prime

# A 61-bit Mersenne prime; default modulus for randomized identity checks.
DEFAULT_PRIME = 2**61 - 1


@dataclass(frozen=True)
class DimensionTriple:
    """Problem shape: multiply m x k by k x n."""

    m: int
    k: int
    n: int

    def __post_init__(self):
        for side in (self.m, self.k, self.n):
            if not isinstance(side, int) or side < 1:
                raise BadArgument(f"dimensions must be positive integers, got {self}")

    def __iter__(self):
        return iter((self.m, self.k, self.n))

    @property
    def volume(self) -> int:
        return self.m * self.k * self.n

    @property
    def is_square(self) -> bool:
        return self.m == self.k == self.n

    def __str__(self):
        return f"{self.m}x{self.k}x{self.n}"


def _clean_tensor(slices, rows: int, cols: int, name: str):
    out = []
    for s, entries in enumerate(slices):
        d = {}
        for (r, c), val in entries.items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise DimensionError(
                    f"{name}[{s}] entry ({r},{c}) outside {rows}x{cols}"
                )
            val = Fraction(val)
            if val:
                d[(r, c)] = val
        out.append(d)
    return tuple(out)


class BilinearAlgorithm:
    """An elementary bilinear program; structural validity is enforced here.

    Whether the program actually computes matrix multiplication is a separate
    question, answered by verify_brent / verify_trilinear_random.
    """

    __slots__ = ("dims", "rank", "u", "v", "w")

    def __init__(
        self,
        dims: DimensionTriple,
        rank: int,
        u: Sequence[Mapping],
        v: Sequence[Mapping],
        w: Sequence[Mapping],
    ):
        if not isinstance(dims, DimensionTriple):
            dims = DimensionTriple(*dims)
        if not isinstance(rank, int) or rank < 1:
            raise BadArgument(f"rank must be a positive integer, got {rank!r}")
        if len(u) != rank or len(v) != rank or len(w) != rank:
            raise DimensionError(
                f"rank {rank} needs {rank} coefficient slices per tensor, "
                f"got {len(u)}/{len(v)}/{len(w)}"
            )
        m, k, n = dims
        self.dims = dims
        self.rank = rank
        self.u = _clean_tensor(u, m, k, "u")
        self.v = _clean_tensor(v, k, n, "v")
        self.w = _clean_tensor(w, m, n, "w")

    def nonzero_counts(self) -> tuple[int, int, int]:
        return (
            sum(len(d) for d in self.u),
            sum(len(d) for d in self.v),
            sum(len(d) for d in self.w),
        )

    def coefficient_values(self) -> set:
        vals = set()
        for tensor in (self.u, self.v, self.w):
            for d in tensor:
                vals.update(d.values())
        return vals

    def __eq__(self, other):
        if not isinstance(other, BilinearAlgorithm):
            return NotImplemented
        return (
            self.dims == other.dims
            and self.rank == other.rank
            and self.u == other.u
            and self.v == other.v
            and self.w == other.w
        )

    def __hash__(self):
        return hash((self.dims, self.rank))

    def __repr__(self):
        return f"<BilinearAlgorithm {self.dims} rank {self.rank}>"


Violation = tuple  # ((l, q), (i, j), (g, h), expected, actual)


@dataclass(frozen=True)
class VerificationReport:
    valid: bool
    violations: tuple

    def __post_init__(self):
        if self.valid != (len(self.violations) == 0):
            raise BadArgument("valid flag inconsistent with violation list")


@dataclass(frozen=True)
class CostReport:
    bilinear_mults: int
    scalar_mults: int
    additions: int
    context: str = ""


def verify_brent(alg: BilinearAlgorithm) -> VerificationReport:
    """Check the coefficient equations exactly over the rationals.

    The triple sum is accumulated sparsely, touching only nonzero coefficient
    combinations, so cost is sum_s nnz(u_s) nnz(v_s) nnz(w_s) rather than the
    full (mkn)^2 grid.
    """
    sums: dict = {}
    for us, vs, ws in zip(alg.u, alg.v, alg.w):
        for (i, j), cu in us.items():
            for (g, h), cv in vs.items():
                cuv = cu * cv
                for (l, q), cw in ws.items():
                    key = (l, q, i, j, g, h)
                    prev = sums.get(key)
                    sums[key] = cuv * cw if prev is None else prev + cuv * cw
    one = Fraction(1)
    zero = Fraction(0)
    violations = []
    for key, val in sums.items():
        l, q, i, j, g, h = key
        expected = one if (i == l and j == g and h == q) else zero
        if val != expected:
            violations.append(((l, q), (i, j), (g, h), expected, val))
    m, k, n = alg.dims
    for l in range(m):
        for j in range(k):
            for q in range(n):
                if (l, q, l, j, j, q) not in sums:
                    violations.append(((l, q), (l, j), (j, q), one, zero))
    violations.sort()
    return VerificationReport(not violations, tuple(violations))


def verify_trilinear_random(
    alg: BilinearAlgorithm,
    trials: int = 20,
    prime: int = DEFAULT_PRIME,
    seed: Optional[int] = None,
) -> bool:
    """Randomized check of sum_s l_s(A) l'_s(B) l''_s(D) = trace(A B D) mod p.

    Each trial draws uniform A (m x k), B (k x n), D (n x m) over GF(p) and
    compares both sides.  A valid program never fails; an invalid one slips
    through a single trial with probability at most 3/p, so for a 61-bit
    prime even a handful of trials is conclusive in practice.
    """
    if not isinstance(trials, int) or trials < 1:
        raise BadArgument(f"trials must be a positive integer, got {trials!r}")
    _require_prime(prime)
    m, k, n = alg.dims
    if prime <= max(m, k, n, alg.rank):
        raise BadArgument(
            f"prime {prime} too small for a {alg.dims} rank-{alg.rank} program"
        )

    def embed(c: Fraction) -> int:
        den = c.denominator % prime
        if den == 0:
            raise ZeroDivisionError(f"coefficient {c} has no image mod {prime}")
        return c.numerator % prime * pow(den, prime - 2, prime) % prime

    u_flat = [[(i, j, embed(c)) for (i, j), c in d.items()] for d in alg.u]
    v_flat = [[(g, h, embed(c)) for (g, h), c in d.items()] for d in alg.v]
    w_flat = [[(q, l, embed(c)) for (l, q), c in d.items()] for d in alg.w]

    rng = random.Random(seed)
    p = prime
    for _ in range(trials):
        A = [[rng.randrange(p) for _ in range(k)] for _ in range(m)]
        B = [[rng.randrange(p) for _ in range(n)] for _ in range(k)]
        D = [[rng.randrange(p) for _ in range(m)] for _ in range(n)]
        lhs = 0
        for eu, ev, ew in zip(u_flat, v_flat, w_flat):
            la = sum(c * A[i][j] for i, j, c in eu) % p
            lb = sum(c * B[g][h] for g, h, c in ev) % p
            ld = sum(c * D[q][l] for q, l, c in ew) % p
            lhs += la * lb % p * ld
        lhs %= p
        rhs = 0
        for i in range(m):
            Ai = A[i]
            for h in range(n):
                ab = sum(Ai[j] * B[j][h] for j in range(k)) % p
                rhs += ab * D[h][i]
        rhs %= p
        if lhs != rhs:
            return False
    return True


class _OpCount:
    __slots__ = ("adds", "smults")

    def __init__(self):
        self.adds = 0
        self.smults = 0


def _linear_form(ring, coeffs: Mapping, mat: Matrix, cnt: _OpCount):
    acc = None
    for (r, c), co in coeffs.items():
        x = mat[r, c]
        if co == 1:
            term = x
        elif co == -1:
            term = -x
        else:
            term = ring.from_rational(co) * x
            cnt.smults += 1
        if acc is None:
            acc = term
        else:
            acc = acc + term
            cnt.adds += 1
    return ring.zero if acc is None else acc


def apply_elementary(alg: BilinearAlgorithm, a: Matrix, b: Matrix):
    """Run the program on concrete matrices; returns (product, CostReport).

    Operations are counted symbolically from the coefficient structure:
    one bilinear multiplication per product, a scalar multiplication for each
    coefficient outside {1, -1}, and an addition for each term beyond the
    first in any linear combination.
    """
    m, k, n = alg.dims
    if (a.rows, a.cols) != (m, k) or (b.rows, b.cols) != (k, n):
        raise DimensionError(
            f"{alg.dims} program cannot run on {a.rows}x{a.cols} * {b.rows}x{b.cols}"
        )
    if a.ring != b.ring:
        raise ValueError("mixed rings")
    ring = a.ring
    cnt = _OpCount()
    products = []
    for us, vs in zip(alg.u, alg.v):
        la = _linear_form(ring, us, a, cnt)
        lb = _linear_form(ring, vs, b, cnt)
        products.append(la * lb)

    by_output: dict = {}
    for s, ws in enumerate(alg.w):
        for lq, co in ws.items():
            by_output.setdefault(lq, []).append((s, co))

    entries = []
    for l in range(m):
        for q in range(n):
            acc = None
            for s, co in by_output.get((l, q), ()):
                x = products[s]
                if co == 1:
                    term = x
                elif co == -1:
                    term = -x
                else:
                    term = ring.from_rational(co) * x
                    cnt.smults += 1
                if acc is None:
                    acc = term
                else:
                    acc = acc + term
                    cnt.adds += 1
            entries.append(ring.zero if acc is None else acc)
    report = CostReport(
        bilinear_mults=alg.rank,
        scalar_mults=cnt.smults,
        additions=cnt.adds,
        context=f"elementary program {alg.dims} rank {alg.rank}",
    )
    return Matrix(ring, m, n, entries), report


def exponent(alg: BilinearAlgorithm) -> float:
    """Multiplication exponent 3 ln R / ln(mkn) of the scheme under recursion."""
    vol = alg.dims.volume
    if vol == 1:
        raise ExponentUndefined("1x1x1 has no exponent")
    return 3.0 * math.log(alg.rank) / math.log(vol)


@dataclass(frozen=True)
class RankBound:
    dims: DimensionTriple
    lower: Optional[int]
    upper: Optional[int]
    note: str = ""


def generic_lower_bound(dims: DimensionTriple) -> int:
    """Every correct program for m x k times k x n needs at least (m+n-1)k products."""
    return (dims.m + dims.n - 1) * dims.k


_TABLE = (
    RankBound(DimensionTriple(2, 2, 2), 7, 7, "tight: the rank-7 scheme is optimal"),
    RankBound(DimensionTriple(2, 3, 3), 15, 16, "gap of one between bounds"),
    RankBound(DimensionTriple(2, 3, 4), 19, None, "lower bound only"),
    RankBound(DimensionTriple(3, 3, 3), 18, None, "lower bound only"),
    RankBound(DimensionTriple(2, 4, 4), None, 27, "upper bound only"),
)


@dataclass(frozen=True)
class KnownRankBounds:
    entries: tuple = _TABLE
    rules: tuple = (
        "rank(2,2,n) >= 3n+2 for n >= 3",
        "rank(m,k,n) >= (m+n-1)k",
    )

    def lookup(self, dims: DimensionTriple) -> RankBound:
        """Best known bounds for literal dims (no permutation normalization)."""
        if not isinstance(dims, DimensionTriple):
            dims = DimensionTriple(*dims)
        lower = generic_lower_bound(dims)
        upper = None
        notes = ["(m+n-1)k"]
        if dims.m == 2 and dims.k == 2 and dims.n >= 3:
            special = 3 * dims.n + 2
            if special > lower:
                lower = special
                notes = ["3n+2"]
        for row in self.entries:
            if row.dims == dims:
                if row.lower is not None and row.lower > lower:
                    lower = row.lower
                    notes = ["table"]
                upper = row.upper
                break
        return RankBound(dims, lower, upper, "source: " + ", ".join(notes))


def known_bounds() -> KnownRankBounds:
    return KnownRankBounds()


def sanity_rank_lower_bound(alg: BilinearAlgorithm) -> bool:
    """True when the program's rank respects the generic lower bound."""
    return alg.rank >= generic_lower_bound(alg.dims)


# ---------------------------------------------------------------------------
# Algorithm text format.
#
# Header line:  mmalg-v1 m k n R
# Then, for each product s = 1..R, three labeled blocks
#     U / V / W, each holding lines "i j value" (0-based indices, value an
# integer or p/q fraction).  The canonical writer sorts entries within a
# block and separates products by a blank line; the reader accepts entries
# in any order and arbitrary blank lines.
# ---------------------------------------------------------------------------

_MAGIC = "mmalg-v1"


def format_algorithm(alg: BilinearAlgorithm) -> str:
    m, k, n = alg.dims
    lines = [f"{_MAGIC} {m} {k} {n} {alg.rank}"]
    for s in range(alg.rank):
        if s:
            lines.append("")
        for label, d in (("U", alg.u[s]), ("V", alg.v[s]), ("W", alg.w[s])):
            lines.append(label)
            for (r, c) in sorted(d):
                lines.append(f"{r} {c} {d[(r, c)]}")
    return "\n".join(lines) + "\n"


def parse_algorithm(text: str) -> BilinearAlgorithm:
    lines = text.splitlines()
    total = len(lines)
    pos = 0
    header = None
    while pos < total:
        raw = lines[pos]
        pos += 1
        if raw.strip():
            header = raw.split()
            header_line = pos
            break
    if header is None:
        raise FormatError(1, "empty algorithm file")
    if len(header) != 5 or header[0] != _MAGIC:
        raise FormatError(header_line, f"expected '{_MAGIC} m k n R' header")
    try:
        m, k, n, rank = (int(t) for t in header[1:])
    except ValueError:
        raise FormatError(header_line, "header dimensions must be integers") from None
    if min(m, k, n, rank) < 1:
        raise FormatError(header_line, "header dimensions must be positive")

    shapes = {"U": (m, k), "V": (k, n), "W": (m, n)}
    order = ("U", "V", "W")
    u, v, w = [], [], []
    dest = {"U": u, "V": v, "W": w}
    current = None  # (label, dict)
    blocks_seen = 0

    for idx in range(pos, total):
        raw = lines[idx]
        lineno = idx + 1
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped in shapes:
            want = order[blocks_seen % 3]
            if stripped != want:
                raise FormatError(lineno, f"expected block '{want}', found '{stripped}'")
            if blocks_seen >= 3 * rank:
                raise FormatError(lineno, f"more than {rank} products in file")
            current = (stripped, {})
            dest[stripped].append(current[1])
            blocks_seen += 1
            continue
        if current is None:
            raise FormatError(lineno, "coefficient entry before any block label")
        tokens = stripped.split()
        if len(tokens) != 3:
            raise FormatError(lineno, "expected 'i j value'")
        try:
            r, c = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise FormatError(lineno, "indices must be integers") from None
        try:
            val = Fraction(tokens[2])
        except (ValueError, ZeroDivisionError):
            raise FormatError(lineno, f"bad coefficient {tokens[2]!r}") from None
        label, block = current
        rows, cols = shapes[label]
        if not (0 <= r < rows and 0 <= c < cols):
            raise FormatError(
                lineno, f"index ({r},{c}) outside {rows}x{cols} block '{label}'"
            )
        if (r, c) in block:
            raise FormatError(lineno, f"duplicate entry ({r},{c}) in block '{label}'")
        block[(r, c)] = val

    if blocks_seen != 3 * rank:
        raise FormatError(
            total or 1,
            f"file ends after {blocks_seen} blocks; rank {rank} needs {3 * rank}",
        )
    return BilinearAlgorithm(DimensionTriple(m, k, n), rank, u, v, w)


def load_algorithm(path) -> BilinearAlgorithm:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_algorithm(fh.read())


def dump_algorithm(alg: BilinearAlgorithm, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_algorithm(alg))
