"""Exact scalar and matrix arithmetic.

Everything in this package computes over an exact ring: arbitrary-precision
rationals (``QQ``) or a prime field (``PrimeField(p)``).  Rationals are
``fractions.Fraction`` values, which are always stored in lowest terms with a
positive denominator, so equality is plain structural equality.  Matrices are
dense, row-major and immutable.

A small text format for matrices is provided: a ``rows cols`` header line
followed by one whitespace-separated row per line, entries written as
integers or ``p/q`` fractions.  Writing and re-reading a matrix reproduces it
exactly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import BadField, DimensionError, FormatError, SingularMatrix

# Canonical exact scalar for coefficients: lowest terms, positive denominator.
Rational = Fraction

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for every n below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_KNOWN_PRIMES: set[int] = set()


def _require_prime(p: int) -> None:
    if p not in _KNOWN_PRIMES:
        if not isinstance(p, int) or not is_prime(p):
            raise BadField(f"modulus {p!r} is not prime")
        _KNOWN_PRIMES.add(p)


class ModularScalar:
    """An element of GF(p), stored reduced to [0, p).

    Arithmetic mixes freely with Python ints (reduced mod p).  Mixing two
    scalars with different moduli is an error.
    """

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        _require_prime(p)
        self.value = value % p
        self.p = p

    def _lift(self, other) -> Union[int, None]:
        if isinstance(other, ModularScalar):
            if other.p != self.p:
                raise ValueError(f"mixed moduli {self.p} and {other.p}")
            return other.value
        if isinstance(other, int):
            return other % self.p
        return None

    def __add__(self, other):
        v = self._lift(other)
        if v is None:
            return NotImplemented
        return ModularScalar(self.value + v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._lift(other)
        if v is None:
            return NotImplemented
        return ModularScalar(self.value - v, self.p)

    def __rsub__(self, other):
        v = self._lift(other)
        if v is None:
            return NotImplemented
        return ModularScalar(v - self.value, self.p)

    def __mul__(self, other):
        v = self._lift(other)
        if v is None:
            return NotImplemented
        return ModularScalar(self.value * v, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return ModularScalar(-self.value, self.p)

    def inverse(self) -> "ModularScalar":
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero in GF(p)")
        return ModularScalar(pow(self.value, self.p - 2, self.p), self.p)

    def __truediv__(self, other):
        v = self._lift(other)
        if v is None:
            return NotImplemented
        if v == 0:
            raise ZeroDivisionError("division by zero in GF(p)")
        return ModularScalar(self.value * pow(v, self.p - 2, self.p), self.p)

    def __rtruediv__(self, other):
        v = self._lift(other)
        if v is None:
            return NotImplemented
        return ModularScalar(v, self.p) / self

    def __eq__(self, other):
        if isinstance(other, ModularScalar):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"ModularScalar({self.value}, p={self.p})"

    def __str__(self):
        return str(self.value)


class RationalField:
    """The field of exact rationals.  Use the module-level singleton QQ."""

    zero = Fraction(0)
    one = Fraction(1)

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def from_rational(self, c: Fraction) -> Fraction:
        return Fraction(c)

    def coerce(self, x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} into QQ")

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash(RationalField)

    def __repr__(self):
        return "QQ"


QQ = RationalField()


class PrimeField:
    """GF(p) for prime p.  Primality is checked at construction."""

    def __init__(self, p: int):
        _require_prime(p)
        self.p = p
        self.zero = ModularScalar(0, p)
        self.one = ModularScalar(1, p)

    def from_int(self, n: int) -> ModularScalar:
        return ModularScalar(n, self.p)

    def from_rational(self, c: Fraction) -> ModularScalar:
        den = c.denominator % self.p
        if den == 0:
            raise ZeroDivisionError(f"denominator of {c} vanishes mod {self.p}")
        return ModularScalar(c.numerator * pow(den, self.p - 2, self.p), self.p)

    def coerce(self, x) -> ModularScalar:
        if isinstance(x, ModularScalar):
            if x.p != self.p:
                raise ValueError(f"mixed moduli {self.p} and {x.p}")
            return x
        if isinstance(x, int):
            return ModularScalar(x, self.p)
        if isinstance(x, Fraction):
            return self.from_rational(x)
        raise TypeError(f"cannot coerce {x!r} into GF({self.p})")

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


Ring = Union[RationalField, PrimeField]


class Matrix:
    """Dense immutable matrix over an exact ring, stored row-major."""

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring: Ring, rows: int, cols: int, entries: Iterable):
        if rows < 1 or cols < 1:
            raise DimensionError(f"matrix dimensions must be positive, got {rows}x{cols}")
        entries = tuple(entries)
        if len(entries) != rows * cols:
            raise DimensionError(
                f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}"
            )
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def from_rows(cls, ring: Ring, rows: Sequence[Sequence]) -> "Matrix":
        """Build from a list of row lists; entries are coerced into the ring."""
        if not rows or not rows[0]:
            raise DimensionError("matrix dimensions must be positive")
        width = len(rows[0])
        flat = []
        for row in rows:
            if len(row) != width:
                raise DimensionError("ragged rows")
            flat.extend(ring.coerce(x) for x in row)
        return cls(ring, len(rows), width, flat)

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Matrix":
        z, o = ring.zero, ring.one
        return cls(ring, n, n, [o if i == j else z for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, ring: Ring, rows: int, cols: int) -> "Matrix":
        return cls(ring, rows, cols, [ring.zero] * (rows * cols))

    @classmethod
    def from_blocks(cls, grid: Sequence[Sequence["Matrix"]]) -> "Matrix":
        """Assemble a block grid; blocks in a row share height, in a column width."""
        ring = grid[0][0].ring
        heights = [row[0].rows for row in grid]
        widths = [blk.cols for blk in grid[0]]
        for bi, row in enumerate(grid):
            if len(row) != len(widths):
                raise DimensionError("ragged block grid")
            for bj, blk in enumerate(row):
                if blk.rows != heights[bi] or blk.cols != widths[bj]:
                    raise DimensionError("block shapes do not tile")
        entries = []
        for bi, row in enumerate(grid):
            for r in range(heights[bi]):
                for blk in row:
                    base = r * blk.cols
                    entries.extend(blk.entries[base : base + blk.cols])
        return cls(ring, sum(heights), sum(widths), entries)

    def __getitem__(self, rc):
        r, c = rc
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(rc)
        return self.entries[r * self.cols + c]

    def to_rows(self) -> list:
        n = self.cols
        return [list(self.entries[i * n : (i + 1) * n]) for i in range(self.rows)]

    def _check_same_shape(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise TypeError("expected a Matrix")
        if self.ring != other.ring:
            raise ValueError("mixed rings")
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionError(
                f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )

    def __add__(self, other):
        self._check_same_shape(other)
        return Matrix(
            self.ring, self.rows, self.cols,
            [a + b for a, b in zip(self.entries, other.entries)],
        )

    def __sub__(self, other):
        self._check_same_shape(other)
        return Matrix(
            self.ring, self.rows, self.cols,
            [a - b for a, b in zip(self.entries, other.entries)],
        )

    def __neg__(self):
        return Matrix(self.ring, self.rows, self.cols, [-a for a in self.entries])

    def scale(self, s) -> "Matrix":
        return Matrix(self.ring, self.rows, self.cols, [s * a for a in self.entries])

    def __matmul__(self, other):
        return mat_classical_multiply(self, other)

    def transpose(self) -> "Matrix":
        e = self.entries
        n = self.cols
        return Matrix(
            self.ring, n, self.rows,
            [e[r * n + c] for c in range(n) for r in range(self.rows)],
        )

    def submatrix(self, r0: int, c0: int, rows: int, cols: int) -> "Matrix":
        if r0 < 0 or c0 < 0 or r0 + rows > self.rows or c0 + cols > self.cols:
            raise DimensionError("submatrix out of range")
        e = self.entries
        w = self.cols
        out = []
        for r in range(r0, r0 + rows):
            base = r * w + c0
            out.extend(e[base : base + cols])
        return Matrix(self.ring, rows, cols, out)

    def embed(self, rows: int, cols: int) -> "Matrix":
        """Return a rows x cols matrix with self in the top-left corner, zeros elsewhere."""
        if rows < self.rows or cols < self.cols:
            raise DimensionError("embedding target smaller than matrix")
        if rows == self.rows and cols == self.cols:
            return self
        z = self.ring.zero
        e = self.entries
        w = self.cols
        out = []
        for r in range(rows):
            if r < self.rows:
                out.extend(e[r * w : (r + 1) * w])
                out.extend([z] * (cols - w))
            else:
                out.extend([z] * cols)
        return Matrix(self.ring, rows, cols, out)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.ring, self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"<Matrix {self.rows}x{self.cols} over {self.ring!r}>"


def mat_classical_multiply(a: Matrix, b: Matrix) -> Matrix:
    """Plain triple-loop product; the ground truth other routines are tested against."""
    if not isinstance(a, Matrix) or not isinstance(b, Matrix):
        raise TypeError("expected matrices")
    if a.ring != b.ring:
        raise ValueError("mixed rings")
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    m, k, n = a.rows, a.cols, b.cols
    ae, be = a.entries, b.entries
    out = []
    for i in range(m):
        arow = ae[i * k : (i + 1) * k]
        for j in range(n):
            acc = arow[0] * be[j]
            for t in range(1, k):
                acc = acc + arow[t] * be[t * n + j]
            out.append(acc)
    return Matrix(a.ring, m, n, out)


def mat_inverse(a: Matrix) -> Matrix:
    """Exact Gauss-Jordan inverse with row pivoting.

    Works over any field ring; raises SingularMatrix when no inverse exists.
    """
    if a.rows != a.cols:
        raise DimensionError("only square matrices have inverses")
    n = a.rows
    ring = a.ring
    zero, one = ring.zero, ring.one
    work = a.to_rows()
    inv = Matrix.identity(ring, n).to_rows()
    for col in range(n):
        pivot_row = None
        for r in range(col, n):
            if work[r][col] != zero:
                pivot_row = r
                break
        if pivot_row is None:
            raise SingularMatrix(f"no pivot in column {col}")
        if pivot_row != col:
            work[col], work[pivot_row] = work[pivot_row], work[col]
            inv[col], inv[pivot_row] = inv[pivot_row], inv[col]
        piv = work[col][col]
        if piv != one:
            scale = one / piv
            work[col] = [scale * x for x in work[col]]
            inv[col] = [scale * x for x in inv[col]]
        for r in range(n):
            if r == col:
                continue
            factor = work[r][col]
            if factor == zero:
                continue
            work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
            inv[r] = [x - factor * y for x, y in zip(inv[r], inv[col])]
    return Matrix.from_rows(ring, inv)


def random_matrix(ring: Ring, rows: int, cols: int, rng) -> Matrix:
    """Uniform entries over GF(p); small random rationals over QQ."""
    if isinstance(ring, PrimeField):
        p = ring.p
        return Matrix(ring, rows, cols,
                      [ModularScalar(rng.randrange(p), p) for _ in range(rows * cols)])
    return Matrix(ring, rows, cols,
                  [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(rows * cols)])


def format_matrix(a: Matrix) -> str:
    """Render in the matrix text format; exact round-trip with parse_matrix."""
    lines = [f"{a.rows} {a.cols}"]
    for row in a.to_rows():
        lines.append(" ".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, ring: Ring = QQ) -> Matrix:
    """Parse the matrix text format.  Raises FormatError with a line number."""
    lines = text.splitlines()
    lineno = 0
    header = None
    for idx, raw in enumerate(lines, start=1):
        if raw.strip():
            header = raw.split()
            lineno = idx
            break
    if header is None:
        raise FormatError(1, "empty matrix file")
    if len(header) != 2:
        raise FormatError(lineno, "expected 'rows cols' header")
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError:
        raise FormatError(lineno, "expected 'rows cols' header") from None
    if rows < 1 or cols < 1:
        raise FormatError(lineno, "dimensions must be positive")
    body = []
    for idx in range(lineno, len(lines)):
        raw = lines[idx]
        if not raw.strip():
            continue
        body.append((idx + 1, raw.split()))
    if len(body) != rows:
        raise FormatError(len(lines) or 1, f"expected {rows} rows, found {len(body)}")
    flat = []
    for row_line, tokens in body:
        if len(tokens) != cols:
            raise FormatError(row_line, f"expected {cols} entries, found {len(tokens)}")
        for tok in tokens:
            try:
                flat.append(ring.from_rational(Fraction(tok)))
            except (ValueError, ZeroDivisionError):
                raise FormatError(row_line, f"bad entry {tok!r}") from None
    return Matrix(ring, rows, cols, flat)


def load_matrix(path, ring: Ring = QQ) -> Matrix:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix(fh.read(), ring)


def dump_matrix(a: Matrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix(a))
