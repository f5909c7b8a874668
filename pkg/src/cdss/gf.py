"""GF(2^w) arithmetic and dense linear algebra over it.

Field elements are plain ints in [0, 2^w) whose binary digits are the
coefficients of a polynomial residue; addition is XOR and multiplication
is carried out through precomputed exp/log tables, so every operation is
exact and bit-reproducible.

Default reduction polynomials (one per width, all primitive):

    w=1  : x + 1                      0b11
    w=2  : x^2 + x + 1                0b111
    w=3  : x^3 + x + 1                0b1011
    w=4  : x^4 + x + 1                0b10011
    w=5  : x^5 + x^2 + 1              0b100101
    w=6  : x^6 + x + 1                0b1000011
    w=7  : x^7 + x^3 + 1              0b10001001
    w=8  : x^8 + x^4 + x^3 + x^2 + 1  0x11d
    w=9  : x^9 + x^4 + 1              0x211
    w=10 : x^10 + x^3 + 1             0x409
    w=11 : x^11 + x^2 + 1             0x805
    w=12 : x^12 + x^6 + x^4 + x + 1   0x1053
    w=13 : x^13 + x^4 + x^3 + x + 1   0x201b
    w=14 : x^14 + x^10 + x^6 + x + 1  0x4443
    w=15 : x^15 + x + 1               0x8003
    w=16 : x^16 + x^12 + x^3 + x + 1  0x1100b

Primitivity is re-verified every time a table is built: the element x
must cycle through all 2^w - 1 nonzero residues before returning to 1.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import FieldTooSmallError, NonPrimitivePolynomialError, SingularMatrixError

DEFAULT_POLY: dict[int, int] = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}

MAX_WIDTH = 16


class GF:
    """The field GF(2^w) for a given primitive polynomial.

    Immutable after construction; all methods are pure functions on ints.
    """

    def __init__(self, width: int, poly: int | None = None) -> None:
        if not 1 <= width <= MAX_WIDTH:
            raise ValueError(f"width must be in [1, {MAX_WIDTH}], got {width}")
        if poly is None:
            poly = DEFAULT_POLY[width]
        if poly.bit_length() != width + 1:
            raise ValueError(
                f"polynomial 0x{poly:x} has degree {poly.bit_length() - 1}, expected {width}"
            )
        self.width = width
        self.poly = poly
        self.order = 1 << width
        om1 = self.order - 1
        exp = [0] * (2 * om1 if om1 > 1 else 2)
        log = [-1] * self.order
        x = 1
        for i in range(om1):
            if log[x] != -1:
                raise NonPrimitivePolynomialError(
                    f"0x{poly:x}: x cycles after {i} steps, needs {om1}"
                )
            exp[i] = x
            log[x] = i
            x = self._mul_raw(x, 2)
        if x != 1:
            raise NonPrimitivePolynomialError(
                f"0x{poly:x}: x^{om1} = {x}, expected 1"
            )
        for i in range(om1, len(exp)):
            exp[i] = exp[i - om1]
        self._exp = exp
        self._log = log

    def _mul_raw(self, a: int, b: int) -> int:
        """Carryless polynomial product reduced mod poly (no tables)."""
        p = 0
        while b:
            if b & 1:
                p ^= a
            b >>= 1
            a <<= 1
            if a & self.order:
                a ^= self.poly
        return p

    def add(self, a: int, b: int) -> int:
        return a ^ b

    # characteristic 2: subtraction is addition
    sub = add

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return self._exp[self.order - 1 - self._log[a]]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by 0")
        if a == 0:
            return 0
        return self._exp[self._log[a] + self.order - 1 - self._log[b]]

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            raise ValueError("negative exponent")
        if a == 0:
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def elements(self) -> range:
        return range(self.order)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GF) and (self.width, self.poly) == (other.width, other.poly)

    def __hash__(self) -> int:
        return hash((self.width, self.poly))

    def __repr__(self) -> str:
        return f"GF(2^{self.width}, poly=0x{self.poly:x})"


@dataclass(frozen=True)
class Matrix:
    """Dense row-major matrix over a GF(2^w) field."""

    field: GF
    rows: int
    cols: int
    data: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rows <= 0 or self.cols <= 0:
            raise ValueError("matrix dimensions must be positive")
        if len(self.data) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.data)}"
            )
        order = self.field.order
        if any(not 0 <= v < order for v in self.data):
            raise ValueError("entry out of field range")

    @classmethod
    def from_rows(cls, field: GF, rows: Sequence[Sequence[int]]) -> "Matrix":
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(field, len(rows), ncols, tuple(v for r in rows for v in r))

    @classmethod
    def identity(cls, field: GF, n: int) -> "Matrix":
        return cls(field, n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    def at(self, i: int, j: int) -> int:
        return self.data[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.data[i * self.cols : (i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols) or self.field != other.field:
            raise ValueError("shape or field mismatch")
        return Matrix(self.field, self.rows, self.cols,
                      tuple(a ^ b for a, b in zip(self.data, other.data)))

    def scaled(self, c: int) -> "Matrix":
        mul = self.field.mul
        return Matrix(self.field, self.rows, self.cols, tuple(mul(c, v) for v in self.data))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        if self.field != other.field:
            raise ValueError("field mismatch")
        mul = self.field.mul
        out = []
        orows = other.to_rows()
        for i in range(self.rows):
            srow = self.row(i)
            acc = [0] * other.cols
            for t, a in enumerate(srow):
                if a:
                    orow = orows[t]
                    for j in range(other.cols):
                        b = orow[j]
                        if b:
                            acc[j] ^= mul(a, b)
            out.extend(acc)
        return Matrix(self.field, self.rows, other.cols, tuple(out))

    def mul_vec(self, vec: Sequence[int]) -> list[int]:
        """Matrix-vector product; vec has one entry per column."""
        if len(vec) != self.cols:
            raise ValueError(f"expected vector of length {self.cols}, got {len(vec)}")
        mul = self.field.mul
        out = []
        for i in range(self.rows):
            acc = 0
            srow = self.row(i)
            for a, x in zip(srow, vec):
                if a and x:
                    acc ^= mul(a, x)
            out.append(acc)
        return out

    def submatrix(self, row_indices: Iterable[int], col_indices: Iterable[int]) -> "Matrix":
        """Rows and columns selected in the given order (0-based)."""
        rsel = list(row_indices)
        csel = list(col_indices)
        if len(set(rsel)) != len(rsel) or len(set(csel)) != len(csel):
            raise ValueError("indices must be distinct")
        for i in rsel:
            if not 0 <= i < self.rows:
                raise IndexError(f"row index {i} out of range")
        for j in csel:
            if not 0 <= j < self.cols:
                raise IndexError(f"column index {j} out of range")
        data = tuple(self.data[i * self.cols + j] for i in rsel for j in csel)
        return Matrix(self.field, len(rsel), len(csel), data)

    def rank(self) -> int:
        return _rank(self.field, self.to_rows())

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("only square matrices can be inverted")
        n = self.rows
        aug = [list(self.row(i)) + [1 if j == i else 0 for j in range(n)] for i in range(n)]
        _jordan(self.field, aug, n)
        return Matrix(self.field, n, n, tuple(aug[i][n + j] for i in range(n) for j in range(n)))

    def solve(self, rhs: Sequence[int]) -> list[int]:
        """Solve self @ x = rhs for square full-rank self."""
        if self.rows != self.cols:
            raise ValueError("solve requires a square coefficient matrix")
        if len(rhs) != self.rows:
            raise ValueError("rhs length mismatch")
        aug = [list(self.row(i)) + [rhs[i]] for i in range(self.rows)]
        _jordan(self.field, aug, self.rows)
        return [aug[i][self.rows] for i in range(self.rows)]


def _rank(field: GF, rows: list[list[int]]) -> int:
    """Rank by forward elimination with first-nonzero pivoting; consumes rows."""
    exp = field._exp
    log = field._log
    om1 = field.order - 1
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    rank = 0
    for col in range(ncols):
        if rank == nrows:
            break
        prow = -1
        for r in range(rank, nrows):
            if rows[r][col]:
                prow = r
                break
        if prow < 0:
            continue
        rows[rank], rows[prow] = rows[prow], rows[rank]
        pivot = rows[rank]
        pl = log[pivot[col]]
        for r in range(rank + 1, nrows):
            rr = rows[r]
            v = rr[col]
            if v:
                f = (log[v] - pl) % om1
                for c in range(col, ncols):
                    pv = pivot[c]
                    if pv:
                        rr[c] ^= exp[f + log[pv]]
        rank += 1
    return rank


def _jordan(field: GF, aug: list[list[int]], n: int) -> None:
    """In-place Gauss-Jordan on n leading columns of an augmented matrix."""
    exp = field._exp
    log = field._log
    om1 = field.order - 1
    width = len(aug[0])
    for col in range(n):
        prow = -1
        for r in range(col, n):
            if aug[r][col]:
                prow = r
                break
        if prow < 0:
            raise SingularMatrixError(f"no pivot in column {col}")
        aug[col], aug[prow] = aug[prow], aug[col]
        pivot = aug[col]
        pl = log[pivot[col]]
        if pl:  # normalize pivot row to leading 1
            f = om1 - pl
            for c in range(col, width):
                v = pivot[c]
                if v:
                    pivot[c] = exp[f + log[v]]
        for r in range(n):
            if r == col:
                continue
            rr = aug[r]
            v = rr[col]
            if v:
                fl = log[v]
                for c in range(col, width):
                    pv = pivot[c]
                    if pv:
                        rr[c] ^= exp[fl + log[pv]]


def cauchy_matrix(rows: int, cols: int, field: GF,
                  x_points: Sequence[int] | None = None,
                  y_points: Sequence[int] | None = None) -> Matrix:
    """Cauchy matrix with entry (i, j) = 1 / (x_i + y_j).

    Default point sets are x_i = i and y_j = rows + j (as field element
    encodings), which keeps generators deterministic across runs.  All
    2x2-and-larger square submatrices of the result are invertible, which
    the exhaustive checker below can confirm at desk scale.
    """
    if x_points is None:
        x_points = list(range(rows))
    if y_points is None:
        y_points = list(range(rows, rows + cols))
    pts = list(x_points) + list(y_points)
    if len(set(pts)) != rows + cols:
        raise ValueError("Cauchy point sets must be pairwise distinct")
    if any(not 0 <= p < field.order for p in pts):
        raise FieldTooSmallError(
            f"need {rows + cols} distinct elements, field has {field.order}"
        )
    inv = field.inv
    data = tuple(inv(x ^ y) for x in x_points for y in y_points)
    return Matrix(field, rows, cols, data)


def vandermonde_matrix(rows: int, cols: int, field: GF) -> Matrix:
    """Vandermonde matrix on the first `rows` field elements.

    Row i is [1, x_i, x_i^2, ...] with x_i = i, so any `cols` rows form an
    invertible square Vandermonde block.  Fits fields too small for a
    same-shape Cauchy matrix (needs only rows <= order).
    """
    if rows > field.order:
        raise FieldTooSmallError(f"need {rows} distinct elements, field has {field.order}")
    data = tuple(field.pow(x, e) for x in range(rows) for e in range(cols))
    return Matrix(field, rows, cols, data)


@dataclass(frozen=True)
class SquareSubmatrixCheck:
    """Outcome of a super-regularity audit."""

    ok: bool
    mode: str  # "exhaustive" or "sampled"
    checked: int
    failure: tuple[tuple[int, ...], tuple[int, ...]] | None = None

    def __bool__(self) -> bool:
        return self.ok


def count_square_submatrices(rows: int, cols: int) -> int:
    from math import comb

    return sum(comb(rows, s) * comb(cols, s) for s in range(1, min(rows, cols) + 1))


def all_square_submatrices_invertible(m: Matrix,
                                      max_exhaustive: int = 1_000_000,
                                      samples: int = 10_000,
                                      seed: int = 2024) -> SquareSubmatrixCheck:
    """True iff every square submatrix of m (all sizes, all index subsets)
    is invertible.

    Runs exhaustively when the submatrix count is at most max_exhaustive,
    otherwise falls back to seeded random sampling; the mode actually used
    is part of the result.
    """
    total = count_square_submatrices(m.rows, m.cols)
    parent = m.to_rows()
    field = m.field
    checked = 0
    if total <= max_exhaustive:
        for s in range(1, min(m.rows, m.cols) + 1):
            for rsel in itertools.combinations(range(m.rows), s):
                picked = [parent[i] for i in rsel]
                for csel in itertools.combinations(range(m.cols), s):
                    sub = [[prow[c] for c in csel] for prow in picked]
                    checked += 1
                    if _rank(field, sub) != s:
                        return SquareSubmatrixCheck(False, "exhaustive", checked, (rsel, csel))
        return SquareSubmatrixCheck(True, "exhaustive", checked)
    rng = random.Random(seed)
    smax = min(m.rows, m.cols)
    for _ in range(samples):
        s = rng.randint(1, smax)
        rsel = tuple(sorted(rng.sample(range(m.rows), s)))
        csel = tuple(sorted(rng.sample(range(m.cols), s)))
        sub = [[parent[i][c] for c in csel] for i in rsel]
        checked += 1
        if _rank(field, sub) != s:
            return SquareSubmatrixCheck(False, "sampled", checked, (rsel, csel))
    return SquareSubmatrixCheck(True, "sampled", checked)
