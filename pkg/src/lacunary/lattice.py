"""Exact integer matrices: Hermite normal form, primitivity, unimodular
completion, small kernel vectors.

Entries are Python ints, so nothing here overflows. The only numpy use is
the vectorized box scan in :func:`kernel_basis`, and it falls back to
object arrays when the products could leave the int64 range.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import List, Mapping, Sequence, Tuple

import numpy as np

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class IntMatrix:
    """Row-major integer matrix with explicit shape (so ``N x 0`` is representable)."""

    nrows: int
    ncols: int
    data: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.data) != self.nrows or any(len(r) != self.ncols for r in self.data):
            raise ValueError("IntMatrix data does not match its shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "IntMatrix":
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(rows[0])
        return cls(len(rows), ncols, rows)

    @classmethod
    def column(cls, v: Sequence[int]) -> "IntMatrix":
        return cls.from_rows([[x] for x in v], 1)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, r: int, c: int) -> "IntMatrix":
        return cls(r, c, tuple((0,) * c for _ in range(r)))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self.data)

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.ncols, self.nrows,
                         tuple(tuple(r[j] for r in self.data) for j in range(self.ncols)))

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = [other.col(j) for j in range(other.ncols)]
            return IntMatrix(
                self.nrows, other.ncols,
                tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.data),
            )
        v = tuple(other)
        if len(v) != self.ncols:
            raise ValueError(f"shape mismatch {self.shape} @ vector of length {len(v)}")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.data)

    def max_abs(self) -> int:
        return max((abs(x) for r in self.data for x in r), default=0)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix(len(rows), len(cols),
                         tuple(tuple(self.data[i][j] for j in cols) for i in rows))

    def det(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        return bareiss_det([list(r) for r in self.data])

    def to_json(self) -> dict:
        return {"rows": self.nrows, "cols": self.ncols,
                "entries": [str(x) for r in self.data for x in r]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "IntMatrix":
        try:
            r, c = int(obj["rows"]), int(obj["cols"])
            flat = [int(x) for x in obj["entries"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed matrix JSON: {exc!r}") from exc
        if len(flat) != r * c:
            raise ValueError(f"matrix JSON has {len(flat)} entries, expected {r * c}")
        return cls(r, c, tuple(tuple(flat[i * c:(i + 1) * c]) for i in range(r)))

    def __str__(self) -> str:
        return "[" + ", ".join("(" + ", ".join(map(str, r)) + ")" for r in self.data) + "]"


def bareiss_det(m: List[List[int]]) -> int:
    """Fraction-free determinant of a square integer matrix."""
    n = len(m)
    if n == 0:
        return 1
    m = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


# ---------------------------------------------------------------------------
# Hermite normal form


def _hnf_tracked(A: IntMatrix) -> Tuple[List[List[int]], List[List[int]], List[List[int]]]:
    """Row HNF with ``U`` and ``U^{-1}`` tracked: returns ``(H, U, Uinv)``."""
    r, c = A.shape
    H = [list(row) for row in A.data]
    U = [[int(i == j) for j in range(r)] for i in range(r)]
    Ui = [[int(i == j) for j in range(r)] for i in range(r)]

    def combine(i, k, a, b, cc, d):
        # rows (i, k) <- [[a, b], [cc, d]] @ rows (i, k), det = +-1
        for M in (H, U):
            ri, rk = M[i], M[k]
            M[i] = [a * x + b * y for x, y in zip(ri, rk)]
            M[k] = [cc * x + d * y for x, y in zip(ri, rk)]
        # inverse update acts on columns i, k of Uinv
        det = a * d - b * cc
        ia, ib, ic, id_ = d * det, -b * det, -cc * det, a * det
        for row in Ui:
            x, y = row[i], row[k]
            row[i] = x * ia + y * ic
            row[k] = x * ib + y * id_

    piv_row = 0
    for j in range(c):
        if piv_row >= r:
            break
        for k in range(piv_row + 1, r):
            if H[k][j] == 0:
                continue
            a, b = H[piv_row][j], H[k][j]
            g, x, y = xgcd(a, b)
            combine(piv_row, k, x, y, -b // g, a // g)
        if H[piv_row][j] == 0:
            continue
        if H[piv_row][j] < 0:
            H[piv_row] = [-x for x in H[piv_row]]
            U[piv_row] = [-x for x in U[piv_row]]
            for row in Ui:
                row[piv_row] = -row[piv_row]
        p = H[piv_row][j]
        for i in range(piv_row):
            q = H[i][j] // p
            if q:
                H[i] = [x - q * y for x, y in zip(H[i], H[piv_row])]
                U[i] = [x - q * y for x, y in zip(U[i], U[piv_row])]
                for row in Ui:
                    row[piv_row] += q * row[i]
        piv_row += 1
    return H, U, Ui


def hnf(A: IntMatrix) -> Tuple[IntMatrix, IntMatrix]:
    """Row Hermite normal form ``H = U @ A`` with ``U`` unimodular.

    Pivots are positive and entries above each pivot lie in ``[0, pivot)``.
    """
    H, U, _ = _hnf_tracked(A)
    r = A.nrows
    return IntMatrix(r, A.ncols, tuple(map(tuple, H))), IntMatrix(r, r, tuple(map(tuple, U)))


def is_primitive(A: IntMatrix) -> bool:
    """True iff the maximal minors of ``A`` (rows >= cols) have gcd 1."""
    r, c = A.shape
    if r < c:
        raise ValueError(f"is_primitive needs rows >= cols, got {A.shape}")
    H, _ = hnf(A)
    return all(H.data[i][j] == int(i == j) for i in range(r) for j in range(c))


def complete_to_unimodular(A: IntMatrix) -> IntMatrix:
    """Square matrix of determinant +-1 whose first columns equal ``A``.

    A single column gets a completion with entries bounded by ``max|A|``;
    wider matrices are completed through the inverse of the HNF transform.
    """
    if not is_primitive(A):
        raise ValueError("matrix is not primitive; no unimodular completion exists")
    if A.ncols == 1:
        cols = _complete_column(A.col(0))
        return IntMatrix.from_rows(list(zip(*cols)), len(cols))
    _, _, Ui = _hnf_tracked(A)
    return IntMatrix(A.nrows, A.nrows, tuple(map(tuple, Ui)))


def _complete_column(b: Sequence[int]) -> List[Vector]:
    """Columns of a unimodular matrix whose first column is the primitive ``b``.

    Built recursively on the prefix: if ``b = (g*c, b_n)`` with ``c``
    primitive and ``g*y - b_n*x = 1``, the completion of ``c`` plus the
    column ``(x*c, y)`` works, and every entry stays within ``max|b|``.
    """
    n = len(b)
    if n == 1:
        if abs(b[0]) != 1:
            raise ValueError("not primitive")
        return [tuple(b)]
    prefix, last = list(b[:-1]), b[-1]
    g = reduce(math.gcd, prefix, 0)
    if g == 0:
        # b = (0, ..., 0, +-1)
        return [tuple(b)] + [tuple(int(i == j) for i in range(n)) for j in range(n - 1)]
    c = [x // g for x in prefix]
    sub = _complete_column(c)
    # g*y - last*x = 1
    h, s, t = xgcd(g, -last)
    assert h == 1
    y, x = s, t
    cols = [tuple(b)]
    cols += [tuple(col) + (0,) for col in sub[1:]]
    cols.append(tuple(x * ci for ci in c) + (y,))
    return cols


def left_kernel(A: IntMatrix) -> IntMatrix:
    """Rows spanning ``{v : v @ A = 0}`` (saturated, from the HNF transform)."""
    H, U, _ = _hnf_tracked(A)
    rows = [U[i] for i in range(A.nrows) if not any(H[i])]
    return IntMatrix.from_rows(rows, A.nrows) if rows else IntMatrix.zeros(0, A.nrows)


def vector_gcd_split(a: Sequence[int]) -> Tuple[int, Vector]:
    d = reduce(math.gcd, a, 0)
    if d == 0:
        raise ValueError("vector_gcd_split of the zero vector")
    return d, tuple(x // d for x in a)


def sign_normalize(b: Sequence[int]) -> Vector:
    for x in b:
        if x:
            return tuple(b) if x > 0 else tuple(-y for y in b)
    return tuple(b)


def solve_factorization(B: IntMatrix, a: Sequence[int]) -> Vector:
    """The integer ``theta`` with ``B @ theta == a`` (``B`` of full column rank)."""
    if len(a) != B.nrows:
        raise ValueError("length mismatch")
    H, U, _ = _hnf_tracked(B)
    ua = [sum(x * y for x, y in zip(row, a)) for row in U]
    # H has echelon rows; with full column rank the first ncols rows are upper triangular
    c = B.ncols
    for i in range(B.nrows):
        if not any(H[i]) and ua[i]:
            raise ValueError("vector is not in the column span")
    rank = sum(1 for i in range(B.nrows) if any(H[i]))
    if rank < c:
        raise ValueError("matrix does not have full column rank")
    theta = [Fraction(0)] * c
    for i in reversed(range(c)):
        s = Fraction(ua[i]) - sum(H[i][j] * theta[j] for j in range(i + 1, c))
        theta[i] = s / H[i][i]
    if any(t.denominator != 1 for t in theta):
        raise ValueError("non-integral solution")
    return tuple(int(t) for t in theta)


# ---------------------------------------------------------------------------
# small kernel vectors


@lru_cache(maxsize=64)
def _box(dim: int, bound: int) -> np.ndarray:
    rng = np.arange(-bound, bound + 1, dtype=np.int64)
    if dim == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*([rng] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def kernel_basis(a: Sequence[int], bound: int) -> List[Vector]:
    """All primitive ``b`` with ``|b| <= bound`` and ``<a, b> = 0``, first
    nonzero coordinate positive, in lexicographic order."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    a = [int(x) for x in a]
    n = len(a)
    if n == 0:
        return []
    big = max((abs(x) for x in a), default=0) * bound * n >= 2 ** 62
    prefix = _box(n - 1, bound)
    if big:
        prefix = prefix.astype(object)
        head = np.array(a[:-1], dtype=object)
    else:
        head = np.array(a[:-1], dtype=np.int64)
    s = prefix @ head if n > 1 else np.zeros(len(prefix), dtype=prefix.dtype)
    last = a[-1]
    if last != 0:
        ok = (s % last) == 0
        cand_prefix, cand_s = prefix[ok], s[ok]
        tail = -(cand_s // last)
        keep = np.abs(tail) <= bound
        cand = np.concatenate([cand_prefix[keep], tail[keep].reshape(-1, 1)], axis=1)
    else:
        zero = prefix[s == 0]
        tails = np.arange(-bound, bound + 1).astype(zero.dtype)
        cand = np.concatenate(
            [np.repeat(zero, len(tails), axis=0), np.tile(tails, len(zero)).reshape(-1, 1)], axis=1
        )
    out = set()
    for row in cand.tolist():
        v = tuple(int(x) for x in row)
        if not any(v):
            continue
        if reduce(math.gcd, v, 0) != 1:
            continue
        out.add(sign_normalize(v))
    return sorted(out)


def box_vectors(n: int, bound: int) -> List[Vector]:
    """Primitive sign-normalized vectors of ``Z^n`` with ``|v| <= bound``, lex order."""
    out = set()
    for v in itertools.product(range(-bound, bound + 1), repeat=n):
        if any(v) and reduce(math.gcd, v, 0) == 1:
            out.add(sign_normalize(v))
    return sorted(out)


def unimodular_inverse(M: IntMatrix) -> IntMatrix:
    """Exact integer inverse of a square matrix with determinant +-1."""
    if M.nrows != M.ncols:
        raise ValueError("matrix is not square")
    H, U, _ = _hnf_tracked(M)
    n = M.nrows
    if any(H[i][j] != int(i == j) for i in range(n) for j in range(n)):
        raise ValueError("matrix is not unimodular")
    return IntMatrix(n, n, tuple(map(tuple, U)))
