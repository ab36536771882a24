"""Exact integer linear algebra: rank, determinants, Smith normal form.

Everything runs on Python ints, so entry swell during elimination can never
overflow.  Matrices are small and dense; plain nested lists are used inside
the algorithms and :class:`IntMatrix` is the immutable value handed around.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

ROW_KINDS = ("swap_rows", "negate_row", "add_row_multiple")
COL_KINDS = ("swap_cols", "negate_col", "add_col_multiple")
INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entries do not match the declared shape")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], cols: int | None = None) -> IntMatrix:
        entries = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            if not entries:
                raise ValueError("cols must be given for a matrix with no rows")
            cols = len(entries[0])
        return cls(len(entries), cols, entries)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, size: int) -> IntMatrix:
        return cls(size, size, tuple(tuple(int(i == j) for j in range(size)) for i in range(size)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def transpose(self) -> IntMatrix:
        cols = tuple(tuple(row[j] for row in self.entries) for j in range(self.cols))
        return IntMatrix(self.cols, self.rows, cols)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols_b = list(zip(*other.entries)) if other.rows else [()] * other.cols
        prod = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in cols_b) for row in self.entries
        )
        return IntMatrix(self.rows, other.cols, prod)

    def to_json(self) -> dict:
        def enc(x):
            return x if -INT64_MAX - 1 <= x <= INT64_MAX else str(x)

        return {"rows": self.rows, "cols": self.cols, "entries": [[enc(x) for x in r] for r in self.entries]}

    @classmethod
    def from_json(cls, obj: dict) -> IntMatrix:
        m = cls.from_rows(([int(x) for x in r] for r in obj["entries"]), cols=obj["cols"])
        if m.rows != obj["rows"]:
            raise ValueError("row count does not match entries")
        return m


def as_matrix(M) -> IntMatrix:
    if isinstance(M, IntMatrix):
        return M
    return IntMatrix.from_rows(M)


@dataclass(frozen=True)
class ElementaryOp:
    """One elementary row or column operation.

    ``add_row_multiple(i, j, t)`` performs ``row_i += t * row_j``;
    ``add_col_multiple(i, j, t)`` performs ``col_i += t * col_j``.
    """

    kind: str
    i: int
    j: int | None = None
    multiplier: int | None = None

    def __post_init__(self):
        if self.kind not in ROW_KINDS + COL_KINDS:
            raise ValueError(f"unknown operation kind {self.kind!r}")
        if self.kind.startswith(("swap", "add")) and (self.j is None or self.i == self.j):
            raise ValueError(f"{self.kind} needs two distinct indices")
        if self.kind.startswith("add") and not self.multiplier:
            raise ValueError(f"{self.kind} needs a nonzero multiplier")

    @property
    def is_row(self) -> bool:
        return self.kind in ROW_KINDS

    def to_json(self) -> dict:
        d = {"kind": self.kind, "i": self.i}
        if self.j is not None:
            d["j"] = self.j
        if self.multiplier is not None:
            d["multiplier"] = self.multiplier
        return d


def apply_op(A: list[list[int]], op: ElementaryOp) -> None:
    """Apply ``op`` to the nested-list matrix ``A`` in place."""
    i, j, t = op.i, op.j, op.multiplier
    k = op.kind
    if k == "swap_rows":
        A[i], A[j] = A[j], A[i]
    elif k == "negate_row":
        A[i] = [-x for x in A[i]]
    elif k == "add_row_multiple":
        A[i] = [x + t * y for x, y in zip(A[i], A[j])]
    elif k == "swap_cols":
        for row in A:
            row[i], row[j] = row[j], row[i]
    elif k == "negate_col":
        for row in A:
            row[i] = -row[i]
    elif k == "add_col_multiple":
        for row in A:
            row[i] += t * row[j]


@dataclass(frozen=True)
class SmithDecomposition:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    invariant_factors: tuple[int, ...]
    op_log: tuple[ElementaryOp, ...] = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def to_json(self) -> dict:
        return {
            "U": self.U.to_json(),
            "D": self.D.to_json(),
            "V": self.V.to_json(),
            "invariant_factors": list(self.invariant_factors),
            "op_log": [op.to_json() for op in self.op_log],
        }


def _bareiss_rank(A: list[list[int]]) -> int:
    A = [row[:] for row in A]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    r = 0
    prev = 1
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                A[i][j] = (A[i][j] * p - A[i][c] * A[r][j]) // prev
            A[i][c] = 0
        prev = p
        r += 1
        if r == rows:
            break
    return r


def rank(M) -> int:
    """Rank over the rationals via fraction-free (Bareiss) elimination."""
    M = as_matrix(M)
    if M.rows == 0 or M.cols == 0:
        return 0
    return _bareiss_rank(M.tolist())


def determinant(M) -> int:
    """Exact determinant of a square matrix (Bareiss)."""
    M = as_matrix(M)
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    n = M.rows
    A = M.tolist()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if A[i][k]), None)
            if piv is None:
                return 0
            A[k], A[piv] = A[piv], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else 1


def _argmin_abs(A, t):
    best = None
    for i in range(t, len(A)):
        row = A[i]
        for j in range(t, len(row)):
            x = row[j]
            if x and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
    return best


def smith_normal_form(M) -> SmithDecomposition:
    """Smith normal form with unimodular ``U``, ``V`` such that ``U M V = D``.

    Pivot: nonzero entry of least absolute value in the active submatrix,
    ties to the lexicographically first (row, col).  Each operation is applied
    to the working matrix and to ``U`` (rows) or ``V`` (cols), and logged.
    """
    M = as_matrix(M)
    r, c = M.shape
    A = M.tolist()
    U = IntMatrix.identity(r).tolist()
    V = IntMatrix.identity(c).tolist()
    log: list[ElementaryOp] = []

    def do(op):
        apply_op(A, op)
        apply_op(U if op.is_row else V, op)
        log.append(op)

    t = 0
    while t < min(r, c):
        best = _argmin_abs(A, t)
        if best is None:
            break
        while True:
            _, pi, pj = best
            if pi != t:
                do(ElementaryOp("swap_rows", t, pi))
            if pj != t:
                do(ElementaryOp("swap_cols", t, pj))
            p = A[t][t]
            for i in range(t + 1, r):
                q = A[i][t] // p
                if q:
                    do(ElementaryOp("add_row_multiple", i, t, -q))
            for j in range(t + 1, c):
                q = A[t][j] // p
                if q:
                    do(ElementaryOp("add_col_multiple", j, t, -q))
            if any(A[i][t] for i in range(t + 1, r)) or any(A[t][j] for j in range(t + 1, c)):
                best = _argmin_abs(A, t)
                continue
            bad = next(
                (i for i in range(t + 1, r) for j in range(t + 1, c) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            do(ElementaryOp("add_row_multiple", t, bad, 1))
            best = _argmin_abs(A, t)
        if A[t][t] < 0:
            do(ElementaryOp("negate_row", t))
        t += 1

    D = IntMatrix.from_rows(A, cols=c)
    factors = tuple(A[i][i] for i in range(min(r, c)) if A[i][i])
    return SmithDecomposition(
        IntMatrix.from_rows(U, cols=r),
        D,
        IntMatrix.from_rows(V, cols=c),
        factors,
        tuple(log),
    )


def invariant_factors(M) -> tuple[int, ...]:
    return smith_normal_form(M).invariant_factors


def _leibniz_det(A: Sequence[Sequence[int]]) -> int:
    n = len(A)
    total = 0
    for perm in itertools.permutations(range(n)):
        # parity by counting inversions
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        prod = 1
        for i, p in enumerate(perm):
            prod *= A[i][p]
            if not prod:
                break
        total += -prod if inv & 1 else prod
    return total


def determinantal_divisors(M, max_dim: int = 6) -> list[int]:
    """``D_k`` = gcd of all ``k x k`` minors, for ``k = 1 .. min(rows, cols)``.

    Minors are expanded by the Leibniz formula so the result shares no code
    with the elimination routines it is used to check.
    """
    M = as_matrix(M)
    kmax = min(M.shape)
    if kmax > max_dim:
        raise ValueError(f"min(rows, cols) = {kmax} exceeds the minor enumeration bound {max_dim}")
    out = []
    for k in range(1, kmax + 1):
        g = 0
        for rs in itertools.combinations(range(M.rows), k):
            for cs in itertools.combinations(range(M.cols), k):
                g = math.gcd(g, _leibniz_det([[M.entries[i][j] for j in cs] for i in rs]))
        out.append(g)
    return out


def factors_from_divisors(divisors: Sequence[int]) -> tuple[int, ...]:
    """Invariant factors ``d_k = D_k / D_{k-1}`` for the nonzero divisors."""
    out = []
    prev = 1
    for d in divisors:
        if d == 0:
            break
        out.append(d // prev)
        prev = d
    return tuple(out)


def is_smith_form(D) -> bool:
    D = as_matrix(D)
    k = 0
    diag = []
    for i in range(D.rows):
        for j in range(D.cols):
            if i != j and D[i, j]:
                return False
    for i in range(min(D.shape)):
        diag.append(D[i, i])
    k = next((i for i, x in enumerate(diag) if x == 0), len(diag))
    if any(x <= 0 for x in diag[:k]) or any(diag[k:]):
        return False
    return all(diag[i + 1] % diag[i] == 0 for i in range(k - 1))


def verify_decomposition(M, s: SmithDecomposition) -> bool:
    """Check every invariant of a Smith decomposition of ``M`` exactly."""
    M = as_matrix(M)
    r, c = M.shape
    if s.U.shape != (r, r) or s.V.shape != (c, c) or s.D.shape != (r, c):
        return False
    if s.U @ M @ s.V != s.D:
        return False
    if abs(determinant(s.U)) != 1 or abs(determinant(s.V)) != 1:
        return False
    if not is_smith_form(s.D):
        return False
    diag = tuple(s.D[i, i] for i in range(min(r, c)) if s.D[i, i])
    if diag != tuple(s.invariant_factors):
        return False
    A = M.tolist()
    for op in s.op_log:
        n_axis = r if op.is_row else c
        if op.i >= n_axis or (op.j is not None and op.j >= n_axis):
            return False
        apply_op(A, op)
    return A == s.D.tolist()
