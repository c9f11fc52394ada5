"""A small dict-of-rows sparse matrix that works with exact or float scalars."""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np
from gmpy2 import mpq

from .errors import ShapeError


class SparseOperator:
    """Sparse matrix with optional row and column labels.

    Entries are stored as ``{row: {col: value}}`` with zeros dropped.  Values
    are ``mpq`` in exact mode or ``float`` in float mode; mixing is allowed
    but the result of arithmetic follows Python promotion rules.

    Parameters
    ----------
    shape : (int, int)
    rows : dict, optional
        Initial ``{row: {col: value}}`` data (copied, zeros removed).
    row_labels, col_labels : sequence, optional
        Basis labels, e.g. arrow tuples or DCB vectors.
    """

    __slots__ = ("shape", "rows", "row_labels", "col_labels")

    def __init__(self, shape, rows=None, row_labels=None, col_labels=None):
        self.shape = (int(shape[0]), int(shape[1]))
        self.rows: dict[int, dict[int, object]] = {}
        if rows:
            for i, r in rows.items():
                rr = {j: v for j, v in r.items() if v != 0}
                if rr:
                    self.rows[i] = rr
        self.row_labels = list(row_labels) if row_labels is not None else None
        self.col_labels = list(col_labels) if col_labels is not None else None
        if self.row_labels is not None and len(self.row_labels) != self.shape[0]:
            raise ShapeError("row label count does not match shape")
        if self.col_labels is not None and len(self.col_labels) != self.shape[1]:
            raise ShapeError("column label count does not match shape")

    # construction
    @classmethod
    def identity(cls, n: int, one=mpq(1), labels=None) -> "SparseOperator":
        return cls((n, n), {i: {i: one} for i in range(n)}, labels, labels)

    @classmethod
    def zeros(cls, shape) -> "SparseOperator":
        return cls(shape)

    @classmethod
    def from_entries(cls, shape, entries: Iterable[tuple[int, int, object]], **kw) -> "SparseOperator":
        """Build from ``(row, col, value)`` triples, summing duplicates."""
        rows: dict[int, dict[int, object]] = {}
        for i, j, v in entries:
            r = rows.setdefault(i, {})
            r[j] = r.get(j, 0) + v
        return cls(shape, rows, **kw)

    @classmethod
    def from_dense(cls, a, exact: bool = True, **kw) -> "SparseOperator":
        rows = {}
        for i, row in enumerate(a):
            r = {}
            for j, v in enumerate(row):
                if v != 0:
                    r[j] = mpq(v) if exact and not isinstance(v, float) else v
            if r:
                rows[i] = r
        return cls((len(a), len(a[0]) if len(a) else 0), rows, **kw)

    # inspection
    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def __getitem__(self, ij):
        i, j = ij
        return self.rows.get(i, {}).get(j, 0)

    def entries(self):
        """Yield ``(row, col, value)`` in row-major sorted order."""
        for i in sorted(self.rows):
            r = self.rows[i]
            for j in sorted(r):
                yield i, j, r[j]

    def is_zero(self) -> bool:
        return not self.rows

    def is_square(self) -> bool:
        return self.shape[0] == self.shape[1]

    def diagonal(self) -> list:
        return [self[i, i] for i in range(min(self.shape))]

    # conversion
    def to_dense(self, dtype=float) -> np.ndarray:
        """Dense numpy copy; ``dtype=object`` keeps exact entries."""
        out = np.zeros(self.shape, dtype=dtype)
        if dtype is object:
            out[:] = mpq(0)
        for i, r in self.rows.items():
            for j, v in r.items():
                out[i, j] = v if dtype is object else float(v)
        return out

    def to_float(self) -> "SparseOperator":
        return self.map(float)

    def map(self, f: Callable) -> "SparseOperator":
        return SparseOperator(
            self.shape, {i: {j: f(v) for j, v in r.items()} for i, r in self.rows.items()},
            self.row_labels, self.col_labels,
        )

    # algebra
    def _check_same(self, other: "SparseOperator"):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_same(other)
        rows = {i: dict(r) for i, r in self.rows.items()}
        for i, r in other.rows.items():
            t = rows.setdefault(i, {})
            for j, v in r.items():
                t[j] = t.get(j, 0) + v
        return SparseOperator(self.shape, rows, self.row_labels, self.col_labels)

    def __neg__(self) -> "SparseOperator":
        return self.map(lambda v: -v)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        return self + (-other)

    def scale(self, c) -> "SparseOperator":
        if c == 0:
            return SparseOperator(self.shape, None, self.row_labels, self.col_labels)
        return self.map(lambda v: v * c)

    def __rmul__(self, c) -> "SparseOperator":
        return self.scale(c)

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        if self.shape[1] != other.shape[0]:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        orows = other.rows
        out = {}
        for i, r in self.rows.items():
            acc: dict[int, object] = {}
            for k, a in r.items():
                rk = orows.get(k)
                if not rk:
                    continue
                for j, b in rk.items():
                    acc[j] = acc.get(j, 0) + a * b
            if acc:
                out[i] = acc
        return SparseOperator((self.shape[0], other.shape[1]), out, self.row_labels, other.col_labels)

    def apply(self, vec: dict) -> dict:
        """Multiply a sparse vector ``{index: value}`` from the right."""
        out = {}
        for i, r in self.rows.items():
            acc = 0
            for j, a in r.items():
                x = vec.get(j)
                if x is not None:
                    acc += a * x
            if acc != 0:
                out[i] = acc
        return out

    def transpose(self) -> "SparseOperator":
        rows: dict[int, dict[int, object]] = {}
        for i, r in self.rows.items():
            for j, v in r.items():
                rows.setdefault(j, {})[i] = v
        return SparseOperator((self.shape[1], self.shape[0]), rows, self.col_labels, self.row_labels)

    @property
    def T(self) -> "SparseOperator":
        return self.transpose()

    def kron(self, other: "SparseOperator") -> "SparseOperator":
        """Kronecker product, ``self`` on the slow (left) index."""
        m, n = other.shape
        rows = {}
        for i, r in self.rows.items():
            for k, ro in other.rows.items():
                acc = {}
                for j, a in r.items():
                    for l, b in ro.items():
                        acc[j * n + l] = a * b
                rows[i * m + k] = acc
        return SparseOperator((self.shape[0] * m, self.shape[1] * n), rows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SparseOperator":
        cpos = {c: k for k, c in enumerate(cols)}
        out = {}
        for a, i in enumerate(rows):
            r = self.rows.get(i)
            if not r:
                continue
            acc = {cpos[j]: v for j, v in r.items() if j in cpos}
            if acc:
                out[a] = acc
        return SparseOperator((len(rows), len(cols)), out)

    def with_labels(self, row_labels=None, col_labels=None) -> "SparseOperator":
        return SparseOperator(self.shape, self.rows, row_labels, col_labels)

    # comparison
    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseOperator):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    __hash__ = None

    def max_abs(self) -> float:
        return max((abs(float(v)) for r in self.rows.values() for v in r.values()), default=0.0)

    def is_symmetric(self) -> bool:
        return self == self.transpose()

    def __repr__(self) -> str:
        return f"SparseOperator(shape={self.shape}, nnz={self.nnz})"


def kron_all(ops: Sequence[SparseOperator]) -> SparseOperator:
    out = ops[0]
    for op in ops[1:]:
        out = out.kron(op)
    return out


def block_diag(ops: Sequence[SparseOperator]) -> SparseOperator:
    rows = {}
    r0 = c0 = 0
    for op in ops:
        for i, r in op.rows.items():
            rows[r0 + i] = {c0 + j: v for j, v in r.items()}
        r0 += op.shape[0]
        c0 += op.shape[1]
    return SparseOperator((r0, c0), rows)
