"""Sparse storage and algebra for order-m, dimension-n tensors.

Index tuples passed to or returned from the public API are 1-based, the
way the entries ``a_{i_1 i_2 ... i_m}`` are written by hand.  Internally
the coordinates are kept 0-based in an ``(nnz, m)`` integer array sorted
lexicographically, with duplicates summed and exact zeros dropped, so two
tensors with the same entries compare equal.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np

from mtensor.errors import DimensionMismatchError, TensorError

__all__ = [
    "SparseTensor",
    "DiagonalTensor",
    "apply",
    "power_vec",
    "identity_tensor",
    "comparison_tensor",
    "diag_compose",
    "diag_inverse",
    "scale_modes",
    "kron_identity",
    "kron_rank_one",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class SparseTensor:
    """Immutable coordinate-format tensor.

    Parameters
    ----------
    order, dim:
        ``m >= 2`` and ``n >= 1``.
    indices:
        Integer array of shape ``(nnz, order)`` holding **0-based**
        coordinates.  Use :meth:`from_entries` for 1-based input.
    values:
        Array of ``nnz`` finite reals.  Duplicate coordinates are summed.
    """

    __slots__ = ("order", "dim", "indices", "values", "_row_ptr")

    def __init__(self, order: int, dim: int, indices, values):
        order, dim = int(order), int(dim)
        if order < 2:
            raise TensorError(f"order must be >= 2, got {order}")
        if dim < 1:
            raise TensorError(f"dimension must be >= 1, got {dim}")
        idx = np.asarray(indices, dtype=np.int64).reshape(-1, order)
        val = np.asarray(values, dtype=np.float64).reshape(-1)
        if idx.shape[0] != val.shape[0]:
            raise TensorError("indices and values have different lengths")
        if idx.size and (idx.min() < 0 or idx.max() >= dim):
            raise TensorError(f"index out of range for dimension {dim}")
        if not np.all(np.isfinite(val)):
            raise TensorError("tensor values must be finite")

        if len(val):
            order_ = np.lexsort(idx.T[::-1])
            idx, val = idx[order_], val[order_]
            new_group = np.ones(len(val), dtype=bool)
            new_group[1:] = np.any(idx[1:] != idx[:-1], axis=1)
            if not new_group.all():
                starts = np.flatnonzero(new_group)
                groups = np.split(val, starts[1:])
                val = np.array([math.fsum(g) for g in groups])
                idx = idx[starts]
            keep = val != 0.0
            idx, val = idx[keep], val[keep]

        self.order = order
        self.dim = dim
        self.indices = _readonly(np.ascontiguousarray(idx))
        self.values = _readonly(np.ascontiguousarray(val))
        self._row_ptr = _readonly(
            np.searchsorted(self.indices[:, 0], np.arange(dim + 1))
        )

    # construction -------------------------------------------------------

    @classmethod
    def from_entries(cls, order: int, dim: int, entries) -> SparseTensor:
        """Build from 1-based ``{(i_1, ..., i_m): value}`` or ``(tuple, value)`` pairs."""
        items = entries.items() if isinstance(entries, Mapping) else entries
        idx, val = [], []
        for key, v in items:
            key = tuple(int(k) for k in key)
            if len(key) != order:
                raise TensorError(f"index {key} does not have length {order}")
            if min(key) < 1 or max(key) > dim:
                raise TensorError(f"index {key} outside 1..{dim}")
            idx.append([k - 1 for k in key])
            val.append(float(v))
        return cls(order, dim, np.array(idx, dtype=np.int64).reshape(-1, order), val)

    @classmethod
    def from_dense(cls, array) -> SparseTensor:
        a = np.asarray(array, dtype=np.float64)
        if a.ndim < 2 or len(set(a.shape)) != 1:
            raise TensorError(f"dense tensor must be hypercubic, got shape {a.shape}")
        idx = np.argwhere(a != 0)
        return cls(a.ndim, a.shape[0], idx, a[tuple(idx.T)])

    @classmethod
    def zeros(cls, order: int, dim: int) -> SparseTensor:
        return cls(order, dim, np.empty((0, order), dtype=np.int64), [])

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim,) * self.order)
        out[tuple(self.indices.T)] = self.values
        return out

    def to_sparse(self) -> SparseTensor:
        return self

    # inspection ---------------------------------------------------------

    @property
    def nnz(self) -> int:
        return len(self.values)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.dim,) * self.order

    def entries(self) -> Iterable[tuple[tuple[int, ...], float]]:
        """Yield ``(1-based index tuple, value)`` in canonical order."""
        for row, v in zip(self.indices, self.values):
            yield tuple(int(i) + 1 for i in row), float(v)

    def __getitem__(self, key) -> float:
        key = tuple(int(k) - 1 for k in key)
        if len(key) != self.order:
            raise TensorError(f"index must have length {self.order}")
        lo, hi = self._row_ptr[key[0]], self._row_ptr[key[0] + 1]
        target = np.array(key)
        for p in range(lo, hi):
            if np.array_equal(self.indices[p], target):
                return float(self.values[p])
        return 0.0

    @property
    def diagonal_mask(self) -> np.ndarray:
        """Boolean mask over stored entries: True where ``i_1 = i_2 = ... = i_m``."""
        return np.all(self.indices == self.indices[:, :1], axis=1)

    def diagonal(self) -> np.ndarray:
        d = np.zeros(self.dim)
        mask = self.diagonal_mask
        d[self.indices[mask, 0]] = self.values[mask]
        return d

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.values >= 0))

    def row_ranges(self):
        """``(start, stop)`` slices of the stored entries for each leading index."""
        ptr = self._row_ptr
        return [(int(ptr[i]), int(ptr[i + 1])) for i in range(self.dim)]

    # derived tensors ----------------------------------------------------

    def with_values(self, values) -> SparseTensor:
        return SparseTensor(self.order, self.dim, self.indices, values)

    def subtensor(self, block) -> SparseTensor:
        """Leading subtensor on the 1-based index set ``block``, reindexed to 1..len(block)."""
        block0 = np.asarray(sorted(int(b) - 1 for b in block), dtype=np.int64)
        pos = np.full(self.dim, -1, dtype=np.int64)
        pos[block0] = np.arange(len(block0))
        mapped = pos[self.indices] if self.nnz else self.indices
        keep = np.all(mapped >= 0, axis=1)
        return SparseTensor(self.order, len(block0), mapped[keep], self.values[keep])

    def permute(self, perm) -> SparseTensor:
        """Relabel indices simultaneously in every mode: old index ``i`` becomes ``perm[i-1]``.

        ``perm`` is a 1-based permutation of ``1..n``.
        """
        p = np.asarray(perm, dtype=np.int64) - 1
        if sorted(p.tolist()) != list(range(self.dim)):
            raise TensorError("perm must be a permutation of 1..n")
        return SparseTensor(self.order, self.dim, p[self.indices], self.values)

    def _coerce(self, other) -> SparseTensor:
        other = other.to_sparse()
        if (other.order, other.dim) != (self.order, self.dim):
            raise DimensionMismatchError(
                f"tensor shapes differ: ({self.order},{self.dim}) vs ({other.order},{other.dim})"
            )
        return other

    def __add__(self, other) -> SparseTensor:
        if not isinstance(other, (SparseTensor, DiagonalTensor)):
            return NotImplemented
        other = self._coerce(other)
        return SparseTensor(
            self.order,
            self.dim,
            np.vstack([self.indices, other.indices]),
            np.concatenate([self.values, other.values]),
        )

    __radd__ = __add__

    def __neg__(self) -> SparseTensor:
        return self.with_values(-self.values)

    def __sub__(self, other) -> SparseTensor:
        if not isinstance(other, (SparseTensor, DiagonalTensor)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> SparseTensor:
        if not isinstance(other, (SparseTensor, DiagonalTensor)):
            return NotImplemented
        return self._coerce(other) + (-self)

    def __mul__(self, alpha) -> SparseTensor:
        if not isinstance(alpha, (int, float, np.floating, np.integer)):
            return NotImplemented
        return self.with_values(self.values * float(alpha))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, DiagonalTensor):
            other = other.to_sparse()
        if not isinstance(other, SparseTensor):
            return NotImplemented
        return (
            self.order == other.order
            and self.dim == other.dim
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.order, self.dim, self.indices.tobytes(), self.values.tobytes()))

    def __repr__(self) -> str:
        return f"SparseTensor(order={self.order}, dim={self.dim}, nnz={self.nnz})"


@dataclass(frozen=True, eq=False)
class DiagonalTensor:
    """Tensor whose only nonzeros sit at ``(i, i, ..., i)``; ``diag[i-1]`` holds that entry."""

    order: int
    dim: int
    diag: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=np.float64).reshape(-1)
        if d.shape != (self.dim,):
            raise DimensionMismatchError(f"diagonal has length {d.size}, expected {self.dim}")
        if not np.all(np.isfinite(d)):
            raise TensorError("diagonal entries must be finite")
        object.__setattr__(self, "diag", _readonly(d))

    @classmethod
    def of(cls, order: int, diag) -> DiagonalTensor:
        d = np.asarray(diag, dtype=np.float64).reshape(-1)
        return cls(order, len(d), d)

    def to_sparse(self) -> SparseTensor:
        idx = np.repeat(np.arange(self.dim)[:, None], self.order, axis=1)
        return SparseTensor(self.order, self.dim, idx, self.diag)

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().to_dense()

    def __mul__(self, alpha) -> DiagonalTensor:
        if not isinstance(alpha, (int, float, np.floating, np.integer)):
            return NotImplemented
        return DiagonalTensor(self.order, self.dim, self.diag * float(alpha))

    __rmul__ = __mul__

    def __add__(self, other):
        return self.to_sparse() + other

    def __sub__(self, other):
        return self.to_sparse() - other

    def __eq__(self, other) -> bool:
        if isinstance(other, DiagonalTensor):
            return (
                self.order == other.order
                and self.dim == other.dim
                and np.array_equal(self.diag, other.diag)
            )
        if isinstance(other, SparseTensor):
            return self.to_sparse() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.order, self.dim, self.diag.tobytes()))


def _as_vector(x, n: int) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.shape != (n,):
        raise DimensionMismatchError(f"vector has shape {v.shape}, expected ({n},)")
    if not np.all(np.isfinite(v)):
        raise TensorError("vector entries must be finite")
    return v


def apply(A: SparseTensor | DiagonalTensor, x) -> np.ndarray:
    """Tensor-vector product ``A x^{m-1}``.

    ``y_i = sum a_{i i_2 ... i_m} x_{i_2} ... x_{i_m}`` with each row summed
    by :func:`math.fsum`, so the result is the correctly rounded row sum of
    the computed terms and independent of the platform's reduction order.
    """
    v = _as_vector(x, A.dim)
    if isinstance(A, DiagonalTensor):
        return A.diag * v ** (A.order - 1)
    if A.nnz == 0:
        return np.zeros(A.dim)
    terms = A.values * np.prod(v[A.indices[:, 1:]], axis=1)
    ptr = A._row_ptr
    out = np.zeros(A.dim)
    for i in range(A.dim):
        lo, hi = ptr[i], ptr[i + 1]
        if hi > lo:
            out[i] = math.fsum(terms[lo:hi])
    return out


def power_vec(x, p: float) -> np.ndarray:
    """Componentwise power ``x^{[p]}``; fractional powers need ``x >= 0``."""
    v = np.asarray(x, dtype=np.float64)
    if float(p).is_integer():
        return v ** int(p)
    if np.any(v < 0):
        raise TensorError("fractional power of a negative entry")
    return v ** float(p)


def identity_tensor(m: int, n: int) -> DiagonalTensor:
    """The unit tensor: ones on the diagonal, zeros elsewhere."""
    if m < 2 or n < 1:
        raise TensorError("identity_tensor needs m >= 2 and n >= 1")
    return DiagonalTensor(m, n, np.ones(n))


def comparison_tensor(A: SparseTensor) -> SparseTensor:
    """Diagonal entries become ``|a|``, off-diagonal entries ``-|a|``."""
    A = A.to_sparse()
    sign = np.where(A.diagonal_mask, 1.0, -1.0)
    return A.with_values(sign * np.abs(A.values))


def _check_diag_against(D: DiagonalTensor, A) -> None:
    if (D.order, D.dim) != (A.order, A.dim):
        raise DimensionMismatchError(
            f"diagonal tensor ({D.order},{D.dim}) does not match ({A.order},{A.dim})"
        )


def diag_compose(D: DiagonalTensor, A: SparseTensor) -> SparseTensor:
    """The composite ``DA``: entry ``(i_1, ..., i_m)`` scaled by ``d_{i_1}``."""
    A = A.to_sparse()
    _check_diag_against(D, A)
    return A.with_values(A.values * D.diag[A.indices[:, 0]])


def diag_inverse(D: DiagonalTensor) -> DiagonalTensor:
    if np.any(D.diag == 0):
        raise TensorError("diagonal tensor has a zero entry")
    return DiagonalTensor(D.order, D.dim, 1.0 / D.diag)


def scale_modes(A: SparseTensor, d) -> SparseTensor:
    """``A X^{m-1}`` with ``X = diag(d)``: entry scaled by ``d_{i_2} ... d_{i_m}``."""
    A = A.to_sparse()
    v = _as_vector(d, A.dim)
    return A.with_values(A.values * np.prod(v[A.indices[:, 1:]], axis=1))


def kron_identity(n: int) -> SparseTensor:
    """Order-4 tensor ``I_n (x) I_n``: entry 1 at ``(i, i, j, j)`` for all i, j."""
    if n < 1:
        raise TensorError("n must be >= 1")
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    i, j = i.ravel(), j.ravel()
    return SparseTensor(4, n, np.stack([i, i, j, j], axis=1), np.ones(n * n))


def kron_rank_one(a, b, k: int) -> SparseTensor:
    """Order-2k tensor ``(a^{[2k-1]} b^T) (x) (b b^T) (x) ... (x) (b b^T)``.

    Entry ``(i, i_2, ..., i_{2k})`` equals ``a_i^{2k-1} b_{i_2} ... b_{i_{2k}}``,
    so ``apply(B, x) = a^{[2k-1]} (b^T x)^{2k-1}``.
    """
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise DimensionMismatchError("a and b must have the same length")
    if np.any(a < 0) or np.any(b < 0):
        raise TensorError("a and b must be nonnegative")
    if int(k) != k or k < 1:
        raise TensorError("k must be an integer >= 1")
    k = int(k)
    n, m = len(a), 2 * k
    lead = a ** (m - 1)
    idx, val = [], []
    for tail in itertools.product(range(n), repeat=m - 1):
        w = math.prod(b[t] for t in tail)
        if w == 0:
            continue
        for i in range(n):
            if lead[i] != 0:
                idx.append((i, *tail))
                val.append(lead[i] * w)
    return SparseTensor(m, n, np.array(idx, dtype=np.int64).reshape(-1, m), val)
