"""Spectral radius and Perron vectors of nonnegative tensors.

The radius is computed per weakly irreducible block by a shifted,
normalized power iteration.  Every iterate ``x > 0`` gives a
Collatz-Wielandt bracket ``min_i r_i <= rho <= max_i r_i`` with
``r_i = (B x^{m-1})_i / x_i^{m-1}``, so the reported interval is a
certificate regardless of how the iteration behaves.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from mtensor.errors import NegativeEntriesError, TensorError, WeaklyReducibleError
from mtensor.structure import is_weakly_irreducible, weakly_irreducible_partition
from mtensor.tensor_core import SparseTensor, apply, identity_tensor

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000


@dataclass(frozen=True)
class SpectralResult:
    rho: float
    eigvec: np.ndarray
    lower: float
    upper: float
    iterations: int
    converged: bool
    blocks: tuple[tuple[int, ...], ...] = ()
    block_rho: tuple[float, ...] = ()
    block_brackets: tuple[tuple[float, float], ...] = field(default=(), repr=False)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {
            "rho": float(self.rho),
            "lower": float(self.lower),
            "upper": float(self.upper),
            "eigvec": [float(v) for v in self.eigvec],
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "blocks": [list(b) for b in self.blocks],
            "block_rho": [float(r) for r in self.block_rho],
        }


def _require_nonnegative(B: SparseTensor) -> SparseTensor:
    B = B.to_sparse()
    if not B.is_nonnegative():
        raise NegativeEntriesError("tensor has negative entries")
    return B


def collatz_wielandt(B: SparseTensor, x) -> tuple[float, float]:
    """Min and max of ``(B x^{m-1})_i / x_i^{m-1}`` for a strictly positive ``x``."""
    B = _require_nonnegative(B)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (B.dim,) or np.any(x <= 0):
        raise TensorError("x must be a strictly positive vector of length n")
    ratios = apply(B, x) / x ** (B.order - 1)
    return float(ratios.min()), float(ratios.max())


def _power_block(B: SparseTensor, tol: float, max_iter: int) -> SpectralResult:
    n, m = B.dim, B.order
    if n == 1:
        r = float(B.values.sum()) if B.nnz else 0.0
        return SpectralResult(r, np.ones(1), r, r, 0, True)

    sigma = 1.0 + float(B.diagonal().max())
    shifted = B + identity_tensor(m, n) * sigma
    x = np.ones(n)
    best_lo, best_hi = -np.inf, np.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        y = apply(shifted, x)
        ratios = y / x ** (m - 1)
        lo, hi = float(ratios.min()), float(ratios.max())
        best_lo, best_hi = max(best_lo, lo), min(best_hi, hi)
        rho = 0.5 * (lo + hi) - sigma
        if hi - lo <= tol * max(1.0, rho):
            converged = True
            break
        z = y ** (1.0 / (m - 1))
        z_max = z.max()
        if not np.all(z > 0) or not np.isfinite(z_max):
            log.warning("power iteration left the positive orthant at step %d", it)
            break
        x = z / z_max
    lower, upper = best_lo - sigma, best_hi - sigma
    rho = 0.5 * (lo + hi) - sigma if converged else 0.5 * (lower + upper)
    # shifting back can push a tiny radius below zero
    lower = max(lower, 0.0)
    upper = max(upper, lower)
    rho = min(max(rho, lower), upper)
    return SpectralResult(rho, x, lower, upper, it, converged)


def perron_vector(
    B: SparseTensor, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> SpectralResult:
    """Positive eigenvector for ``rho(B)`` of a weakly irreducible nonnegative tensor.

    The returned vector is normalized to unit max-entry.  Non-convergence
    is reported through ``converged=False`` with the best bracket found.
    """
    B = _require_nonnegative(B)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not is_weakly_irreducible(B):
        raise WeaklyReducibleError("partition the tensor first (weakly_irreducible_partition)")
    res = _power_block(B, tol, max_iter)
    blocks = (tuple(range(1, B.dim + 1)),)
    return SpectralResult(
        res.rho, res.eigvec, res.lower, res.upper, res.iterations, res.converged,
        blocks, (res.rho,), ((res.lower, res.upper),),
    )


def spectral_radius(
    B: SparseTensor, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> SpectralResult:
    """``rho(B)`` as the maximum over the weakly irreducible blocks of ``B``.

    Convergence means every block bracket is narrower than
    ``tol * max(1, rho_block)``.  For reducible input the eigenvector is the
    Perron vector of the first attaining block padded with zeros.
    """
    B = _require_nonnegative(B)
    if tol <= 0:
        raise ValueError("tol must be positive")
    part = weakly_irreducible_partition(B)
    results = [_power_block(B.subtensor(b), tol, max_iter) for b in part.blocks]
    attain = int(np.argmax([r.rho for r in results]))
    eigvec = np.zeros(B.dim)
    eigvec[part.blocks0()[attain]] = results[attain].eigvec
    eigvec /= eigvec.max()
    return SpectralResult(
        rho=results[attain].rho,
        eigvec=eigvec,
        lower=max(r.lower for r in results),
        upper=max(r.upper for r in results),
        iterations=sum(r.iterations for r in results),
        converged=all(r.converged for r in results),
        blocks=part.blocks,
        block_rho=tuple(r.rho for r in results),
        block_brackets=tuple((r.lower, r.upper) for r in results),
    )


# --- independent oracle -------------------------------------------------


def _dense_min_ratio(T: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Min Collatz-Wielandt ratio for each row of ``X`` using dense contractions."""
    m = T.ndim
    Y = np.broadcast_to(T, (X.shape[0],) + T.shape)
    for _ in range(m - 1):
        Y = np.einsum("p...j,pj->p...", Y, X)
    return (Y / X ** (m - 1)).min(axis=1)


def _simplex_lattice(n: int, N: int) -> np.ndarray:
    pts = [c for c in itertools.product(range(N + 1), repeat=n - 1) if sum(c) <= N]
    P = np.array(pts, dtype=np.float64) / N
    return np.hstack([P, 1.0 - P.sum(axis=1, keepdims=True)])


def rho_oracle(B: SparseTensor, grid_depth: int = 6, eps: float = 1e-6) -> float:
    """Brute-force lower bound on ``rho(B)`` by pattern search over the simplex.

    Test oracle only: it evaluates the dense tensor directly and never
    touches :func:`apply` or the power iteration.  Every value it returns
    is a min-ratio at some positive vector, hence a valid lower bound;
    for weakly irreducible ``B`` the supremum equals ``rho(B)``.
    """
    B = _require_nonnegative(B)
    n = B.dim
    if n > 4:
        raise TensorError("rho_oracle supports n <= 4")
    if not is_weakly_irreducible(B):
        raise WeaklyReducibleError("rho_oracle needs a weakly irreducible tensor")
    T = B.to_dense()
    if n == 1:
        return float(T.ravel()[0])

    def evaluate(P):
        P = np.clip(P, eps, None)
        P = P / P.sum(axis=1, keepdims=True)
        return P, _dense_min_ratio(T, P)

    P, f = evaluate(_simplex_lattice(n, 16))
    best = int(np.argmax(f))
    x, fx = P[best], float(f[best])

    radius = 8
    offsets = np.array(list(itertools.product(range(-radius, radius + 1), repeat=n - 1)), float)
    h = 1.0 / 16
    for _ in range(grid_depth):
        h /= 4
        for _ in range(50):
            cand = np.empty((len(offsets), n))
            cand[:, :-1] = x[:-1] + h * offsets
            cand[:, -1] = 1.0 - cand[:, :-1].sum(axis=1)
            cand = cand[np.all(cand >= eps, axis=1)]
            P, f = evaluate(cand)
            j = int(np.argmax(f))
            if f[j] <= fx:
                break
            x, fx = P[j], float(f[j])
    return fx
