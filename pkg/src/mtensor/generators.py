"""Seeded random tensors for property tests and the acceptance suite."""

from __future__ import annotations

import itertools

import numpy as np

from mtensor.tensor_core import SparseTensor, identity_tensor


def random_nonnegative(m: int, n: int, rng: np.random.Generator, density: float = 0.5) -> SparseTensor:
    """Entries uniform on (0, 1], each kept with probability ``density``."""
    T = rng.uniform(0.0, 1.0, size=(n,) * m)
    T = np.where(rng.random(T.shape) < density, 1.0 - T, 0.0)
    return SparseTensor.from_dense(T)


def random_weakly_irreducible(m: int, n: int, rng: np.random.Generator, density: float = 0.5) -> SparseTensor:
    """A nonnegative tensor whose GM digraph contains the cycle 1 -> 2 -> ... -> n -> 1."""
    B = random_nonnegative(m, n, rng, density)
    if n == 1:
        return B
    ring = []
    for i in range(n):
        j = (i + 1) % n
        ring.append(((i + 1,) + (j + 1,) * (m - 1), rng.uniform(0.1, 1.0)))
    return B + SparseTensor.from_entries(m, n, ring)


def random_block_nonnegative(
    m: int, sizes: list[int], rng: np.random.Generator, cross_density: float = 0.3
) -> SparseTensor:
    """Block upper-triangular nonnegative tensor.

    Each diagonal block is dense and positive (hence weakly irreducible);
    rows of block ``t`` additionally reference later blocks through random
    cross entries, never earlier ones.
    """
    offsets = np.cumsum([0] + list(sizes))
    n = int(offsets[-1])
    entries = []
    for t, size in enumerate(sizes):
        rows = range(offsets[t], offsets[t + 1])
        own = list(range(offsets[t], offsets[t + 1]))
        later = list(range(offsets[t], n))
        for i in rows:
            for tail in itertools.product(own, repeat=m - 1):
                entries.append(((i,) + tail, rng.uniform(0.2, 1.0)))
            if t + 1 < len(sizes):
                for tail in itertools.product(later, repeat=m - 1):
                    if any(j >= offsets[t + 1] for j in tail) and rng.random() < cross_density:
                        entries.append(((i,) + tail, rng.uniform(0.0, 1.0)))
    idx = np.array([e[0] for e in entries], dtype=np.int64)
    val = np.array([e[1] for e in entries])
    # random relabeling so blocks are not contiguous
    perm = rng.permutation(n)
    return SparseTensor(m, n, perm[idx], val)


def z_tensor_from(B: SparseTensor, s: float) -> SparseTensor:
    """``s I - B``."""
    return identity_tensor(B.order, B.dim) * s - B


def random_sign_flip(A: SparseTensor, rng: np.random.Generator) -> SparseTensor:
    """Flip the signs of off-diagonal entries at random, keep the diagonal."""
    A = A.to_sparse()
    signs = np.where(A.diagonal_mask, 1.0, rng.choice([-1.0, 1.0], size=A.nnz))
    return A.with_values(A.values * signs)


__all__ = [
    "random_nonnegative",
    "random_weakly_irreducible",
    "random_block_nonnegative",
    "z_tensor_from",
    "random_sign_flip",
]
