"""Reducibility analysis: irreducibility, weak irreducibility and the block partition."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from mtensor.tensor_core import SparseTensor


def representation_matrix(B: SparseTensor) -> np.ndarray:
    """The n x n matrix GM(B).

    Entry ``(i, j)`` sums ``|b_{i i_2 ... i_m}|`` over stored entries whose
    trailing indices ``{i_2, ..., i_m}`` contain ``j``.  An entry counts once
    per column even when ``j`` repeats among its trailing indices.
    """
    B = B.to_sparse()
    G = np.zeros((B.dim, B.dim))
    mag = np.abs(B.values)
    for row, tail, v in zip(B.indices[:, 0], B.indices[:, 1:], mag):
        G[row, np.unique(tail)] += v
    return G


def reducibility_witness(A: SparseTensor) -> tuple[int, ...] | None:
    """A nonempty proper index set certifying reducibility, or None.

    A set ``I`` is a witness when every entry with leading index in ``I``
    whose trailing indices all lie outside ``I`` is zero.  Witnesses are
    closed under union, so the largest witness inside ``{1..n} \\ {j}`` is
    found by repeatedly dropping rows that violate the condition.  Trying
    every ``j`` covers all proper subsets.
    """
    A = A.to_sparse()
    n = A.dim
    if n == 1:
        return None
    rows = A.indices[:, 0]
    tails = A.indices[:, 1:]
    for j in range(n):
        inside = np.ones(n, dtype=bool)
        inside[j] = False
        while True:
            # an entry violates when its row is inside and every trailing index is outside
            bad = inside[rows] & ~np.any(inside[tails], axis=1)
            if not bad.any():
                break
            inside[np.unique(rows[bad])] = False
        if inside.any():
            return tuple(int(i) + 1 for i in np.flatnonzero(inside))
    return None


def is_irreducible(A: SparseTensor) -> bool:
    return reducibility_witness(A) is None


def _scc_labels(G: np.ndarray) -> tuple[int, np.ndarray]:
    graph = csr_matrix((G != 0).astype(np.int8))
    return connected_components(graph, directed=True, connection="strong")


def is_weakly_irreducible(B: SparseTensor) -> bool:
    """True iff the digraph of GM(B) is strongly connected."""
    B = B.to_sparse()
    if B.dim == 1:
        return True
    ncomp, _ = _scc_labels(representation_matrix(B))
    return ncomp == 1


@dataclass(frozen=True)
class PartitionReport:
    """Ordered blocks ``I_1, ..., I_k`` of 1-based indices.

    ``pattern_ok``: every entry of a row in block ``t`` has its trailing
    indices inside ``I_t`` or touching some later block.  ``strict_pattern``
    records the stronger property that all trailing indices lie in blocks
    ``t, ..., k``; it can fail when a row reaches its own block only
    through an entry that also involves a later block.
    """

    blocks: tuple[tuple[int, ...], ...]
    weakly_irreducible: tuple[bool, ...]
    pattern_ok: bool
    strict_pattern: bool = True

    @property
    def k(self) -> int:
        return len(self.blocks)

    def blocks0(self) -> list[np.ndarray]:
        return [np.asarray(b, dtype=np.int64) - 1 for b in self.blocks]

    def to_dict(self) -> dict:
        return {
            "blocks": [list(b) for b in self.blocks],
            "weakly_irreducible": list(self.weakly_irreducible),
            "pattern_ok": self.pattern_ok,
            "strict_pattern": self.strict_pattern,
        }


def _patterns(B: SparseTensor, block_of: np.ndarray) -> tuple[bool, bool]:
    """(weak, strict) zero-pattern checks for a block assignment."""
    if B.nnz == 0:
        return True, True
    lead = block_of[B.indices[:, 0]][:, None]
    tail = block_of[B.indices[:, 1:]]
    strict = bool(np.all(tail >= lead))
    weak = bool(np.all(np.all(tail == lead, axis=1) | np.any(tail > lead, axis=1)))
    return weak, strict


def _ordered_sccs(B: SparseTensor) -> list[np.ndarray]:
    """SCCs of GM(B) in topological order, smallest member first among ready ones."""
    G = representation_matrix(B)
    ncomp, labels = _scc_labels(G)
    members = [np.flatnonzero(labels == c) for c in range(ncomp)]
    succ: list[set[int]] = [set() for _ in range(ncomp)]
    indeg = np.zeros(ncomp, dtype=np.int64)
    for i, j in zip(*np.nonzero(G)):
        ci, cj = labels[i], labels[j]
        if ci != cj and cj not in succ[ci]:
            succ[ci].add(cj)
            indeg[cj] += 1

    heap = [(int(members[c][0]), c) for c in range(ncomp) if indeg[c] == 0]
    heapq.heapify(heap)
    ordered = []
    while heap:
        _, c = heapq.heappop(heap)
        ordered.append(members[c])
        for d in succ[c]:
            indeg[d] -= 1
            if indeg[d] == 0:
                heapq.heappush(heap, (int(members[d][0]), d))
    if len(ordered) != ncomp:
        raise RuntimeError("condensation of GM(B) is not acyclic")
    return ordered


def _refine(B: SparseTensor, idx: np.ndarray) -> list[np.ndarray]:
    """Blocks of ``B[idx]`` (0-based, global labels), split until each is weakly irreducible."""
    sub = B.subtensor(idx + 1)
    comps = _ordered_sccs(sub)
    if len(comps) == 1:
        return [idx]
    out = []
    for c in comps:
        out.extend(_refine(B, idx[c]))
    return out


def weakly_irreducible_partition(B: SparseTensor) -> PartitionReport:
    """Split the index set into weakly irreducible blocks in dependency order.

    Blocks start as the strongly connected components of GM(B) in
    topological order (ties go to the component holding the smallest
    index).  A component whose principal subtensor is not itself weakly
    irreducible is split again by the components of that subtensor.  The
    result is re-validated against the stored entries.
    """
    B = B.to_sparse()
    n = B.dim
    members = _refine(B, np.arange(n))
    blocks = tuple(tuple(int(i) + 1 for i in sorted(c)) for c in members)
    block_of = np.empty(n, dtype=np.int64)
    for t, c in enumerate(members):
        block_of[c] = t

    flags = tuple(is_weakly_irreducible(B.subtensor(b)) for b in blocks)
    covered = sorted(i for b in blocks for i in b)
    weak, strict = _patterns(B, block_of)
    if covered != list(range(1, n + 1)) or not weak or not all(flags):
        raise RuntimeError("block partition failed validation")
    return PartitionReport(blocks, flags, weak, strict)
