"""Monotone tensors: ``A x^{m-1} >= 0`` implies ``x >= 0``.

There is no general decision procedure, so results here are three-valued:
a tensor is *refuted* by an explicit witness, *consistent* when the
necessary-condition probes pass and sampling finds nothing, or *proven*
only for the rank-one Kronecker family, whose proof is replayed
numerically by :func:`check_monotone_witness_family`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mtensor.classify import (
    NONSINGULAR_M,
    Verdict,
    classify_m,
    is_z_tensor,
    semi_positive_certificate,
    z_split,
)
from mtensor.errors import (
    CertificateConstructionError,
    NotSemiPositiveError,
    NotZTensorError,
    TensorError,
)
from mtensor.spectral import spectral_radius
from mtensor.tensor_core import SparseTensor, apply, identity_tensor, kron_identity, kron_rank_one

WITNESS_TOL = 1e-12
N_DELTAS = 64
MAX_SIGN_PATTERN_DIM = 10


@dataclass(frozen=True)
class Witness:
    """A vector with a negative entry whose residual is nonnegative."""

    x: np.ndarray
    residual: np.ndarray
    source: str

    def to_dict(self) -> dict:
        return {
            "x": [float(v) for v in self.x],
            "residual": [float(v) for v in self.residual],
            "source": self.source,
        }


@dataclass(frozen=True)
class MonotoneProbeReport:
    diag_signs: tuple[int, ...]
    diag_positive: bool
    dominant_rows: tuple[int, ...]
    some_row_dominant: bool
    m_category: str | None
    status: str
    reason: str
    witness: Witness | None = field(default=None)

    def to_dict(self) -> dict:
        return {
            "diag_signs": list(self.diag_signs),
            "diag_positive": self.diag_positive,
            "dominant_rows": list(self.dominant_rows),
            "some_row_dominant": self.some_row_dominant,
            "m_category": self.m_category,
            "status": self.status,
            "reason": self.reason,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def _is_witness(x: np.ndarray, r: np.ndarray) -> bool:
    return bool(np.all(r >= 0) and x.min() < -WITNESS_TOL)


def delta_grid(bound: float | None = None) -> np.ndarray:
    """64 geometric points in (0, 1), plus points around ``bound`` when given."""
    grid = np.geomspace(1e-3, 0.999, N_DELTAS)
    if bound is not None and 0 < bound < 1:
        grid = np.union1d(grid, bound * np.array([0.9, 0.99, 0.999, 1.0, 1.001, 1.01]))
        grid = grid[(grid > 0) & (grid < 1)]
    return grid


def _structured_candidates(A: SparseTensor, deltas: np.ndarray):
    n = A.dim
    for pos in range(n - 1, -1, -1):
        for d in deltas:
            x = np.ones(n)
            x[pos] = -d
            yield x, f"ones-with-negative-entry[{pos + 1}]"
    if n <= MAX_SIGN_PATTERN_DIM and is_z_tensor(A):
        # sign patterns of the Perron candidate of the split B
        v = spectral_radius(z_split(A).B).eigvec
        v = np.where(v > 0, v, 1.0)
        for mask in range(1, 2**n - 1):
            signs = np.array([-1.0 if mask >> i & 1 else 1.0 for i in range(n)])
            yield signs * v, "perron-sign-pattern"


def falsify_monotone(
    A: SparseTensor,
    trials: int = 10_000,
    seed: int = 42,
    deltas: np.ndarray | None = None,
) -> Witness | None:
    """Search for ``x`` with a negative entry and ``A x^{m-1} >= 0``.

    Structured candidates go first (``e`` with one entry set to ``-delta``
    over :func:`delta_grid`, then every sign pattern of the split's Perron
    vector), followed by ``trials`` vectors uniform on ``[-1, 1]^n`` drawn
    from ``numpy.random.Philox(seed)``.  The first hit is returned.

    For odd order ``A x^{m-1} = A (-x)^{m-1}``, so any nonzero ``x`` with a
    nonnegative residual yields a witness after flipping its sign; for a
    nonsingular M-tensor the semi-positive certificate is such an ``x``.
    When no nonzero ``x`` has a nonnegative residual (``-I`` for instance)
    the tensor is vacuously monotone and nothing is returned.
    """
    A = A.to_sparse()
    n = A.dim
    deltas = delta_grid() if deltas is None else np.asarray(deltas, dtype=np.float64)
    odd = A.order % 2 == 1

    def check(x, source):
        r = apply(A, x)
        if odd and np.all(r >= 0) and np.any(x != 0):
            if x.min() >= -WITNESS_TOL:
                x = -x
            return Witness(x, r, source + ":odd-order-flip")
        if _is_witness(x, r):
            return Witness(x, r, source)
        return None

    if odd:
        for i in range(n):
            for base in (np.eye(n)[i], np.ones(n)):
                w = check(base.copy(), "basis" if base.sum() == 1 else "ones")
                if w is not None:
                    return w
        if is_z_tensor(A):
            try:
                cert = semi_positive_certificate(A)
            except (NotSemiPositiveError, CertificateConstructionError):
                cert = None
            if cert is not None:
                return check(cert.x.copy(), "semi-positive-certificate")

    for x, source in _structured_candidates(A, deltas):
        w = check(x, source)
        if w is not None:
            return w

    rng = np.random.Generator(np.random.Philox(seed))
    for t in range(trials):
        x = rng.uniform(-1.0, 1.0, size=n)
        w = check(x, f"random[{t}]")
        if w is not None:
            return w
    return None


def counterexample(n: int, s: float, delta: float):
    """``A = s I - J`` with ``J = I_n (x) I_n`` and ``x = (1, ..., 1, -delta)``.

    ``A`` is a nonsingular M-tensor for ``s > n``; ``A x^3 >= 0`` exactly when
    ``delta^2 <= (n - 1) / (s - 1)``, in which case ``x`` witnesses that
    ``A`` is not monotone.  Returns ``(A, x, report)``.
    """
    if n < 2:
        raise TensorError("counterexample needs n >= 2")
    if not s > n:
        raise TensorError(f"need s > n, got s={s}, n={n}")
    if not 0 < delta < 1:
        raise TensorError("need 0 < delta < 1")
    A = identity_tensor(4, n) * s - kron_identity(n)
    x = np.ones(n)
    x[-1] = -delta
    residual = apply(A, x)
    closed_form = np.full(n, s - n + 1 - delta**2)
    closed_form[-1] = (n - 1 + (1 - s) * delta**2) * delta
    bound = np.sqrt((n - 1) / (s - 1))
    verdict = classify_m(A)
    report = {
        "n": n,
        "s": float(s),
        "delta": float(delta),
        "delta_bound": float(bound),
        "residual": [float(v) for v in residual],
        "closed_form": [float(v) for v in closed_form],
        "witness": _is_witness(x, residual),
        "category": verdict.category,
        "margin": float(verdict.margin),
    }
    return A, x, report


def monotone_family(a, b, k: int, s: float) -> SparseTensor:
    """``A = s I - B`` with ``B`` from :func:`kron_rank_one`; monotone for ``s > (b^T a)^{2k-1}``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    B = kron_rank_one(a, b, k)
    rho = float(b @ a) ** (2 * k - 1)
    if not s > rho:
        raise TensorError(f"need s > (b^T a)^(2k-1) = {rho}, got {s}")
    return identity_tensor(2 * k, len(a)) * s - B


def _odd_root(v, p: int):
    return np.sign(v) * np.abs(v) ** (1.0 / p)


def check_monotone_witness_family(a, b, k: int, s: float, x, tol: float = 1e-12) -> bool:
    """Replay the monotonicity argument for ``s I - kron_rank_one(a, b, k)`` at ``x``.

    From ``s x^{[p]} >= a^{[p]} (b^T x)^p`` with ``p = 2k - 1`` odd:

    1. ``s^{1/p} x >= a (b^T x)`` (odd roots preserve order);
    2. ``s^{1/p} (b^T x) >= (b^T a)(b^T x)`` (multiply by ``b >= 0`` and sum);
    3. ``s^{1/p} > b^T a`` forces ``b^T x >= 0``;
    4. hence ``x >= a (b^T x) / s^{1/p} >= 0``.

    Each step is checked numerically with relative slack ``tol``.  Raises
    ``TensorError`` if ``A x^{p} >= 0`` fails to begin with.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    p = 2 * k - 1
    A = monotone_family(a, b, k, s)
    r = apply(A, x)
    scale = max(1.0, float(np.abs(s * x**p).max()))
    if np.any(r < -tol * scale):
        raise TensorError("precondition A x^{2k-1} >= 0 does not hold")

    root = s ** (1.0 / p)
    btx = float(b @ x)
    bta = float(b @ a)
    slack = tol * max(1.0, root * float(np.abs(x).max()), abs(btx))
    step1 = np.all(root * x >= a * btx - slack)
    step2 = root * btx >= bta * btx - slack * max(1.0, float(b.sum()))
    step3 = root > bta and btx >= -slack
    lower = a * btx / root
    step4 = np.all(x >= lower - slack) and np.all(lower >= -slack)
    return bool(step1 and step2 and step3 and step4 and np.all(x >= -slack))


def monotone_probes(A: SparseTensor, tol: float = 1e-10) -> MonotoneProbeReport:
    """Necessary conditions for an even-order monotone Z-tensor.

    * ``A e_i^{m-1}`` probes: every diagonal entry must be positive;
    * ``A e^{m-1}``: at least one row must be strictly dominant;
    * an even-order monotone Z-tensor is a nonsingular M-tensor, so a
      failed M-classification also refutes monotonicity.

    ``status`` is ``"refuted"`` when any check fails and ``"consistent"``
    otherwise.  Passing every probe does not prove monotonicity.
    """
    A = A.to_sparse()
    if A.order % 2:
        raise TensorError("monotone probes need even order")
    if not is_z_tensor(A):
        raise NotZTensorError("monotone probes need a Z-tensor")
    diag = A.diagonal()
    signs = tuple(int(np.sign(d)) for d in diag)
    diag_positive = bool(np.all(diag > 0))
    row_sums = apply(A, np.ones(A.dim))
    dominant = tuple(int(i) + 1 for i in np.flatnonzero(row_sums > 0))

    category = None
    if not diag_positive:
        status, reason = "refuted", "a diagonal entry is not positive"
    elif not dominant:
        status, reason = "refuted", "no row is strictly diagonally dominant"
    else:
        verdict: Verdict = classify_m(A, tol=tol, with_certificate=False)
        category = verdict.category
        if category != NONSINGULAR_M:
            status, reason = "refuted", f"not a nonsingular M-tensor ({category})"
        else:
            status, reason = "consistent", "all necessary conditions hold"
    return MonotoneProbeReport(
        signs, diag_positive, dominant, bool(dominant), category, status, reason
    )
