"""Z-, M- and H-tensor classification with constructive certificates.

A Z-tensor ``A`` is written ``A = s I - B`` with ``B >= 0``; it is an
M-tensor when ``s >= rho(B)`` and a nonsingular M-tensor when
``s > rho(B)``.  The margin ``s - rho(B)`` does not depend on the choice
of ``s``.  Nonsingular M-tensors are exactly the semi-positive Z-tensors,
and :func:`semi_positive_certificate` builds the positive vector
explicitly by gluing per-block Perron vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from mtensor.errors import (
    CertificateConstructionError,
    NotSemiPositiveError,
    NotZTensorError,
    TensorError,
)
from mtensor.spectral import DEFAULT_MAX_ITER, DEFAULT_TOL, perron_vector, spectral_radius
from mtensor.structure import weakly_irreducible_partition
from mtensor.tensor_core import (
    DiagonalTensor,
    SparseTensor,
    apply,
    comparison_tensor,
    diag_compose,
    diag_inverse,
    identity_tensor,
    power_vec,
    scale_modes,
)

MAX_HALVINGS = 200

NONSINGULAR_M = "nonsingular-M"
BOUNDARY_M = "boundary-M"
M_TENSOR = "M"
NOT_M = "not-M"

_H_LABELS = {
    NONSINGULAR_M: "nonsingular-H",
    BOUNDARY_M: "boundary-H",
    M_TENSOR: "H",
    NOT_M: "not-H",
}


def _vec(v) -> list[float]:
    return [float(a) for a in v]


@dataclass(frozen=True)
class ZSplit:
    s: float
    B: SparseTensor

    def reconstruct(self) -> SparseTensor:
        return identity_tensor(self.B.order, self.B.dim) * self.s - self.B


@dataclass(frozen=True)
class Certificate:
    """A positive ``x`` together with its residual ``A x^{m-1}``.

    ``kind`` is ``"semi-positive"`` (residual > 0) or ``"semi-nonnegative"``
    (residual >= 0 up to rounding).  ``method`` records how ``x`` was found.
    """

    x: np.ndarray
    residual: np.ndarray
    kind: str
    method: str
    block_scales: tuple[float, ...] = ()
    halvings: int = 0

    @property
    def margin(self) -> float:
        return float(self.residual.min())

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "method": self.method,
            "x": _vec(self.x),
            "residual": _vec(self.residual),
            "margin": self.margin,
            "block_scales": _vec(self.block_scales),
            "halvings": self.halvings,
        }


@dataclass(frozen=True)
class Verdict:
    is_z: bool
    category: str
    margin: float
    rho_bracket: tuple[float, float]
    s: float
    decided: bool = True
    diagnostic: str | None = None
    certificate: Certificate | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "is_z": self.is_z,
            "category": self.category,
            "margin": float(self.margin),
            "rho_bracket": [float(self.rho_bracket[0]), float(self.rho_bracket[1])],
            "s": float(self.s),
            "decided": self.decided,
            "diagnostic": self.diagnostic,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }


# --- Z-tensors ---------------------------------------------------------------


def is_z_tensor(A) -> bool:
    """True iff every off-diagonal entry is non-positive."""
    if isinstance(A, DiagonalTensor):
        return True
    return bool(np.all(A.values[~A.diagonal_mask] <= 0))


def _require_z(A) -> SparseTensor:
    A = A.to_sparse()
    if not is_z_tensor(A):
        raise NotZTensorError("tensor has a positive off-diagonal entry")
    return A


def z_split(A, s: float | None = None) -> ZSplit:
    """Write ``A = s I - B`` with ``B >= 0``.

    The default ``s = max(1, max_i a_{i...i})`` is the smallest value
    (floored at 1) that keeps the diagonal of ``B`` nonnegative.
    """
    A = _require_z(A)
    max_diag = float(A.diagonal().max())
    if s is None:
        s = max(1.0, max_diag)
    elif s <= 0 or s < max_diag:
        raise TensorError(f"s={s} must be positive and at least the largest diagonal entry")
    B = identity_tensor(A.order, A.dim) * s - A
    return ZSplit(float(s), B)


# --- diagonal dominance ------------------------------------------------------


def _row_parts(A: SparseTensor) -> tuple[np.ndarray, np.ndarray]:
    """``|diagonal|`` and the off-diagonal absolute row sums."""
    mag = np.abs(A.values)
    off = np.where(A.diagonal_mask, 0.0, mag)
    sums = np.array([math.fsum(off[lo:hi]) for lo, hi in A.row_ranges()])
    return np.abs(A.diagonal()), sums


def is_strictly_diagonally_dominant(A) -> bool:
    diag, off = _row_parts(A.to_sparse())
    return bool(np.all(diag > off))


def is_diagonally_dominant(A) -> bool:
    diag, off = _row_parts(A.to_sparse())
    return bool(np.all(diag >= off))


def is_quasi_strictly_dominant(A, d) -> bool:
    """``|a_{i...i}| d_i^{m-1} > sum |a_{i i_2...i_m}| d_{i_2}...d_{i_m}`` for every row."""
    d = np.asarray(d, dtype=np.float64)
    if np.any(d <= 0):
        return False
    return is_strictly_diagonally_dominant(scale_modes(A.to_sparse(), d))


# --- M-classification --------------------------------------------------------


def _categorize(s: float, lower: float, upper: float, tol: float) -> tuple[str, bool, str | None]:
    band = tol * max(1.0, abs(s))
    lo_margin, hi_margin = s - upper, s - lower
    if lo_margin > band:
        return NONSINGULAR_M, True, None
    if hi_margin < -band:
        return NOT_M, True, None
    if lo_margin >= -band and hi_margin <= band:
        return BOUNDARY_M, True, None
    if lo_margin >= -band:
        return M_TENSOR, True, "rho bracket too wide to separate nonsingular from boundary"
    return BOUNDARY_M, False, "rho bracket straddles s; reported conservatively"


def classify_m(
    A,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    with_certificate: bool = True,
) -> Verdict:
    """Classify a Z-tensor by the sign of ``s - rho(B)``.

    Categories: ``nonsingular-M`` (margin above the band), ``boundary-M``
    (``|margin| <= tol * max(1, s)``), ``M`` (an M-tensor whose bracket is
    too wide to say more) and ``not-M``.  A nonsingular verdict carries a
    semi-positive certificate when one could be built.
    """
    A = _require_z(A)
    split = z_split(A)
    spectrum = spectral_radius(split.B, tol=tol, max_iter=max_iter)
    category, decided, diagnostic = _categorize(split.s, spectrum.lower, spectrum.upper, tol)
    if not spectrum.converged:
        note = f"power iteration did not converge in {max_iter} steps"
        diagnostic = note if diagnostic is None else f"{diagnostic}; {note}"
    cert = None
    if with_certificate and category == NONSINGULAR_M:
        try:
            cert = semi_positive_certificate(A, tol=tol, max_iter=max_iter)
        except (NotSemiPositiveError, CertificateConstructionError) as exc:
            diagnostic = f"certificate construction failed: {exc}"
    return Verdict(
        is_z=True,
        category=category,
        margin=split.s - spectrum.rho,
        rho_bracket=(spectrum.lower, spectrum.upper),
        s=split.s,
        decided=decided,
        diagnostic=diagnostic,
        certificate=cert,
    )


def classify_h(A, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> Verdict:
    """H-classification: classify the comparison tensor as an M-tensor.

    A nonsingular-H verdict carries the comparison tensor's certificate;
    its ``x`` is a scaling ``d`` with ``scale_modes(A, d)`` strictly
    diagonally dominant.
    """
    A = A.to_sparse()
    v = classify_m(comparison_tensor(A), tol=tol, max_iter=max_iter)
    return Verdict(
        is_z=is_z_tensor(A),
        category=_H_LABELS[v.category],
        margin=v.margin,
        rho_bracket=v.rho_bracket,
        s=v.s,
        decided=v.decided,
        diagnostic=v.diagnostic,
        certificate=v.certificate,
    )


# --- certificates ------------------------------------------------------------


def _glue_blocks(A: SparseTensor, split: ZSplit, tol: float, max_iter: int,
                 critical_ok: bool = False) -> tuple[np.ndarray, np.ndarray, list[float], int]:
    """Place per-block Perron vectors one block at a time, shrinking later blocks.

    Block ``t`` only references blocks ``>= t``, so once a later block is
    scaled by ``eps`` every cross term that feeds back into earlier rows
    shrinks by at least ``eps``.  Each new block starts at half the previous
    block's scale and is halved until every already-placed row keeps more
    than half of its residual.  With ``critical_ok`` a block whose radius
    equals ``s`` may contribute a zero residual.
    """
    part = weakly_irreducible_partition(split.B)
    n = A.dim
    x = np.zeros(n)
    placed = np.zeros(n, dtype=bool)
    residual = np.zeros(n)
    scales: list[float] = []
    halvings = 0
    floor = -tol * max(1.0, split.s)
    for t, block in enumerate(part.blocks0()):
        sub = split.B.subtensor(block + 1)
        pv = perron_vector(sub, tol=tol, max_iter=max_iter)
        eps = 1.0 if t == 0 else scales[-1] / 2
        prev = residual[placed]
        need = np.where(prev > 0, prev / 2, prev + floor)
        count = 0
        while True:
            trial = x.copy()
            trial[block] = eps * pv.eigvec
            r = apply(A, trial)
            own = r[block]
            own_ok = np.all(own >= floor * eps ** (A.order - 1)) if critical_ok else np.all(own > 0)
            if not own_ok:
                raise NotSemiPositiveError(
                    f"block {tuple(block + 1)} has rho={pv.rho:.17g} not below s={split.s:.17g}"
                )
            if np.all(r[placed] > need) or not placed.any():
                break
            eps /= 2
            count += 1
            if count > MAX_HALVINGS:
                raise CertificateConstructionError(
                    f"no scale for block {tuple(block + 1)} after {MAX_HALVINGS} halvings"
                )
        halvings += count
        x = trial
        residual = r
        placed[block] = True
        scales.append(eps)
    return x, apply(A, x), scales, halvings


def semi_positive_certificate(
    A,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    method: str = "auto",
) -> Certificate:
    """Find ``x > 0`` with ``A x^{m-1} > 0`` for a nonsingular M-tensor.

    ``method="auto"`` first tries ``x = e`` (enough for strictly diagonally
    dominant Z-tensors) and otherwise glues per-block Perron vectors of the
    split ``A = s I - B``; ``method="glue"`` skips the first shortcut.

    Raises
    ------
    NotZTensorError
        ``A`` has a positive off-diagonal entry.
    NotSemiPositiveError
        Some block has ``rho(B[I_t]) >= s``, i.e. ``A`` is not a
        nonsingular M-tensor.
    CertificateConstructionError
        A block needed more than 200 halvings.
    """
    A = _require_z(A)
    if method not in ("auto", "glue"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        e = np.ones(A.dim)
        r = apply(A, e)
        if np.all(r > 0):
            return Certificate(e, r, "semi-positive", "ones")
    split = z_split(A)
    x, r, scales, halvings = _glue_blocks(A, split, tol, max_iter)
    if not (np.all(x > 0) and np.all(r > 0)):
        raise NotSemiPositiveError("glued vector failed re-verification")
    return Certificate(x, r, "semi-positive", "glue", tuple(scales), halvings)


def is_semi_positive(A, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> bool:
    """True iff :func:`semi_positive_certificate` produces a verified vector."""
    try:
        semi_positive_certificate(A, tol=tol, max_iter=max_iter)
    except (NotSemiPositiveError, CertificateConstructionError):
        return False
    return True


def dominance_scaling(A, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> np.ndarray:
    """Positive ``d`` making ``scale_modes(A, d)`` strictly diagonally dominant."""
    return semi_positive_certificate(A, tol=tol, max_iter=max_iter).x


def split_DC(A) -> tuple[DiagonalTensor, SparseTensor]:
    """``A = D C`` with ``D`` the diagonal of ``A`` and ``C = D^{-1} A`` (unit diagonal)."""
    A = _require_z(A)
    d = A.diagonal()
    if np.any(d <= 0):
        raise TensorError("split_DC needs all diagonal entries positive")
    D = DiagonalTensor(A.order, A.dim, d)
    return D, diag_compose(diag_inverse(D), A)


def split_DE(A) -> tuple[DiagonalTensor, SparseTensor]:
    """``A = D - E`` with ``D`` the diagonal of ``A`` and ``E >= 0`` off-diagonal."""
    A = _require_z(A)
    d = A.diagonal()
    if np.any(d <= 0):
        raise TensorError("split_DE needs all diagonal entries positive")
    D = DiagonalTensor(A.order, A.dim, d)
    return D, D.to_sparse() - A


def split_DE_holds(D: DiagonalTensor, E: SparseTensor, x) -> bool:
    """Whether ``(D^{-1} E) x^{m-1} < x^{[m-1]}`` componentwise."""
    x = np.asarray(x, dtype=np.float64)
    lhs = apply(diag_compose(diag_inverse(D), E), x)
    return bool(np.all(lhs < power_vec(x, E.order - 1)))


# --- semi-nonnegativity --------------------------------------------------------


CERTIFIED = "certified"
UNKNOWN = "unknown"
REFUTED_BY_SAMPLE = "refuted-by-sample"


@dataclass(frozen=True)
class SemiNonnegativeResult:
    """Three-valued answer: ``certified`` (with a certificate), ``unknown``,
    or ``refuted-by-sample`` (random search found no x and some row was
    negative at every sample; evidence, not proof)."""

    status: str
    certificate: Certificate | None = None
    case: str | None = None
    reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "case": self.case,
            "reason": self.reason,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }


def semi_nonnegative_certificate(
    A, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> SemiNonnegativeResult:
    """Try the known sufficient conditions for ``x > 0`` with ``A x^{m-1} >= 0``.

    In order: (1) diagonally dominant with nonnegative diagonal, ``x = e``;
    (2) weakly irreducible M-tensor, ``x`` = Perron vector of ``B``;
    (3) reducible M-tensor whose blocks with ``rho(B[I_t]) = s`` come last
    in the partition and have no entries between them, glued as in the
    semi-positive construction.  Symmetric M-tensors fall under (3).
    Anything else is ``unknown``.
    """
    A = _require_z(A)
    n = A.dim
    band = tol * max(1.0, float(np.abs(A.values).max()) if A.nnz else 1.0)

    if np.all(A.diagonal() >= 0) and is_diagonally_dominant(A):
        e = np.ones(n)
        return SemiNonnegativeResult(
            CERTIFIED, Certificate(e, apply(A, e), "semi-nonnegative", "ones"), "dominant"
        )

    split = z_split(A)
    part = weakly_irreducible_partition(split.B)
    sband = tol * max(1.0, split.s)
    if part.k == 1:
        pv = perron_vector(split.B, tol=tol, max_iter=max_iter)
        if split.s - pv.upper < -sband:
            return SemiNonnegativeResult(UNKNOWN, reason="not an M-tensor (s < rho(B))")
        r = apply(A, pv.eigvec)
        if np.all(r >= -band):
            cert = Certificate(pv.eigvec, r, "semi-nonnegative", "perron")
            return SemiNonnegativeResult(CERTIFIED, cert, "weakly-irreducible")
        return SemiNonnegativeResult(UNKNOWN, reason="Perron residual negative beyond tolerance")

    rhos = []
    for block in part.blocks:
        pv = perron_vector(split.B.subtensor(block), tol=tol, max_iter=max_iter)
        rhos.append(pv)
    if any(split.s - pv.upper < -sband for pv in rhos):
        return SemiNonnegativeResult(UNKNOWN, reason="not an M-tensor (a block has rho > s)")
    critical = [split.s - pv.lower <= sband for pv in rhos]
    first = critical.index(True) if any(critical) else part.k
    if not all(critical[first:]):
        return SemiNonnegativeResult(
            UNKNOWN, reason="a block with rho = s precedes a block with rho < s"
        )
    tail = [i for b in part.blocks[first:] for i in b]
    if tail:
        block_of = {i: t for t, b in enumerate(part.blocks) for i in b}
        tail_set = set(tail)
        for key, _ in split.B.entries():
            if set(key) <= tail_set and len({block_of[i] for i in key}) > 1:
                return SemiNonnegativeResult(
                    UNKNOWN, reason="entries couple distinct blocks with rho = s"
                )
    try:
        x, r, scales, halvings = _glue_blocks(A, split, tol, max_iter, critical_ok=True)
    except (NotSemiPositiveError, CertificateConstructionError) as exc:
        return SemiNonnegativeResult(UNKNOWN, reason=str(exc))
    if np.all(x > 0) and np.all(r >= -band):
        cert = Certificate(x, r, "semi-nonnegative", "glue", tuple(scales), halvings)
        return SemiNonnegativeResult(CERTIFIED, cert, "reducible")
    return SemiNonnegativeResult(UNKNOWN, reason="glued vector failed re-verification")


def search_semi_nonnegative(A, trials: int = 10_000, seed: int = 42) -> SemiNonnegativeResult:
    """Random search for ``x > 0`` with ``A x^{m-1} >= 0``.

    Tries ``x = e`` first, then samples ``x`` log-uniformly in
    ``[1e-3, 1e3]^n`` from a Philox stream.  Returns ``certified`` on
    success; ``refuted-by-sample`` when no sample works, with the rows that
    were negative at every sample in ``reason``.
    """
    A = _require_z(A)
    rng = np.random.Generator(np.random.Philox(seed))
    always_negative = np.ones(A.dim, dtype=bool)
    for t in range(trials):
        x = np.ones(A.dim) if t == 0 else 10.0 ** rng.uniform(-3, 3, size=A.dim)
        r = apply(A, x)
        if np.all(r >= 0):
            return SemiNonnegativeResult(
                CERTIFIED, Certificate(x, r, "semi-nonnegative", "sampled"), "sampled"
            )
        always_negative &= r < 0
    rows = [int(i) + 1 for i in np.flatnonzero(always_negative)]
    return SemiNonnegativeResult(
        REFUTED_BY_SAMPLE, reason=f"no sample succeeded; rows always negative: {rows}"
    )
