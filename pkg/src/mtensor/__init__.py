"""Certified classification of Z-, M- and H-tensors."""

from mtensor.classify import (
    Certificate,
    SemiNonnegativeResult,
    Verdict,
    ZSplit,
    classify_h,
    classify_m,
    dominance_scaling,
    is_diagonally_dominant,
    is_quasi_strictly_dominant,
    is_semi_positive,
    is_strictly_diagonally_dominant,
    is_z_tensor,
    search_semi_nonnegative,
    semi_nonnegative_certificate,
    semi_positive_certificate,
    split_DC,
    split_DE,
    split_DE_holds,
    z_split,
)
from mtensor.monotone import (
    MonotoneProbeReport,
    check_monotone_witness_family,
    counterexample,
    falsify_monotone,
    monotone_family,
    monotone_probes,
)
from mtensor.spectral import (
    SpectralResult,
    collatz_wielandt,
    perron_vector,
    rho_oracle,
    spectral_radius,
)
from mtensor.structure import (
    PartitionReport,
    is_irreducible,
    is_weakly_irreducible,
    reducibility_witness,
    representation_matrix,
    weakly_irreducible_partition,
)
from mtensor.tensor_core import (
    DiagonalTensor,
    SparseTensor,
    apply,
    comparison_tensor,
    diag_compose,
    diag_inverse,
    identity_tensor,
    kron_identity,
    kron_rank_one,
    power_vec,
    scale_modes,
)
from mtensor.textformat import format_tensor, parse_tensor, read_tensor, write_tensor

__version__ = "0.1.0"
