"""Exception types raised by mtensor."""


class TensorError(ValueError):
    """Base class for invalid tensor input."""


class DimensionMismatchError(TensorError):
    pass


class NegativeEntriesError(TensorError):
    """A nonnegative tensor was required."""


class NotZTensorError(TensorError):
    """An off-diagonal entry is positive."""


class WeaklyReducibleError(TensorError):
    """The operation needs a weakly irreducible tensor."""


class NotSemiPositiveError(TensorError):
    """No positive vector with a positive residual could be built.

    For a Z-tensor this means it is not a nonsingular M-tensor.
    """


class CertificateConstructionError(RuntimeError):
    """The block gluing ran out of halvings (margin too close to zero)."""


class TensorFormatError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
