import itertools

import numpy as np
import pytest

from mtensor import SparseTensor, identity_tensor

B0_ENTRIES = {(1, 1, 1, 1): 2.0, (1, 1, 2, 2): 1.0, (2, 2, 2, 2): 1.0}


@pytest.fixture
def B0():
    """Nonnegative 2x2x2x2 tensor with b_1111=2, b_1122=b_2222=1."""
    return SparseTensor.from_entries(4, 2, B0_ENTRIES)


@pytest.fixture
def A0(B0):
    """2I - B0: an M-tensor that is not semi-nonnegative."""
    return identity_tensor(4, 2) * 2 - B0


@pytest.fixture
def ones3():
    return SparseTensor.from_dense(np.ones((2, 2, 2)))


def brute_apply(A: SparseTensor, x) -> np.ndarray:
    """Tensor-vector product by an explicit loop over every index tuple of the dense array."""
    T = A.to_dense()
    n, m = A.dim, A.order
    out = np.zeros(n)
    for idx in itertools.product(range(n), repeat=m):
        out[idx[0]] += T[idx] * np.prod([x[j] for j in idx[1:]])
    return out


def brute_reducible(A: SparseTensor) -> bool:
    """Definition-level check: try every nonempty proper subset."""
    T = A.to_dense()
    n, m = A.dim, A.order
    for r in range(1, n):
        for I in itertools.combinations(range(n), r):
            outside = [j for j in range(n) if j not in I]
            if all(
                T[(i,) + tail] == 0
                for i in I
                for tail in itertools.product(outside, repeat=m - 1)
            ):
                return True
    return False


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        ok, detail = RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
