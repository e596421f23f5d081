import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mtensor import SparseTensor, format_tensor, identity_tensor, parse_tensor, read_tensor, write_tensor
from mtensor.errors import TensorFormatError


def test_parse_basic_with_comments_and_duplicates():
    text = """# a comment
3 2 3

1 1 1 2.5
1 2 2 -1e-3
1 2 2 1e-3
"""
    A = parse_tensor(text)
    assert (A.order, A.dim) == (3, 2)
    assert dict(A.entries()) == {(1, 1, 1): 2.5}


@pytest.mark.parametrize(
    "text,line",
    [
        ("3 2\n", 1),
        ("3 2 1\n1 1 1\n", 2),
        ("3 2 1\n1 1 x 1.0\n", 2),
        ("3 2 1\n1 3 1 1.0\n", 2),
        ("3 2 1\n1 1 1 nan\n", 2),
        ("3 2 1\n1 1 1 1.0\n2 2 2 1.0\n", 3),
    ],
)
def test_malformed_input_reports_line(text, line):
    with pytest.raises(TensorFormatError) as info:
        parse_tensor(text)
    assert info.value.lineno == line
    assert str(info.value).startswith(f"line {line}:")


def test_too_few_entries_and_missing_header():
    with pytest.raises(TensorFormatError):
        parse_tensor("3 2 2\n1 1 1 1.0\n")
    with pytest.raises(TensorFormatError):
        parse_tensor("# only a comment\n")


def test_file_roundtrip(tmp_path):
    A = identity_tensor(4, 3) * 5 - SparseTensor.from_entries(4, 3, {(1, 2, 2, 3): 1 / 3})
    path = tmp_path / "a.tns"
    write_tensor(A, path, comment="test tensor")
    assert read_tensor(path) == A
    assert path.read_text().startswith("# test tensor\n4 3 4\n")


@settings(max_examples=60, deadline=None)
@given(
    m=st.integers(2, 4),
    n=st.integers(1, 3),
    data=st.data(),
)
def test_roundtrip_is_entry_identical(m, n, data):
    vals = data.draw(
        st.lists(
            st.floats(allow_nan=False, allow_infinity=False, width=64),
            min_size=n**m,
            max_size=n**m,
        )
    )
    A = SparseTensor.from_dense(np.array(vals).reshape((n,) * m))
    B = parse_tensor(format_tensor(A))
    assert B == A
    assert np.array_equal(B.values, A.values)
