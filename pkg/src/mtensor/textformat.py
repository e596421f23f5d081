"""Plain-text tensor files.

Format::

    # comment lines start with '#'
    m n nnz
    i_1 i_2 ... i_m value      (nnz lines, 1-based indices)

Duplicate index tuples are summed on read.  Values are written with
``repr(float)``, which round-trips exactly.
"""

from __future__ import annotations

import math
import os
from pathlib import Path

from mtensor.errors import TensorError, TensorFormatError
from mtensor.tensor_core import DiagonalTensor, SparseTensor


def parse_tensor(text: str) -> SparseTensor:
    header = None
    entries: list[tuple[tuple[int, ...], float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if header is None:
            if len(fields) != 3:
                raise TensorFormatError("header must be 'm n nnz'", lineno)
            try:
                m, n, nnz = (int(f) for f in fields)
            except ValueError:
                raise TensorFormatError("header fields must be integers", lineno) from None
            if m < 2 or n < 1 or nnz < 0:
                raise TensorFormatError("header needs m >= 2, n >= 1, nnz >= 0", lineno)
            header = (m, n, nnz)
            continue
        m, n, nnz = header
        if len(fields) != m + 1:
            raise TensorFormatError(f"expected {m} indices and a value", lineno)
        try:
            key = tuple(int(f) for f in fields[:m])
            value = float(fields[m])
        except ValueError:
            raise TensorFormatError(f"cannot parse entry {line!r}", lineno) from None
        if min(key) < 1 or max(key) > n:
            raise TensorFormatError(f"index outside 1..{n}", lineno)
        if not math.isfinite(value):
            raise TensorFormatError("value must be finite", lineno)
        if len(entries) == nnz:
            raise TensorFormatError(f"more than {nnz} entries", lineno)
        entries.append((key, value))
    if header is None:
        raise TensorFormatError("missing header line")
    if len(entries) != header[2]:
        raise TensorFormatError(f"expected {header[2]} entries, found {len(entries)}")
    try:
        return SparseTensor.from_entries(header[0], header[1], entries)
    except TensorError as exc:
        raise TensorFormatError(str(exc)) from exc


def read_tensor(path: str | os.PathLike) -> SparseTensor:
    return parse_tensor(Path(path).read_text())


def format_tensor(A: SparseTensor | DiagonalTensor, comment: str | None = None) -> str:
    A = A.to_sparse()
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"{A.order} {A.dim} {A.nnz}")
    for key, value in A.entries():
        lines.append(" ".join(map(str, key)) + " " + repr(value))
    return "\n".join(lines) + "\n"


def write_tensor(A, path: str | os.PathLike, comment: str | None = None) -> None:
    Path(path).write_text(format_tensor(A, comment))
