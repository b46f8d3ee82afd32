"""Numeric CSV reading and writing.

Values are written in shortest round-trip form (``repr`` of a float), with
``inf``/``-inf`` for infinities. Lines starting with ``#`` are comments. A
first row that does not parse as numbers is treated as a header.
"""

import numpy as np

from .errors import InvalidParameter


def format_value(x) -> str:
    return repr(float(x))


def write_matrix(path, M, header=None, comments=()):
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    lines = [f"# {c}" for c in comments]
    if header:
        lines.append(",".join(header))
    lines.extend(",".join(map(format_value, row)) for row in M.tolist())
    with open(path, "w", newline="") as fh:
        fh.write("".join(line + "\n" for line in lines))


def _parse_row(fields, lineno, path):
    try:
        return [float(f) for f in fields]
    except ValueError:
        raise InvalidParameter(f"{path}:{lineno}: non-numeric value in {','.join(fields)!r}") from None


def read_matrix(path) -> np.ndarray:
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = [f.strip() for f in line.split(",")]
            if not rows and width is None:
                try:
                    rows.append([float(f) for f in fields])
                except ValueError:
                    width = len(fields)  # header row
                    continue
            else:
                rows.append(_parse_row(fields, lineno, path))
            if width is None:
                width = len(fields)
            if len(rows[-1]) != width:
                raise InvalidParameter(f"{path}:{lineno}: expected {width} columns, got {len(rows[-1])}")
    if not rows:
        raise InvalidParameter(f"{path}: no data rows")
    return np.array(rows, dtype=float)


def read_labels(path) -> np.ndarray:
    M = read_matrix(path)
    if M.shape[1] != 1:
        raise InvalidParameter(f"{path}: labels file must have a single column, got {M.shape[1]}")
    y = M[:, 0]
    if not np.all(np.isfinite(y)) or not np.all(y == np.round(y)):
        raise InvalidParameter(f"{path}: labels must be integers")
    return y.astype(np.int64)
