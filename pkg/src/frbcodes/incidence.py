"""Binary incidence matrices with bitmask row and column supports.

Rows are storage nodes, columns are codeword symbols. Row ``i`` is stored
as an integer whose bit ``j`` is set when node ``i`` holds symbol ``j``,
and column ``j`` likewise has bit ``i`` set for every node holding it, so
covering queries reduce to OR-ing a handful of integers.

Text format::

    n theta
    <theta 0/1 characters>   (n lines)

JSON format: ``{"n": .., "theta": .., "rows": ["0101..", ..]}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce
from operator import or_
from typing import Iterable, NamedTuple

import numpy as np

from .errors import IndexOutOfRange, ParseError


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(indices: Iterable[int]) -> int:
    return reduce(or_, (1 << i for i in indices), 0)


@dataclass(frozen=True)
class BinaryIncidenceMatrix:
    n: int
    theta: int
    rows: tuple[int, ...]
    cols: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise ValueError(f"expected {self.n} rows, got {len(self.rows)}")
        full = (1 << self.theta) - 1
        if any(r & ~full for r in self.rows):
            raise IndexOutOfRange("row support exceeds theta columns")
        cols = [0] * self.theta
        for i, r in enumerate(self.rows):
            for j in bits(r):
                cols[j] |= 1 << i
        if self.cols and tuple(self.cols) != tuple(cols):
            raise ValueError("row and column supports disagree")
        object.__setattr__(self, "cols", tuple(cols))

    @classmethod
    def from_supports(cls, theta: int, row_supports: Iterable[Iterable[int]]):
        rows = tuple(mask_of(s) for s in row_supports)
        return cls(len(rows), theta, rows)

    @classmethod
    def from_dense(cls, array) -> BinaryIncidenceMatrix:
        a = np.asarray(array)
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        n, theta = a.shape
        return cls.from_supports(theta, (np.flatnonzero(a[i]).tolist() for i in range(n)))

    @classmethod
    def identity(cls, n: int) -> BinaryIncidenceMatrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    @property
    def row_supports(self) -> list[frozenset[int]]:
        return [frozenset(bits(r)) for r in self.rows]

    @property
    def col_supports(self) -> list[frozenset[int]]:
        return [frozenset(bits(c)) for c in self.cols]

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.theta), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            out[i, bits(r)] = 1
        return out

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i] >> j & 1

    def __repr__(self) -> str:
        return f"BinaryIncidenceMatrix(n={self.n}, theta={self.theta})"


class UniformityProfile(NamedTuple):
    """Common row weight ``alpha`` and column weight ``rho``; ``None`` if they vary."""

    alpha: int | None
    rho: int | None

    @property
    def uniform(self) -> bool:
        return self.alpha is not None and self.rho is not None


def weights(m: BinaryIncidenceMatrix) -> UniformityProfile:
    rw = {r.bit_count() for r in m.rows}
    cw = {c.bit_count() for c in m.cols}
    return UniformityProfile(
        rw.pop() if len(rw) == 1 else None,
        cw.pop() if len(cw) == 1 else None,
    )


def _check_indices(idx: Iterable[int], bound: int) -> list[int]:
    idx = list(idx)
    for i in idx:
        if not 0 <= i < bound:
            raise IndexOutOfRange(f"index {i} outside [0, {bound})")
    return idx


def cover_rows_mask(m: BinaryIncidenceMatrix, columns: Iterable[int]) -> int:
    return reduce(or_, (m.cols[j] for j in _check_indices(columns, m.theta)), 0)


def cover_cols_mask(m: BinaryIncidenceMatrix, rows: Iterable[int]) -> int:
    return reduce(or_, (m.rows[i] for i in _check_indices(rows, m.n)), 0)


def cover_rows(m: BinaryIncidenceMatrix, columns: Iterable[int]) -> set[int]:
    """Rows touched by at least one of ``columns``."""
    return set(bits(cover_rows_mask(m, columns)))


def cover_cols(m: BinaryIncidenceMatrix, rows: Iterable[int]) -> set[int]:
    """Columns touched by at least one of ``rows``."""
    return set(bits(cover_cols_mask(m, rows)))


def transpose(m: BinaryIncidenceMatrix) -> BinaryIncidenceMatrix:
    return BinaryIncidenceMatrix(m.theta, m.n, m.cols)


def empty_columns(m: BinaryIncidenceMatrix) -> list[int]:
    return [j for j, c in enumerate(m.cols) if c == 0]


def _row_string(r: int, theta: int) -> str:
    return "".join("1" if r >> j & 1 else "0" for j in range(theta))


def write_text(m: BinaryIncidenceMatrix) -> str:
    lines = [f"{m.n} {m.theta}"]
    lines += [_row_string(r, m.theta) for r in m.rows]
    return "\n".join(lines) + "\n"


def _parse_row(s: str, theta: int, line: int) -> int:
    if len(s) != theta:
        raise ParseError(f"expected {theta} characters, got {len(s)}", line, len(s) + 1)
    r = 0
    for j, ch in enumerate(s):
        if ch == "1":
            r |= 1 << j
        elif ch != "0":
            raise ParseError(f"unexpected character {ch!r}", line, j + 1)
    return r


def read_text(text: str) -> BinaryIncidenceMatrix:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty input", 1, 1)
    head = lines[0].split()
    if len(head) != 2 or not all(h.isdigit() for h in head):
        raise ParseError("header must be 'n theta'", 1, 1)
    n, theta = map(int, head)
    body = lines[1:]
    while body and body[-1] == "":
        body.pop()
    if len(body) != n:
        raise ParseError(f"expected {n} rows, got {len(body)}", len(body) + 2, 1)
    rows = tuple(_parse_row(s, theta, k + 2) for k, s in enumerate(body))
    return BinaryIncidenceMatrix(n, theta, rows)


def to_json_obj(m: BinaryIncidenceMatrix) -> dict:
    return {"n": m.n, "theta": m.theta, "rows": [_row_string(r, m.theta) for r in m.rows]}


def write_json(m: BinaryIncidenceMatrix) -> str:
    return json.dumps(to_json_obj(m))


def read_json(text: str) -> BinaryIncidenceMatrix:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    try:
        n, theta, rows = int(obj["n"]), int(obj["theta"]), obj["rows"]
    except (KeyError, TypeError, ValueError):
        raise ParseError("expected keys n, theta, rows", 1, 1) from None
    if len(rows) != n:
        raise ParseError(f"expected {n} rows, got {len(rows)}", 1, 1)
    return BinaryIncidenceMatrix(n, theta, tuple(_parse_row(s, theta, k + 1) for k, s in enumerate(rows)))


def load(path) -> BinaryIncidenceMatrix:
    """Read a matrix file, choosing the format from its first character."""
    with open(path) as fh:
        text = fh.read()
    return read_json(text) if text.lstrip().startswith("{") else read_text(text)
