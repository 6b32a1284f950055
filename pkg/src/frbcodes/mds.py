"""Systematic Reed-Solomon (theta, M) code over GF(q).

The generator is the Vandermonde matrix on the first ``theta`` field
elements, row-reduced so its first ``M`` columns are the identity.
Erasure decoding solves the ``M x M`` system on any ``M`` known positions
and checks the remaining ones.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import (
    BadDimension,
    DivisionByZero,
    FieldTooSmall,
    Inconsistent,
    InsufficientSymbols,
    LengthMismatch,
    NotPrimePower,
)
from .gf import Field, field_new, is_prime_power


def _invert(F: Field, A: list[list[int]]) -> list[list[int]]:
    """Gauss-Jordan inverse of a square matrix over ``F``."""
    n = len(A)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise DivisionByZero("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = F.inv(aug[col][col])
        aug[col] = [F.mul(inv, x) for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _vec_mat(F: Field, v: Sequence[int], A: Sequence[Sequence[int]]) -> list[int]:
    out = [0] * len(A[0])
    for vi, row in zip(v, A):
        if vi:
            for j, a in enumerate(row):
                if a:
                    out[j] = F.add(out[j], F.mul(vi, a))
    return out


def default_field_order(theta: int) -> int:
    """Smallest power of two that is at least ``theta``."""
    q = 2
    while q < theta:
        q *= 2
    return q


@dataclass
class MdsCode:
    theta: int
    M: int
    field: Field
    eval_points: tuple[int, ...]
    generator: list[list[int]]
    _decoders: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def q(self) -> int:
        return self.field.q

    def encode(self, data: Sequence[int]) -> list[int]:
        if len(data) != self.M:
            raise LengthMismatch(f"expected {self.M} symbols, got {len(data)}")
        return _vec_mat(self.field, data, self.generator)

    def _decoder(self, positions: tuple[int, ...]) -> list[list[int]]:
        dec = self._decoders.get(positions)
        if dec is None:
            sub = [[row[p] for p in positions] for row in self.generator]
            dec = _invert(self.field, sub)
            if len(self._decoders) > 4096:
                self._decoders.clear()
            self._decoders[positions] = dec
        return dec

    def decode_erasures(self, known: Iterable[tuple[int, int]]) -> list[int]:
        """Recover the data from ``(position, symbol)`` pairs covering >= M positions."""
        syms: dict[int, int] = {}
        for pos, s in known:
            if not 0 <= pos < self.theta:
                raise IndexError(f"position {pos} outside [0, {self.theta})")
            if syms.setdefault(pos, s) != s:
                raise Inconsistent(f"two different symbols at position {pos}")
        if len(syms) < self.M:
            raise InsufficientSymbols(f"{len(syms)} distinct positions, need {self.M}")
        positions = tuple(sorted(syms)[: self.M])
        data = _vec_mat(self.field, [syms[p] for p in positions], self._decoder(positions))
        if len(syms) > self.M:
            cw = self.encode(data)
            bad = [p for p, s in syms.items() if cw[p] != s]
            if bad:
                raise Inconsistent(f"known symbols disagree with the decoded codeword at {bad[:5]}")
        return data

    def to_json_obj(self) -> dict:
        return {"theta": self.theta, "M": self.M, "q": self.q}


def mds_new(theta: int, M: int, q: int | None = None) -> MdsCode:
    if not 1 <= M <= theta:
        raise BadDimension(f"need 1 <= M <= theta, got M={M}, theta={theta}")
    q = default_field_order(theta) if q is None else q
    if not is_prime_power(q):
        raise NotPrimePower(f"{q} is not a prime power")
    if theta > q:
        raise FieldTooSmall(f"theta={theta} exceeds field order {q}")
    F = field_new(q)
    pts = tuple(range(theta))
    vander = [[F.pow(x, i) for x in pts] for i in range(M)]
    left_inv = _invert(F, [row[:M] for row in vander])
    gen = [_vec_mat(F, r, vander) for r in left_inv]
    return MdsCode(theta, M, F, pts, gen)


def encode(code: MdsCode, data: Sequence[int]) -> list[int]:
    return code.encode(data)


def decode_erasures(code: MdsCode, known: Iterable[tuple[int, int]]) -> list[int]:
    return code.decode_erasures(known)


# symbol containers --------------------------------------------------------

_MAGIC = b"FRBS"


def pack_symbols(symbols: Sequence[int], q: int, fmt: str = "json") -> bytes:
    """Serialize field-element indices.

    ``json`` gives ``{"format": "json", "q": .., "symbols": [..]}``; ``u16le``
    gives the magic ``FRBS``, a format byte (1), ``q`` and the count as
    little-endian u32, then one little-endian u16 per symbol.
    """
    if fmt == "json":
        return json.dumps({"format": "json", "q": q, "symbols": list(symbols)}).encode()
    if fmt == "u16le":
        if q > 1 << 16:
            raise ValueError("u16le needs q <= 65536")
        return _MAGIC + struct.pack("<BII", 1, q, len(symbols)) + struct.pack(f"<{len(symbols)}H", *symbols)
    raise ValueError(f"unknown format {fmt!r}")


def unpack_symbols(blob: bytes) -> tuple[list[int], int]:
    """Inverse of :func:`pack_symbols`; returns ``(symbols, q)``."""
    if blob[:4] == _MAGIC:
        flag, q, count = struct.unpack_from("<BII", blob, 4)
        if flag != 1:
            raise ValueError(f"unknown container flag {flag}")
        return list(struct.unpack_from(f"<{count}H", blob, 13)), q
    obj = json.loads(blob)
    return list(obj["symbols"]), obj["q"]
