"""File size, batch parameter and erasure tolerance of an incidence matrix.

Everything here is driven by one quantity: for a set ``R`` of rows, the
number ``c(R)`` of columns whose support lies inside ``R``.

* ``k`` rows cover ``theta - c(complement)`` columns, so the file size for
  ``k`` is ``theta - max{c(R) : |R| = n - k}``.
* A set of ``i`` columns covering fewer than ``i + delta`` rows exists iff
  some ``R`` has ``c(R) >= |R| - delta + 1``; the smallest such ``|R|``
  gives ``t = |R| - delta``.

``c`` is computed for all ``2**n`` row sets at once with a subset-sum
(zeta) transform in numpy, split into chunks of ``2**CHUNK_BITS`` so
memory stays bounded. Exact results are limited to ``n <= EXACT_MAX_ROWS``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import NamedTuple

import numpy as np

from .errors import BadFamily, DeltaTooLarge, EmptyColumn, KOutOfRange
from .incidence import BinaryIncidenceMatrix, bits, cover_rows_mask, empty_columns, weights

EXACT_MAX_ROWS = 30
CHUNK_BITS = 24


@dataclass(frozen=True)
class Witness:
    """Columns that cover too few rows: ``|covered_rows| < |columns| + delta``."""

    columns: tuple[int, ...]
    covered_rows: tuple[int, ...]
    delta: int = 0

    def is_valid(self, m: BinaryIncidenceMatrix) -> bool:
        cov = cover_rows_mask(m, self.columns)
        return (
            tuple(bits(cov)) == tuple(self.covered_rows)
            and len(self.covered_rows) < len(self.columns) + self.delta
        )

    def to_json_obj(self) -> dict:
        return {"columns": list(self.columns), "covered_rows": list(self.covered_rows), "delta": self.delta}


def make_witness(m: BinaryIncidenceMatrix, columns, delta: int = 0) -> Witness:
    cols = tuple(sorted(columns))
    return Witness(cols, tuple(bits(cover_rows_mask(m, cols))), delta)


class TResult(NamedTuple):
    t: int
    witness: Witness | None
    exact: bool = True
    lower: int | None = None


# row-subset profile ------------------------------------------------------


@lru_cache(maxsize=4)
def _popcount_table(nbits: int) -> np.ndarray:
    pop = np.zeros(1, dtype=np.uint8)
    for _ in range(nbits):
        pop = np.concatenate([pop, pop + 1])
    return pop


@lru_cache(maxsize=4)
def _popcount_order(nbits: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices sorted by popcount, and the start offset of each popcount."""
    pop = _popcount_table(nbits)
    order = np.argsort(pop, kind="stable").astype(np.int64 if nbits > 30 else np.int32)
    starts = np.concatenate([[0], np.cumsum([comb(nbits, r) for r in range(nbits)])]).astype(np.int64)
    return order, starts


def _contained_counts(m: BinaryIncidenceMatrix, low_bits: int, high: int) -> np.ndarray:
    """``c(R)`` for every ``R`` whose high part (bits >= low_bits) equals ``high``."""
    low_mask = (1 << low_bits) - 1
    lows = [c & low_mask for c in m.cols if (c >> low_bits) & ~high == 0]
    dtype = np.uint8 if m.theta < 256 else np.uint16
    f = np.bincount(np.asarray(lows, dtype=np.int64), minlength=1 << low_bits).astype(dtype)
    for i in range(low_bits):
        v = f.reshape(-1, 2, 1 << i)
        v[:, 1, :] += v[:, 0, :]
    return f


def _chunks(n: int):
    low_bits = min(n, CHUNK_BITS)
    for high in range(1 << (n - low_bits)):
        yield low_bits, high


@lru_cache(maxsize=16)
def contained_profile(m: BinaryIncidenceMatrix) -> tuple[int, ...]:
    """``best[r]`` = max over ``|R| = r`` of the number of columns inside ``R``."""
    if m.n > EXACT_MAX_ROWS:
        raise ValueError(f"exact enumeration limited to n <= {EXACT_MAX_ROWS}")
    best = [0] * (m.n + 1)
    for low_bits, high in _chunks(m.n):
        f = _contained_counts(m, low_bits, high)
        order, starts = _popcount_order(low_bits)
        per_pop = np.maximum.reduceat(f[order], starts)
        hp = high.bit_count()
        for r, v in enumerate(per_pop.tolist()):
            best[r + hp] = max(best[r + hp], v)
    return tuple(best)


def _lex_first(masks: np.ndarray, nbits: int) -> int:
    """Among equal-size sets, the one whose sorted index tuple is smallest."""
    for i in range(nbits):
        with_bit = masks[(masks >> i) & 1 == 1]
        if with_bit.size:
            masks = with_bit
        if masks.size == 1:
            break
    return int(masks[0])


def find_row_set(m: BinaryIncidenceMatrix, size: int, need: int) -> int | None:
    """Lexicographically first row set of ``size`` rows containing >= ``need`` columns."""
    best = None
    for low_bits, high in _chunks(m.n):
        hp = high.bit_count()
        if not 0 <= size - hp <= low_bits:
            continue
        f = _contained_counts(m, low_bits, high)
        pop = _popcount_table(low_bits)
        cand = np.flatnonzero((pop == size - hp) & (f >= need))
        if cand.size:
            r = _lex_first(cand, low_bits) | (high << low_bits)
            if best is None or bits(r) < bits(best):
                best = r
    return best


def _witness_inside(m: BinaryIncidenceMatrix, rows_mask: int, count: int, delta: int) -> Witness:
    inside = [j for j, c in enumerate(m.cols) if c & ~rows_mask == 0]
    return make_witness(m, inside[:count], delta)


# file size --------------------------------------------------------------


def _check_k(m: BinaryIncidenceMatrix, k: int) -> None:
    if not 1 <= k <= m.n:
        raise KOutOfRange(f"k={k} outside [1, {m.n}]")


def file_size(m: BinaryIncidenceMatrix, k: int) -> int:
    """Minimum number of columns covered by any ``k`` rows."""
    _check_k(m, k)
    if m.n <= EXACT_MAX_ROWS:
        return m.theta - contained_profile(m)[m.n - k]
    return min(
        cover_cols_count(m, rows) for rows in combinations(range(m.n), k)
    )


def cover_cols_count(m: BinaryIncidenceMatrix, rows) -> int:
    acc = 0
    for i in rows:
        acc |= m.rows[i]
    return acc.bit_count()


def file_size_witness(m: BinaryIncidenceMatrix, k: int) -> tuple[int, ...]:
    """A ``k``-set of rows attaining :func:`file_size` (lexicographically first complement)."""
    _check_k(m, k)
    best = contained_profile(m)[m.n - k]
    comp = find_row_set(m, m.n - k, best)
    full = (1 << m.n) - 1
    return tuple(bits(full & ~comp))


# batch parameter ------------------------------------------------------------


def _min_col_weight(m: BinaryIncidenceMatrix) -> int:
    if empty_columns(m):
        raise EmptyColumn(f"columns {empty_columns(m)} are empty")
    return min(c.bit_count() for c in m.cols)


def ecbc_t(m: BinaryIncidenceMatrix, delta: int, *, samples: int = 2000, seed: int = 0) -> TResult:
    """Largest ``t`` such that any ``i <= t`` columns cover at least ``i + delta`` rows."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if m.theta == 0:
        return TResult(0, None)
    wmin = _min_col_weight(m)
    if delta > wmin - 1:
        raise DeltaTooLarge(f"delta={delta} exceeds min column weight - 1 = {wmin - 1}")
    if m.n > EXACT_MAX_ROWS:
        return _sampled_t(m, delta, samples, seed)
    best = contained_profile(m)
    for r in range(max(delta, wmin), m.n + 1):
        need = r - delta + 1
        if best[r] >= need:
            rows = find_row_set(m, r, need)
            return TResult(r - delta, _witness_inside(m, rows, need, delta))
    return TResult(m.theta, None)


def batch_t(m: BinaryIncidenceMatrix, **kw) -> TResult:
    """Largest ``t`` such that any ``i <= t`` columns cover at least ``i`` rows."""
    return ecbc_t(m, 0, **kw)


def _sampled_t(m, delta, samples, seed) -> TResult:
    """Bounds for matrices too tall for exact enumeration.

    Upper bound from greedily grown row sets seeded at random columns; lower
    bound from the brute-force oracle on column sets of size <= 3.
    """
    rng = random.Random(seed)
    upper, witness = m.theta, None
    for _ in range(samples):
        rows = m.cols[rng.randrange(m.theta)]
        while True:
            inside = sum(1 for c in m.cols if c & ~rows == 0)
            size = rows.bit_count()
            if inside >= size - delta + 1 and size - delta < upper:
                upper = size - delta
                witness = _witness_inside(m, rows, size - delta + 1, delta)
                break
            outside = [c for c in m.cols if c & ~rows]
            if not outside or size - delta >= upper:
                break
            grow = min((c | rows).bit_count() for c in outside)
            pick = rng.choice([c for c in outside if (c | rows).bit_count() == grow])
            rows |= pick
    lower, _ = batch_t_oracle(m, delta, min(3, m.theta))
    return TResult(upper, witness, exact=False, lower=min(lower, upper))


def batch_t_oracle(m: BinaryIncidenceMatrix, delta: int, max_size: int) -> tuple[int, Witness | None]:
    """Brute force over column sets of size <= ``max_size``.

    Returns ``(s - 1, witness)`` for the smallest violating size ``s``, or
    ``(max_size, None)`` when nothing up to ``max_size`` violates. Sets of
    each size are visited in lexicographic order.
    """
    max_size = min(max_size, m.theta)
    level = [(-1, 0, 0)]  # (last column, column mask, covered rows)
    for s in range(1, max_size + 1):
        nxt = []
        for last, cmask, cov in level:
            for j in range(last + 1, m.theta):
                c2 = cov | m.cols[j]
                if c2.bit_count() < s + delta:
                    return s - 1, make_witness(m, bits(cmask | 1 << j), delta)
                nxt.append((j, cmask | 1 << j, c2))
        level = nxt
    return max_size, None


# expansion view -------------------------------------------------------------


@dataclass
class ExpansionReport:
    t: int
    k: int
    M: int
    symbols_side: bool
    nodes_side: bool
    symbols_witness: Witness | None = None
    nodes_witness: tuple[int, ...] | None = None
    nodes_neighbours: int | None = None

    @property
    def passed(self) -> bool:
        return self.symbols_side and self.nodes_side

    def to_json_obj(self) -> dict:
        return {
            "t": self.t, "k": self.k, "M": self.M, "passed": self.passed,
            "symbols_side": {"passed": self.symbols_side,
                             "witness": self.symbols_witness and self.symbols_witness.to_json_obj()},
            "nodes_side": {"passed": self.nodes_side, "witness": self.nodes_witness,
                           "neighbours": self.nodes_neighbours},
        }


def expansion_check(m: BinaryIncidenceMatrix, t: int, k: int, M: int) -> ExpansionReport:
    """Bipartite-graph form: every <= t symbols have >= that many node
    neighbours, and every k nodes have >= M symbol neighbours."""
    tr = batch_t(m)
    sym_ok = tr.t >= t
    rows = file_size_witness(m, k)
    got = cover_cols_count(m, rows)
    return ExpansionReport(
        t, k, M, sym_ok, got >= M,
        None if sym_ok else tr.witness,
        None if got >= M else rows,
        got,
    )


# closed forms and construction claims ----------------------------------------

FAMILIES = ("TD2", "TD3", "TDRES", "AFFINE")


def _family(name: str) -> str:
    f = name.upper().replace("-", "").replace("_", "")
    if f not in FAMILIES:
        raise BadFamily(f"unknown family {name!r}; expected one of {FAMILIES}")
    return f


def family_n(family: str, a: int) -> int:
    f = _family(family)
    return {"TD2": 2 * a, "TD3": 3 * a, "TDRES": a * (a - 1), "AFFINE": a * a}[f]


def formula_M(family: str, a: int, k: int) -> tuple[int, bool]:
    """Closed-form file size; the flag says whether it is an equality (else a lower bound)."""
    f = _family(family)
    if not 1 <= k <= family_n(f, a):
        raise KOutOfRange(f"k={k} outside [1, {family_n(f, a)}] for {f}({a})")
    if f == "TD2":
        return k * a - k * k // 4, True
    if f == "AFFINE":
        return k * (a + 1) - comb(k, 2), True
    groups = 3 if f == "TD3" else a - 1
    x, y = divmod(k, groups)
    return k * a - comb(k, 2) + groups * comb(x, 2) + x * y, f == "TD3"


@dataclass(frozen=True)
class Claims:
    """Values claimed for one construction."""

    t: tuple[int, int] | None  # inclusive bounds on the batch parameter
    ecbc: dict = field(default_factory=dict)  # delta -> inclusive bounds
    m_exact_max_k: int | None = None  # equality checked for k <= this


def construction_claims(family: str, a: int) -> Claims:
    f = _family(family)
    if f == "TD2":
        return Claims((5, 5) if a > 2 else None, {1: (3, 3)} if a > 2 else {}, 2 * a)
    if f == "TDRES":
        return Claims((a * a - a - 1,) * 2, {}, None)
    if f == "AFFINE":
        lo = (a * a - a + 2) // 2
        return Claims((a * a,) * 2, {a - 1: (lo, a * a - a)}, a)
    # TD3: the TD(3,4) example falls under the resolvable TD(alpha-1, alpha) case
    t = {4: (11, 11), 5: (12, 12)}.get(a, (6, 2 * a + 1) if a >= 7 else None)
    ecbc = {}
    if a > 3:
        ecbc[2] = {4: (8, 8), 5: (9, 9)}.get(a, (4, 2 * a - 2))
    return Claims(t, ecbc, 3 * a)


@dataclass
class CodeReport:
    family: str
    param: int
    n: int
    theta: int
    rho: int | None
    alpha: int | None
    M_table: list[dict]
    t: dict
    ecbc: list[dict]
    witnesses: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        rows = self.M_table + [self.t] + self.ecbc + self.witnesses
        return all(r.get("passed", True) for r in rows)

    def code_string(self, k: int) -> str | None:
        """``rho-(n,M,k,alpha,t)`` for a tabulated ``k``."""
        for row in self.M_table:
            if row["k"] == k:
                return f"{self.rho}-({self.n},{row['computed']},{k},{self.alpha},{self.t['computed']})"
        return None

    def to_json_obj(self) -> dict:
        return {
            "family": self.family,
            "param": self.param,
            "params": {"n": self.n, "theta": self.theta, "rho": self.rho, "alpha": self.alpha},
            "M_table": self.M_table,
            "t": self.t,
            "ecbc": self.ecbc,
            "witnesses": self.witnesses,
            "passed": self.passed,
        }


def _in(bounds, v) -> bool | None:
    return None if bounds is None else bounds[0] <= v <= bounds[1]


def verify_code(m: BinaryIncidenceMatrix, family: str, param: int, k_range=None, deltas=None) -> CodeReport:
    """Compare computed parameters of ``m`` against the closed forms for ``family``."""
    f = None if family is None else _family(family)
    claims = Claims(None) if f is None else construction_claims(f, param)
    prof = weights(m)
    k_range = list(k_range) if k_range is not None else list(range(1, m.n + 1))
    table = []
    for k in k_range:
        got = file_size(m, k)
        try:
            val, exact = formula_M(f, param, k) if f else (None, False)
        except KOutOfRange:
            val, exact = None, False
        checked = val is not None and (not exact or claims.m_exact_max_k is None or k <= claims.m_exact_max_k)
        if val is None or not checked:
            ok = None
        else:
            ok = got == val if exact else got >= val
        row = {"k": k, "computed": got, "formula": val, "exact": exact, "checked": checked}
        if ok is not None:
            row["passed"] = ok
        table.append(row)

    tr = batch_t(m)
    t_entry = {
        "computed": tr.t,
        "exact": tr.exact,
        "claimed_bounds": None if claims.t is None else list(claims.t),
        "witness": tr.witness and tr.witness.to_json_obj(),
    }
    if claims.t is not None:
        t_entry["passed"] = tr.exact and _in(claims.t, tr.t)

    deltas = sorted(set(deltas) if deltas is not None else set(claims.ecbc))
    ecbc = []
    for d in deltas:
        try:
            er = ecbc_t(m, d)
        except DeltaTooLarge:
            ecbc.append({"delta": d, "t": None, "witness": None, "claimed_bounds": None,
                         "error": "delta too large"})
            continue
        b = claims.ecbc.get(d)
        entry = {"delta": d, "t": er.t, "exact": er.exact,
                 "witness": er.witness and er.witness.to_json_obj(),
                 "claimed_bounds": None if b is None else list(b)}
        if b is not None:
            entry["passed"] = er.exact and _in(b, er.t)
        ecbc.append(entry)

    return CodeReport(f, param, m.n, m.theta, prof.rho, prof.alpha, table, t_entry, ecbc,
                      _construction_witnesses(m, f, param))


def _construction_witnesses(m: BinaryIncidenceMatrix, f: str | None, param: int) -> list[dict]:
    """Explicit violating configurations from the bound proofs, when they apply."""
    out = []
    if f == "TD3" and param >= 7:
        w = td3_upper_witness(m, param)
        out.append({
            "name": "td3_upper_bound",
            "claim": f"{2 * param + 2} columns covering {2 * param + 1} rows",
            "witness": w and w.to_json_obj(),
            "passed": w is not None and w.is_valid(m),
        })
    if f == "AFFINE":
        from .designs import affine_incidence, build_affine

        ap = build_affine(param)
        if affine_incidence(ap) == m:
            w, info = affine_erasure_witness(ap)
            out.append({
                "name": "affine_erasure_upper_bound",
                "claim": f"{param * param - param + 1} lines covering at most {param * param - 1} points",
                "witness": w.to_json_obj(),
                "construction": info,
                "passed": w.is_valid(m) and len(w.covered_rows) <= param * param - 1,
            })
    return out


# explicit violating configurations ---------------------------------------------


def find_covering_witness(m: BinaryIncidenceMatrix, n_columns: int, n_rows: int) -> Witness | None:
    """Some ``n_columns`` columns covering at most ``n_rows`` rows, if any exist."""
    rows = find_row_set(m, n_rows, n_columns)
    if rows is None:
        return None
    return _witness_inside(m, rows, n_columns, max(0, n_rows - n_columns + 1))


def td3_upper_witness(m: BinaryIncidenceMatrix, alpha: int) -> Witness | None:
    """``2*alpha + 2`` blocks of TD(3, alpha) covering ``2*alpha + 1`` points."""
    w = find_covering_witness(m, 2 * alpha + 2, 2 * alpha + 1)
    return None if w is None else Witness(w.columns, w.covered_rows, 0)


def affine_erasure_witness(ap) -> tuple[Witness, dict]:
    """The ``q^2 - q + 1`` lines of A(q) that leave exactly one point uncovered.

    Pick a line ``b`` and its first point ``p``; take a line parallel to
    ``b`` other than ``b`` itself, plus the ``q - 1`` lines missing ``p``
    in every other parallel class. With ``delta = q - 1`` they violate the
    erasure covering condition, so ``t <= q^2 - q``.
    """
    from .designs import affine_incidence

    q = ap.q
    m = affine_incidence(ap)
    b_class = 0
    b = ap.parallel_classes[b_class][0]
    p = ap.lines[b][0]
    erased = [x for x in ap.lines[b] if x != p]
    cols = [next(ln for ln in ap.parallel_classes[b_class] if ln != b)]
    for ci, cls in enumerate(ap.parallel_classes):
        if ci != b_class:
            cols += [ln for ln in cls if p not in ap.lines[ln]]
    w = make_witness(m, cols, q - 1)
    return w, {"line": b, "kept_point": p, "erased_points": erased}
