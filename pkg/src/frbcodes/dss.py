"""Storage simulator: MDS codeword symbols replicated on nodes by an incidence matrix.

Node ``i`` stores codeword position ``j`` whenever the layout has a one at
``(i, j)``. The simulator reconstructs the file from any node set, repairs a
single node by copying one symbol from each of ``alpha`` distinct helpers,
and serves batch reads (one symbol per alive node) through bipartite
matching.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .analysis import Witness, make_witness
from .errors import InsufficientSymbols, NoDistinctHelpers, Unservable
from .incidence import BinaryIncidenceMatrix, bits, write_text
from .matching import hall_violator, hopcroft_karp
from .mds import MdsCode, mds_new


@dataclass(frozen=True)
class RepairPlan:
    failed_node: int
    transfers: tuple[tuple[int, int], ...]  # (symbol position, helper node)

    @property
    def helpers(self) -> list[int]:
        return [h for _, h in self.transfers]

    def to_json_obj(self) -> dict:
        return {"failed_node": self.failed_node, "transfers": [list(t) for t in self.transfers]}


@dataclass(frozen=True)
class BatchAssignment:
    assignment: dict[int, int]  # symbol position -> serving node

    def to_json_obj(self) -> dict:
        return {str(k): v for k, v in sorted(self.assignment.items())}


def layout_digest(layout: BinaryIncidenceMatrix) -> str:
    return hashlib.sha256(write_text(layout).encode()).hexdigest()


@dataclass
class StorageSystem:
    mds: MdsCode
    layout: BinaryIncidenceMatrix
    codeword: list[int]
    node_contents: list[dict[int, int] | None]
    failed: set[int] = field(default_factory=set)
    k: int | None = None

    @property
    def n(self) -> int:
        return self.layout.n

    @property
    def M(self) -> int:
        return self.mds.M

    def alive(self) -> list[int]:
        return [i for i in range(self.n) if i not in self.failed]

    def original_content(self, node: int) -> dict[int, int]:
        return {j: self.codeword[j] for j in bits(self.layout.rows[node])}

    # file access ---------------------------------------------------------

    def reconstruct(self, nodes: Iterable[int]) -> list[int]:
        known = {}
        for i in nodes:
            if i in self.failed:
                raise ValueError(f"node {i} is failed")
            known.update(self.node_contents[i])
        if len(known) < self.M:
            raise InsufficientSymbols(f"nodes hold {len(known)} distinct symbols, file needs {self.M}")
        return self.mds.decode_erasures(known.items())

    # repair --------------------------------------------------------------

    def fail(self, node: int) -> None:
        self.failed.add(node)
        self.node_contents[node] = None

    def plan_repair(self, node: int) -> RepairPlan:
        wanted = bits(self.layout.rows[node])
        adj = [
            [h for h in bits(self.layout.cols[j]) if h != node and h not in self.failed]
            for j in wanted
        ]
        match = hopcroft_karp(adj)
        if len(match) < len(wanted):
            raise NoDistinctHelpers(
                f"node {node}: only {len(match)} distinct helpers for {len(wanted)} symbols"
            )
        return RepairPlan(node, tuple((wanted[u], h) for u, h in sorted(match.items())))

    def repair(self, node: int) -> RepairPlan:
        """Fail ``node`` if needed, then restore it by uncoded copies from distinct helpers."""
        if node not in self.failed:
            self.fail(node)
        plan = self.plan_repair(node)
        self.node_contents[node] = {j: self.node_contents[h][j] for j, h in plan.transfers}
        self.failed.discard(node)
        return plan

    # batch reads ---------------------------------------------------------

    def serve_batch(self, request: Iterable[int], failed: Iterable[int] = ()) -> BatchAssignment:
        """Assign each requested symbol a distinct alive node that stores it.

        Raises :class:`Unservable` carrying a Hall-violator :class:`Witness`
        (with ``delta`` = number of unavailable nodes) when impossible.
        """
        req = sorted(set(request))
        for j in req:
            if not 0 <= j < self.layout.theta:
                raise IndexError(f"symbol {j} outside [0, {self.layout.theta})")
        down = self.failed | set(failed)
        holders = [[i for i in bits(self.layout.cols[j]) if i not in down] for j in req]
        return _assign(self.layout, req, holders, len(down))

    def snapshot(self) -> dict:
        return {
            "mds": self.mds.to_json_obj(),
            "layout": {"n": self.layout.n, "theta": self.layout.theta, "sha256": layout_digest(self.layout)},
            "k": self.k,
            "codeword": list(self.codeword),
            "failed": sorted(self.failed),
        }


def _assign(layout, req: Sequence[int], holders: Sequence[Sequence[int]], n_down: int) -> BatchAssignment:
    match = hopcroft_karp(holders)
    if len(match) == len(req):
        return BatchAssignment({req[u]: v for u, v in match.items()})
    viol = hall_violator(holders, match)
    cert = make_witness(layout, [req[u] for u in viol], n_down)
    raise Unservable(f"{len(viol)} requested symbols have fewer alive holders", cert)


def store(data: Sequence[int], layout: BinaryIncidenceMatrix, q: int | None = None, k: int | None = None) -> StorageSystem:
    """Encode ``data`` (``M = len(data)``) and place the codeword per ``layout``."""
    code = mds_new(layout.theta, len(data), q)
    cw = code.encode(data)
    contents = [{j: cw[j] for j in bits(r)} for r in layout.rows]
    return StorageSystem(code, layout, cw, contents, set(), k)


def reconstruct(sys: StorageSystem, nodes: Iterable[int]) -> list[int]:
    return sys.reconstruct(nodes)


def repair(sys: StorageSystem, node: int) -> RepairPlan:
    return sys.repair(node)


def serve_batch(sys: StorageSystem, request: Iterable[int], failed: Iterable[int] = ()) -> BatchAssignment:
    return sys.serve_batch(request, failed)


# sweeps -------------------------------------------------------------------

MAX_RECORDED_FAILURES = 100


@dataclass
class SweepReport:
    t: int
    delta: int
    seed: int
    cases_total: int
    cases_run: int = 0
    exhaustive: bool = True
    failure_count: int = 0
    failures: list[dict] = field(default_factory=list)
    remark_patterns: int = 0
    remark_batch_recoverable: int = 0
    remark_exceptions: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def record(self, failed_nodes, request, cert: Witness) -> None:
        self.failure_count += 1
        if len(self.failures) < MAX_RECORDED_FAILURES:
            self.failures.append(
                {"failed_nodes": list(failed_nodes), "request": list(request), "certificate": cert.to_json_obj()}
            )

    def to_json_obj(self) -> dict:
        return {
            "t": self.t,
            "delta": self.delta,
            "seed": self.seed,
            "cases_total": self.cases_total,
            "cases_run": self.cases_run,
            "exhaustive": self.exhaustive,
            "failure_count": self.failure_count,
            "failures": self.failures,
            "failed_nodes_as_batch": {
                "patterns": self.remark_patterns,
                "recoverable": self.remark_batch_recoverable,
                "exceptions": self.remark_exceptions,
            },
            "passed": self.passed,
        }


def failure_sweep(sys: StorageSystem, t: int, delta: int, budget: int = 0, seed: int = 0) -> SweepReport:
    """Serve every ``t``-symbol request under every ``delta``-node failure.

    ``budget`` caps the number of (failure, request) cases; ``0`` means no
    cap. Above the cap, cases are drawn with ``random.Random(seed)``.
    Separately, each failure pattern's own symbols are tried as a batch
    from the surviving nodes.
    """
    lay = sys.layout
    n, theta = lay.n, lay.theta
    total = comb(n, delta) * comb(theta, t)
    rep = SweepReport(t, delta, seed, total)
    rep.exhaustive = budget == 0 or total <= budget

    def holders_for(pattern):
        down = sys.failed | set(pattern)
        return [[i for i in bits(c) if i not in down] for c in lay.cols], len(down)

    def run(pattern, request, table, n_down):
        rep.cases_run += 1
        try:
            _assign(lay, request, [table[j] for j in request], n_down)
        except Unservable as exc:
            rep.record(pattern, request, exc.certificate)

    if rep.exhaustive:
        for pattern in combinations(range(n), delta):
            table, n_down = holders_for(pattern)
            for request in combinations(range(theta), t):
                run(pattern, request, table, n_down)
    else:
        rng = random.Random(seed)
        for _ in range(budget):
            pattern = tuple(sorted(rng.sample(range(n), delta)))
            request = tuple(sorted(rng.sample(range(theta), t)))
            table, n_down = holders_for(pattern)
            run(pattern, request, table, n_down)

    for pattern in combinations(range(n), delta):
        if not pattern:
            continue
        rep.remark_patterns += 1
        symbols = bits(or_masks(lay.rows[i] for i in pattern))
        ok = len(symbols) <= t
        if ok:
            table, n_down = holders_for(pattern)
            try:
                _assign(lay, symbols, [table[j] for j in symbols], n_down)
            except Unservable:
                ok = False
        if ok:
            rep.remark_batch_recoverable += 1
        elif len(rep.remark_exceptions) < MAX_RECORDED_FAILURES:
            rep.remark_exceptions.append({"failed_nodes": list(pattern), "symbols": len(symbols)})
    return rep


def or_masks(masks: Iterable[int]) -> int:
    acc = 0
    for x in masks:
        acc |= x
    return acc
