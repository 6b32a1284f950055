import itertools
import random

import pytest

from frbcodes.analysis import batch_t, ecbc_t, file_size
from frbcodes.dss import failure_sweep, reconstruct, repair, serve_batch, store
from frbcodes.errors import InsufficientSymbols, LengthMismatch, NoDistinctHelpers, Unservable
from frbcodes.incidence import BinaryIncidenceMatrix, bits
from frbcodes.matching import hopcroft_karp

from conftest import ap, td


def make(layout, k, seed=0):
    M = file_size(layout, k)
    rng = random.Random(seed)
    data = [rng.randrange(16) for _ in range(M)]
    return store(data, layout, k=k), data


@pytest.fixture(scope="module")
def td34():
    return make(td(3, 4), 4, seed=7)


def test_store_layout(td34):
    sys, data = td34
    assert sys.M == 11 and sys.mds.theta == 16 and sys.n == 12
    assert all(len(c) == 4 for c in sys.node_contents)
    holders = [sum(j in c for c in sys.node_contents) for j in range(16)]
    assert holders == [3] * 16
    assert sum(len(c) for c in sys.node_contents) == 48
    assert sys.codeword[:11] == data


def test_store_identity_and_length():
    sys = store([1, 2, 3], BinaryIncidenceMatrix.identity(3))
    assert [c for c in sys.node_contents] == [{0: 1}, {1: 2}, {2: 3}]
    with pytest.raises(LengthMismatch):
        sys.mds.encode([1])


def test_reconstruct_all_k_subsets(td34):
    sys, data = td34
    for nodes in itertools.combinations(range(12), 4):
        assert reconstruct(sys, nodes) == data
    assert sys.reconstruct(range(12)) == data


def test_reconstruct_below_k_fails(td34):
    sys, _ = td34
    errors = 0
    for nodes in itertools.combinations(range(12), 3):
        try:
            sys.reconstruct(nodes)
        except InsufficientSymbols:
            errors += 1
    assert errors > 0


@pytest.mark.parametrize("layout,alpha", [(td(3, 4), 4), (ap(4), 5), (td(2, 5), 5)])
def test_repair_every_node(layout, alpha):
    sys, _ = make(layout, 2)
    for node in range(sys.n):
        before = sys.original_content(node)
        plan = repair(sys, node)
        assert len(plan.transfers) == alpha
        assert len(set(plan.helpers)) == alpha and node not in plan.helpers
        for j, h in plan.transfers:
            assert j in sys.node_contents[h]
        assert sys.node_contents[node] == before
        assert not sys.failed


def test_repair_degenerate_layout():
    # node 0 holds symbols 0, 1; both only also live on node 1
    layout = BinaryIncidenceMatrix.from_supports(3, [{0, 1}, {0, 1, 2}, {2}])
    sys = store([2, 3], layout)
    with pytest.raises(NoDistinctHelpers):
        sys.repair(0)


def test_serve_batch_examples(td34):
    sys, _ = td34
    assert serve_batch(sys, []).assignment == {}
    for req in itertools.combinations(range(16), 11):
        a = sys.serve_batch(req).assignment
        assert sorted(a) == list(req)
        assert len(set(a.values())) == 11
        assert all(j in sys.node_contents[i] for j, i in a.items())


def test_serve_batch_witness_is_unservable(td34):
    sys, _ = td34
    w = batch_t(sys.layout).witness
    with pytest.raises(Unservable) as exc:
        sys.serve_batch(w.columns)
    cert = exc.value.certificate
    assert cert.is_valid(sys.layout)
    assert len(cert.columns) > len(cert.covered_rows)


def test_serve_batch_with_failures_certificate(td34):
    sys, _ = td34
    w = ecbc_t(sys.layout, 2).witness
    # failing two rows of the witness's cover leaves too few holders
    down = w.covered_rows[:2]
    with pytest.raises(Unservable) as exc:
        sys.serve_batch(w.columns, failed=down)
    cert = exc.value.certificate
    assert cert.delta == 2 and cert.is_valid(sys.layout)
    a = sys.serve_batch(range(8), failed=(0, 1)).assignment
    assert not set(a.values()) & {0, 1}


def test_serve_batch_rejects_bad_symbol(td34):
    with pytest.raises(IndexError):
        td34[0].serve_batch([16])


@pytest.mark.parametrize("layout,t,delta", [(td(2, 4), 3, 1), (ap(3), 4, 2)])
def test_failure_sweep_passes(layout, t, delta):
    sys, _ = make(layout, 1)
    rep = failure_sweep(sys, t, delta)
    assert rep.passed and rep.exhaustive and rep.cases_run == rep.cases_total
    rep = failure_sweep(sys, ecbc_t(layout, delta).t + 1, delta)
    assert not rep.passed
    assert rep.failures[0]["certificate"]["delta"] == delta


def test_failure_sweep_budget_is_seeded():
    sys, _ = make(ap(3), 1)
    a = failure_sweep(sys, 6, 2, budget=50, seed=3).to_json_obj()
    b = failure_sweep(sys, 6, 2, budget=50, seed=3).to_json_obj()
    assert a == b and not a["exhaustive"] and a["cases_run"] == 50 and a["seed"] == 3


def test_failed_nodes_as_batch_remark():
    sys, _ = make(td(2, 4), 1)
    rep = failure_sweep(sys, 3, 1).to_json_obj()
    # one failed node holds alpha = 4 > t symbols, so it is never a batch
    assert rep["failed_nodes_as_batch"]["patterns"] == 8
    assert rep["failed_nodes_as_batch"]["recoverable"] == 0


def test_serving_matches_t_on_small_systems():
    for layout in (td(2, 3), ap(3)):
        sys, _ = make(layout, 1)
        t = batch_t(layout).t
        cols = layout.col_supports
        for size in (t, t + 1):
            for req in itertools.combinations(range(layout.theta), size):
                ok = len(hopcroft_karp([sorted(cols[j]) for j in req])) == size
                try:
                    sys.serve_batch(req)
                    served = True
                except Unservable:
                    served = False
                assert served == ok
                if size == t:
                    assert served


def test_snapshot_and_determinism(td34):
    sys, _ = td34
    snap = sys.snapshot()
    assert snap["mds"] == {"theta": 16, "M": 11, "q": 16} and snap["k"] == 4 and snap["failed"] == []
    again, _ = make(td(3, 4), 4, seed=7)
    assert again.snapshot() == snap
    assert [again.plan_repair(i) for i in range(12)] == [sys.plan_repair(i) for i in range(12)]
    req = list(range(3, 14))
    assert again.serve_batch(req) == sys.serve_batch(req)
