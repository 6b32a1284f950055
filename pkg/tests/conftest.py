import itertools

import pytest

from frbcodes.designs import affine_incidence, build_affine, build_td, td_incidence

_ACCEPTANCE = []


@pytest.fixture
def record():
    """Collects one line per acceptance criterion for the terminal summary."""

    def _record(criterion, passed, detail=""):
        _ACCEPTANCE.append((criterion, passed, detail))

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"{criterion}: {'PASS' if passed else 'FAIL'}  {detail}")


def td(ell, h):
    return td_incidence(build_td(ell, h))


def ap(q):
    return affine_incidence(build_affine(q))


# brute-force oracles, deliberately naive and independent of frbcodes.analysis

def brute_file_size(m, k):
    supports = m.row_supports
    return min(len(set().union(*(supports[i] for i in rows))) for rows in itertools.combinations(range(m.n), k))


def brute_t(m, delta=0):
    cols = m.col_supports
    for size in range(1, m.theta + 1):
        for T in itertools.combinations(range(m.theta), size):
            if len(set().union(*(cols[j] for j in T))) < size + delta:
                return size - 1
    return m.theta
