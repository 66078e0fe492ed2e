import random

import pytest

from cpcert.circuit import CpeDag


def small_qbf_dag():
    """forall y (not x or (x and y)) with x = 1, y = 2."""
    dag = CpeDag(2)
    x, y = dag.var(1), dag.var(2)
    phi = dag.disj(dag.neg(x), dag.conj(x, y))
    dag.root = dag.forall(2, phi)
    return dag


def three_terms_dag():
    """(x and y and not z) or (not x and y and z) or (x and not y and z)."""
    dag = CpeDag(3)
    x, y, z = dag.var(1), dag.var(2), dag.var(3)
    t1 = dag.conj(dag.conj(x, y), dag.neg(z))
    t2 = dag.conj(dag.conj(dag.neg(x), y), z)
    t3 = dag.conj(dag.conj(x, dag.neg(y)), z)
    dag.root = dag.disj(dag.disj(t1, t2), t3)
    return dag


@pytest.fixture
def small_qbf():
    return small_qbf_dag()


@pytest.fixture
def three_terms():
    return three_terms_dag()


@pytest.fixture
def rng():
    return random.Random(20240611)


# one line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line("criterion %d: %s  %s" % (key, "PASS" if ok else "FAIL", detail))
