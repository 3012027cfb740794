import sys

import pytest

from alquant import oracle, parse_qptl, translate_qptl
from alquant.boolfun import Manager

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))

FIG1 = "exists a. G (a & X (!a | b))"
FIG2 = "forall a. G (b & (X a | X !a))"


@pytest.fixture
def manager():
    return Manager()


@pytest.fixture
def fig1():
    return translate_qptl(parse_qptl(FIG1))


@pytest.fixture
def fig2():
    return translate_qptl(parse_qptl(FIG2))


def exact(A, quant, p):
    return oracle.exact_exists(A, p) if quant == "exists" else oracle.exact_forall(A, p)


def same_language(X, Y):
    return oracle.equivalent(X, Y)


FIXTURES = __import__("pathlib").Path(__file__).parent / "fixtures"


@pytest.fixture
def fixture_text():
    return lambda name: (FIXTURES / name).read_text()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = sorted(getattr(mod, "RESULTS", []), key=lambda l: int(l.split()[1].rstrip(":")))
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
