import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pomstar.algebra import GeneratorSet, OperatorPoly  # noqa: E402
from pomstar.constraints import build_accs_linear  # noqa: E402


def bosonic_two():
    g = GeneratorSet.bosonic(2)
    return build_accs_linear([OperatorPoly.q(g, 1), OperatorPoly.p(g, 1)])


def bosonic_three():
    g = GeneratorSet.bosonic(3)
    q = lambda i: OperatorPoly.q(g, i)  # noqa: E731
    p = lambda i: OperatorPoly.p(g, i)  # noqa: E731
    return build_accs_linear([q(1) + q(3), p(1), q(2), p(2) + p(3)])


def odd_three():
    g = GeneratorSet.with_odd(3, [1, 2])
    return build_accs_linear([OperatorPoly.q(g, 1), OperatorPoly.p(g, 1)])


SYSTEMS = {"N2M1": bosonic_two, "N3M2": bosonic_three, "odd": odd_three}


@pytest.fixture(scope="session")
def sys2():
    return bosonic_two()


@pytest.fixture(scope="session")
def sys3():
    return bosonic_three()


@pytest.fixture(scope="session")
def sys_odd():
    return odd_three()


@pytest.fixture(scope="session", params=list(SYSTEMS))
def any_sys(request):
    return SYSTEMS[request.param]()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
