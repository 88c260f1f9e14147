import pytest

from halobif.dynamics import CMField
from halobif.params import load_case
from halobif.reproduce import pipeline


@pytest.fixture(scope="session")
def sun_vesta():
    return load_case("sun-vesta")


@pytest.fixture(scope="session")
def earth_moon():
    return load_case("earth-moon")


@pytest.fixture(scope="session")
def sv_cm(sun_vesta):
    """Sun-Vesta (beta = 0.01) L1 center-manifold Hamiltonian at N = 4."""
    return pipeline(sun_vesta, 1, 4)[2]


@pytest.fixture(scope="session")
def em_cm(earth_moon):
    return pipeline(earth_moon, 1, 4)[2]


@pytest.fixture(scope="session")
def sv_field(sv_cm):
    return CMField(sv_cm)


@pytest.fixture(scope="session")
def harmonic_field(sv_cm):
    """Quadratic part only: two uncoupled harmonic oscillators."""
    return CMField(sv_cm.quadratic_only())


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def report(request):
    """Record one summary line per acceptance criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def add(number, passed, detail, info=False):
        status = "INFO" if info else ("PASS" if passed else "FAIL")
        line = f"criterion {number:>2}: {status}  {detail}"
        lines.append(line)
        print("\n" + line)
        return passed

    return add


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
