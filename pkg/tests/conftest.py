import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


VERDICTS = {}


@pytest.fixture
def criterion(request):
    """Record a PASS/FAIL verdict for an acceptance test named ``test_criterion_NN_*``.

    A test that raises before recording is reported as FAIL.
    """
    number = int(request.node.name.split("_")[2])

    def record(ok, detail=""):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        VERDICTS[number] = line
        print(line)
        return ok

    yield record
    if number not in VERDICTS:
        VERDICTS[number] = f"criterion {number:2d}: FAIL  raised before a verdict"


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[number])
