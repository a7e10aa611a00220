import pytest

from rpnb.data import load_builtin

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def iris():
    return load_builtin("iris")


@pytest.fixture(scope="session")
def breast_cancer():
    return load_builtin("breast_cancer")


@pytest.fixture(scope="session")
def gm():
    return load_builtin("gm", seed=0)


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion.

    Usage: ``with criterion(3, "projection statistics") as note: ... note("detail")``
    """

    class _Recorder:
        def __init__(self, number, title):
            self.number, self.title, self.details = number, title, []

        def __call__(self, detail):
            self.details.append(str(detail))

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            status = "PASS" if exc_type is None else "FAIL"
            detail = "; ".join(self.details)
            if exc is not None and not detail:
                detail = str(exc).splitlines()[0] if str(exc) else exc_type.__name__
            ACCEPTANCE_LINES.append(f"[criterion {self.number:>2}] {status}  {self.title}  ({detail})")
            return False

    return _Recorder


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("]")[0].split()[-1])):
            terminalreporter.write_line(line)
