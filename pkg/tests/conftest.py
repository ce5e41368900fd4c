import numpy as np
import pytest

from qsynth.pauli import PauliString

_RESULTS: dict[int, dict] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    number, description = marker.args
    entry = _RESULTS.setdefault(number, {"description": description, "ok": True})
    if call.excinfo is not None:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        entry = _RESULTS[number]
        status = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {entry['description']}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_string(rng, n, max_weight=None, hermitian=True):
    """Random Pauli string on ``n`` qubits with at least one letter."""
    max_weight = n if max_weight is None else min(max_weight, n)
    w = int(rng.integers(1, max_weight + 1))
    qs = sorted(rng.choice(n, size=w, replace=False).tolist())
    letters = tuple((q, "XYZ"[int(rng.integers(3))]) for q in qs)
    power = int(rng.choice([0, 2])) if hermitian else int(rng.integers(4))
    return PauliString(letters, power)
