import sys
import time
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from hamlearn.sweep import SweepConfig, sweep_assignments

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def timed_sweep():
    """Full sweeps are expensive; run each configuration once per session."""
    cache = {}

    def run(**kw):
        key = tuple(sorted(kw.items()))
        if key not in cache:
            t0 = time.perf_counter()
            report = sweep_assignments(SweepConfig(**kw))
            cache[key] = (report, time.perf_counter() - t0)
        return cache[key]

    return run


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
