"""Shared fixtures and the acceptance summary printed after each run."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lumikit import pngio

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile(
    "lumikit", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("lumikit")

# titles for the one-line-per-criterion block at the end of the run
CRITERIA = {
    1: "preset fidelity",
    2: "locus monotonicity",
    3: "relight round-trip",
    4: "edge invariance",
    5: "masked loss correctness",
    6: "synthetic pipeline closure",
    7: "metric oracles",
    8: "pca behavior",
    9: "thread determinism",
    10: "real-encoder probe direction",
}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(num): ties a test to one numbered acceptance check"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report.user_properties.append(("criterion", mark.args[0]))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results: dict[int, list[str]] = {}
    for reports in terminalreporter.stats.values():
        for report in reports:
            props = getattr(report, "user_properties", None)
            if not props:
                continue
            # count call-phase outcomes, plus setup-phase skips and errors
            if report.when == "setup" and report.outcome == "passed":
                continue
            if report.when == "teardown":
                continue
            for key, num in props:
                if key == "criterion":
                    results.setdefault(num, []).append(report.outcome)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        outcomes = results[num]
        if any(o == "failed" for o in outcomes):
            verdict = "FAIL"
        elif any(o == "passed" for o in outcomes):
            verdict = "PASS"
        else:
            verdict = "SKIP"
        terminalreporter.write_line(
            f"  criterion {num:>2}  {CRITERIA.get(num, ''):<34} {verdict}"
        )


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def natural1() -> np.ndarray:
    return pngio.read_image(FIXTURES / "natural1.png")


@pytest.fixture(scope="session")
def natural2() -> np.ndarray:
    return pngio.read_image(FIXTURES / "natural2.png")


@pytest.fixture(scope="session")
def natural1_mask() -> np.ndarray:
    return pngio.read_mask(FIXTURES / "natural1_mask.png")


@pytest.fixture(scope="session")
def disk32() -> np.ndarray:
    return pngio.read_image(FIXTURES / "disk32.png")
