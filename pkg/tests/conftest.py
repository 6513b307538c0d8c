import pytest


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if "test_acceptance" in report.nodeid and report.when == "call":
        status = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::", 1)[1]
        print(f"[{status}] {name}", flush=True)


@pytest.fixture(scope="session")
def fixtures_dir():
    from pathlib import Path

    return Path(__file__).resolve().parents[1] / "fixtures" / "minibench"
