from pathlib import Path

import numpy as np
import pytest

from ahs.cli import bundled_fixtures
from ahs import io

DEFAULT_SEED = 20240611


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=DEFAULT_SEED, help="seed for the randomized suites")


@pytest.fixture
def seed(request) -> int:
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return bundled_fixtures()


@pytest.fixture(scope="session")
def manifest(fixture_dir) -> dict:
    doc, _ = io.read_json(fixture_dir / "manifest.json")
    return doc["expected"]


@pytest.fixture(scope="session")
def fixture_triples(fixture_dir, manifest) -> dict:
    """Every bundled triple, keyed by file name, including the Lie pair converted to a triple."""
    from ahs.skew import triple_from_lie_pair

    out = {}
    for name in manifest:
        doc, _ = io.read_json(fixture_dir / name)
        kind = io.detect_kind(doc)
        if kind == "triple":
            out[name] = io.triple_from_json(doc)
        elif kind == "lie_pair":
            out[name] = triple_from_lie_pair(io.lie_pair_from_json(doc))
    return out


@pytest.fixture(scope="session")
def member_triples(fixture_triples, manifest) -> dict:
    return {k: v for k, v in fixture_triples.items() if manifest[k]}


# --- acceptance summary ------------------------------------------------------------------

_CRITERIA: dict[int, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, (title, []))
    if report.failed or (report.when == "call" and report.outcome != "passed") or report.skipped:
        entry[1].append(report.outcome)
    elif report.when == "call":
        entry[1].append("passed")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcomes = _CRITERIA[number]
        ok = bool(outcomes) and all(o == "passed" for o in outcomes)
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
