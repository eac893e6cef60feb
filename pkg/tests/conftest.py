import os

import numpy as np
import pytest


def pytest_collection_modifyitems(config, items):
    if os.environ.get("HWOPSIP_RUN_N256", "") in ("", "0"):
        skip = pytest.mark.skip(reason="N=256 runs need HWOPSIP_RUN_N256=1")
        for item in items:
            if "n256" in item.keywords:
                item.add_marker(skip)


def random_anisotropic_triangles(rng, count, max_aspect=1e4):
    """Random triangles with aspect ratios spread log-uniformly up to ``max_aspect``."""
    out = []
    while len(out) < count:
        aspect = 10 ** rng.uniform(0, np.log10(max_aspect))
        base = rng.uniform(0.1, 2.0)
        apex = rng.uniform(-0.5, 1.5)
        p = np.array([[0.0, 0.0], [base, 0.0], [apex * base, base / aspect]])
        theta = rng.uniform(0, 2 * np.pi)
        rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        p = p @ rot.T + rng.uniform(-1, 1, size=2)
        out.append(p)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


_STUDIES = {}


def cached_study(family, n_list=(32, 64, 128)):
    """Rows (with solutions) of a default study, computed once per session."""
    from hwopsip.study import StudyConfig, run_study

    key = (family, tuple(n_list))
    if key not in _STUDIES:
        _STUDIES[key] = run_study(StudyConfig(family, list(n_list)), keep_solutions=True)
    return _STUDIES[key]


@pytest.fixture(scope="session")
def study_cache():
    return cached_study


_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance():
    """``record(criterion, ok, detail)`` for the acceptance summary lines."""

    def record(criterion, ok, detail=""):
        line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[criterion] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[key])
