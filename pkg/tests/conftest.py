import functools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from curvform.catalog import MET1_PRESETS, build_met1, build_met2, build_met2_block, get_entry
from curvform.curvature import curvature_package

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large, HealthCheck.large_base_example])
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def met1_chart(case):
    return build_met1(*MET1_PRESETS[case])


def sample(metric, count, seed, dim):
    rng = np.random.default_rng(seed)
    box = get_entry(metric).sample_box(dim)
    return box[:, 0] + (box[:, 1] - box[:, 0]) * rng.random((count, dim))


def met1_packages(case, count=5, seed=0):
    chart = met1_chart(case)
    return [curvature_package(chart, p) for p in sample("met1", count, seed, 5)]


@pytest.fixture(scope="session")
def met2_chart():
    return build_met2()


@pytest.fixture(scope="session")
def met2_pkg(met2_chart):
    return curvature_package(met2_chart, [0.3, 0.2, 0.1, 0.4, 1.5, 0.7])


@pytest.fixture(scope="session")
def block_pkg():
    return curvature_package(build_met2_block(), [0.3, 0.6, 0.2])


@pytest.fixture(scope="session")
def case_pkgs():
    return {case: met1_packages(case, 5, seed=11) for case in MET1_PRESETS}


def rel_err(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[number])
