import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rayleigh_spectral.jost import make_medium
from rayleigh_spectral.markushevich import solve_G
from rayleigh_spectral.model import LameModel
from rayleigh_spectral.spectral import branch_rule, spectral_data

OMEGA = 1.0


def homogeneous_poisson(H=0.0):
    return LameModel(1.0, 1.0, H)


def small_bump():
    """Amplitude 0.03 mu0 bumps in mu and lambda on (0.1, 1.9), H = 2."""
    return LameModel(1.0, 1.0, 2.0, mu_bumps=[(1.0, 0.9, 0.03)], lambda_bumps=[(1.0, 0.9, 0.03)])


def two_bump():
    return LameModel(1.0, 2.0, 3.0, mu_bumps=[(0.8, 0.5, 0.2), (2.0, 0.6, -0.1)], lambda_bumps=[(1.5, 0.7, 0.3)])


@pytest.fixture(scope="session")
def hom_model():
    return homogeneous_poisson()


@pytest.fixture(scope="session")
def hom_medium(hom_model):
    return make_medium(hom_model, OMEGA)


@pytest.fixture(scope="session")
def hom_data(hom_medium):
    return spectral_data(hom_medium, rule=branch_rule(OMEGA, 1.0, 1.0, depth=400.0, n_evanescent=16))


@pytest.fixture(scope="session")
def bump_model():
    return small_bump()


@pytest.fixture(scope="session")
def bump_gmat(bump_model):
    return solve_G(bump_model)


@pytest.fixture(scope="session")
def bump_medium(bump_model, bump_gmat):
    return make_medium(bump_model, OMEGA, bump_gmat)


@pytest.fixture(scope="session")
def bump_data(bump_medium, bump_model):
    rule = branch_rule(OMEGA, bump_model.lambda0, bump_model.mu0, depth=400.0, n_evanescent=16)
    return spectral_data(bump_medium, rule=rule)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
