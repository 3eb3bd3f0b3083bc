import warnings

import pytest

from slowsbs.params import DualPumpConfig, WaveguideParams, thermal_occupation

NOMINAL = dict(g=1e6, gamma=1e8, v_g=1e8, length=1e-2, omega_phonon=5e10)


@pytest.fixture
def nominal_params():
    return WaveguideParams(**NOMINAL, temperature=0.1, n_bar=thermal_occupation(5e10, 0.1))


@pytest.fixture
def cold_params():
    return WaveguideParams(**NOMINAL, n_bar=0.0)


@pytest.fixture
def nominal_dual():
    return DualPumpConfig.from_scaled(2.5e7, 0.5, 1e8, 2.0)


@pytest.fixture
def desk_dual():
    return DualPumpConfig.from_scaled(2.5e5, 0.5, 1e6, 2.0)


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield
