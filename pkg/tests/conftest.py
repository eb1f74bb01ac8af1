import pytest

from wetrain.params import SystemParams


@pytest.fixture
def nominal():
    """Reference setup: 100 sub-bands over 10 MHz, beta=1e-5, 1 W, -120 dBm/Hz."""
    return SystemParams(m=5, n_subbands=100, bandwidth_hz=10e6, beta=1e-5, p_f=1.0,
                        n0=1e-15, eta=0.8, t_block=0.5e-3)


@pytest.fixture
def unit():
    """eta*T*P_f = 1, N0 = 1, beta = 1, two antennas."""
    return SystemParams(m=2, n_subbands=4, beta=1.0, p_f=1.0, n0=1.0, eta=1.0, t_block=1.0)
