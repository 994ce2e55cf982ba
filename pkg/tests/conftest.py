import pytest

from chiral_nri import AtomicConfig, dephasing_rates, to_internal

GAMMA = 1e8


@pytest.fixture
def cfg():
    return AtomicConfig()


def si_params(delta_p=0.0, pump=5.0, omc=20.0, cfg=None):
    """(decays, drive, medium, dephasings) in SI for the default set."""
    cfg = cfg or AtomicConfig()
    decays, drive, medium = to_internal(cfg, delta_p=delta_p,
                                        pump_Gamma=pump, Omega_c=omc)
    return decays, drive, medium, dephasing_rates(decays)
