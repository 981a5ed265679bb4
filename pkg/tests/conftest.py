import numpy as np
import pytest

from sphereqed import DrudeLorentzParams, SphereSystem, find_resonances


@pytest.fixture(scope="session")
def fig2_system():
    """The microsphere demo geometry: omega_p = 0.5, gamma = 1e-6, R = 10,
    delta_r = 0.14, diametrically opposite atoms."""
    return SphereSystem(
        DrudeLorentzParams(omega_p=0.5, gamma=1e-6),
        radius=10.0,
        atom_distance=0.14,
        theta=np.pi,
    )


@pytest.fixture(scope="session")
def fig2_resonance(fig2_system):
    """The sharp surface-guided resonance near 1.0501 omega_T (order l = 121)."""
    found = find_resonances(fig2_system, 1.0495, 1.0507, [121])
    assert found, "expected the l=121 resonance near 1.0501"
    return found[0]
