import numpy as np
import pytest

from berglab import spaces
from berglab.coeffs import BasisSpec
from berglab.quadrature import build_rule


@pytest.fixture(scope="session")
def disc():
    return spaces.disc_space(0.0, d=2)


@pytest.fixture(scope="session")
def disc_weighted():
    return spaces.disc_space(1.5, d=2)


@pytest.fixture(scope="session")
def fock():
    return spaces.fock_space(d=2)


@pytest.fixture(scope="session")
def bidisc():
    return spaces.bidisc_space(0.0, 0.5, d=2)


@pytest.fixture(scope="session")
def all_spaces(disc, disc_weighted, fock, bidisc):
    return [disc, disc_weighted, fock, bidisc]


@pytest.fixture(scope="session")
def disc_rule(disc):
    return build_rule(disc)


@pytest.fixture(scope="session")
def fock_rule(fock):
    return build_rule(fock)


@pytest.fixture(scope="session")
def bidisc_rule(bidisc):
    return build_rule(bidisc)


@pytest.fixture(scope="session")
def disc_basis(disc):
    return BasisSpec(disc, 16)


@pytest.fixture(scope="session")
def fock_basis(fock):
    return BasisSpec(fock, 16)


@pytest.fixture(scope="session")
def bidisc_basis(bidisc):
    return BasisSpec(bidisc, 6)


def rule_for(space):
    return build_rule(space)


def sample_points(space, n, seed=0, scale=0.8):
    """Deterministic scatter of admissible points for a space."""
    rng = np.random.default_rng(seed)
    lim = scale * spaces.probe_radius_max(space)

    def draw():
        return lim * np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))

    if space.nfactors == 2:
        return np.stack([draw(), draw()], axis=-1)
    return draw()
