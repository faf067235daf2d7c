import pytest

from parisian_scale import LevyModel, build_parisian, build_scale


@pytest.fixture(scope="session")
def m1():
    """Unit-premium compound Poisson model with Exp(2) claims."""
    return LevyModel(c=1.0, sigma2=0.0, lam=1.0, phases=((1.0, 2.0),))


@pytest.fixture(scope="session")
def m2():
    """Driftless Brownian motion with variance 2 (kappa(theta) = theta^2)."""
    return LevyModel(c=0.0, sigma2=2.0, lam=0.0, phases=())


@pytest.fixture(scope="session")
def m1_q0(m1):
    return build_scale(m1, 0.0)


@pytest.fixture(scope="session")
def m1_q23(m1):
    return build_scale(m1, 2.0 / 3.0)


@pytest.fixture(scope="session")
def m2_q1(m2):
    return build_scale(m2, 1.0)


@pytest.fixture(scope="session")
def m1_par(m1):
    """q=2/3, r=1/3 so that q+r=1 and Phi_1 = 1."""
    return build_parisian(m1, 2.0 / 3.0, 1.0 / 3.0)


@pytest.fixture(scope="session")
def m1_par_sym(m1):
    """q=r=1/3 with efficiency threshold exactly 4."""
    return build_parisian(m1, 1.0 / 3.0, 1.0 / 3.0)


@pytest.fixture(scope="session")
def m2_par(m2):
    """q=1, r=3 so Phi_4 = 2 and W_{1,3} = (3 e^x - e^{-x})/2."""
    return build_parisian(m2, 1.0, 3.0)
