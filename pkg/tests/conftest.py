import numpy as np
import pytest

from operatorq.mdp import environments


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def chain2():
    return environments.build('chain2')


@pytest.fixture
def loop1():
    return environments.build('loop1')


@pytest.fixture
def bandit2():
    return environments.build('bandit2')


@pytest.fixture
def grid5():
    return environments.build('grid5', gamma=0.9)


@pytest.fixture
def grid5_slip():
    return environments.build('grid5-slip', gamma=0.9)
