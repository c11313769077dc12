import numpy as np
import pytest

from osclab.algebra import LambdaSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def spec1():
    return LambdaSpec((1.0,))


@pytest.fixture
def spec12():
    return LambdaSpec((1.0, 2.0))


@pytest.fixture
def spec112():
    return LambdaSpec((1.0, 1.0, 2.0))


def group_dist(a, b):
    return max(abs(a.t - b.t), abs(a.s - b.s),
               float(np.max(np.abs(a.zvec - b.zvec))))


def isom_dist(a, b):
    return max(group_dist(a.sigma, b.sigma),
               float(np.max(np.abs(a.iso.matrix - b.iso.matrix))))
