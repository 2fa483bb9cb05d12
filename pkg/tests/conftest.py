from fractions import Fraction as F

import pytest

from conewalk import ConeSpec, OneDimModel, StepDistribution, build_model


def make_2d(weighted_steps, start=(0, 0)):
    dist = StepDistribution(2, tuple((v, w) for v, w in weighted_steps.items()))
    return build_model(dist, ConeSpec.orthant(2), start)


@pytest.fixture(scope="session")
def five_step_model():
    """Uniform quarter-plane walk on {E, S, W, N, NE}."""
    return make_2d({
        (1, 0): F(1, 5), (0, -1): F(1, 5), (-1, 0): F(1, 5),
        (0, 1): F(1, 5), (1, 1): F(1, 5),
    })


@pytest.fixture(scope="session")
def simple_walk_2d():
    """Zero-drift simple walk on {E, W, N, S}."""
    return make_2d({
        (1, 0): F(1, 4), (-1, 0): F(1, 4), (0, 1): F(1, 4), (0, -1): F(1, 4),
    })


@pytest.fixture(scope="session")
def exterior_2d():
    """Quarter-plane walk with drift (-1/6, -1/6)."""
    return make_2d({
        (1, 0): F(1, 6), (0, 1): F(1, 6), (-1, 0): F(1, 3), (0, -1): F(1, 3),
    })


@pytest.fixture(scope="session")
def trapped_2d():
    return make_2d({(1, 0): F(1, 2), (0, 1): F(1, 2)})


@pytest.fixture(scope="session")
def sym_1d():
    return OneDimModel(p=F(1, 2), q=F(1, 2)).to_walk_model()


@pytest.fixture(scope="session")
def neg_1d():
    return OneDimModel(p=F(1, 4), q=F(3, 4)).to_walk_model()


@pytest.fixture(scope="session")
def pos_1d():
    return OneDimModel(p=F(3, 4), q=F(1, 4)).to_walk_model()
