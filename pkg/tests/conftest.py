import math

import pytest

from mink2d import (
    build_natural_param,
    euclidean_spec,
    lp_spec,
    make_space,
    polygon_spec,
    trig_perturbed_circle_spec,
)

HEX_VERTICES = [(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)) for k in range(6)]


@pytest.fixture(scope="session")
def eu_space():
    return make_space(euclidean_spec())


@pytest.fixture(scope="session")
def eu_np(eu_space):
    return build_natural_param(eu_space, 512)


@pytest.fixture(scope="session")
def lp3_space():
    return make_space(lp_spec(3.0))


@pytest.fixture(scope="session")
def lp3_np(lp3_space):
    return build_natural_param(lp3_space, 1024)


@pytest.fixture(scope="session")
def lp15_space():
    return make_space(lp_spec(1.5))


@pytest.fixture(scope="session")
def lp15_np(lp15_space):
    return build_natural_param(lp15_space, 2048)


@pytest.fixture(scope="session")
def lp4_space():
    return make_space(lp_spec(4.0))


@pytest.fixture(scope="session")
def lp4_np(lp4_space):
    return build_natural_param(lp4_space, 1024)


@pytest.fixture(scope="session")
def hex_spec():
    return polygon_spec(HEX_VERTICES, "hexagon")


@pytest.fixture(scope="session")
def hex_space(hex_spec):
    return make_space(hex_spec)


@pytest.fixture(scope="session")
def trig_space():
    return make_space(trig_perturbed_circle_spec([0.05]))


@pytest.fixture(scope="session")
def trig_np(trig_space):
    return build_natural_param(trig_space, 512)
