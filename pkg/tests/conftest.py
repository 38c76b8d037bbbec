import json
import os

import numpy as np
import pytest

from polycontain import serialization

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "fixtures")


def fixture_path(name):
    return os.path.join(FIXTURES, name)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def expected():
    with open(fixture_path("expected.json"), "r") as f:
        return json.load(f)


@pytest.fixture
def ex1():
    """(Zx, Zy, Zy without its last generator)"""
    return tuple(serialization.load(fixture_path(name))
                 for name in ("ex1_zx.json", "ex1_zy.json", "ex1_zy_star.json"))


@pytest.fixture
def ex2():
    return serialization.load(fixture_path("ex2_zx.json")), serialization.load(fixture_path("ex2_zy.json"))


@pytest.fixture
def ex3():
    """(P1, P2, P1 ⊕ P2 in H-form)"""
    return tuple(serialization.load(fixture_path(name)) for name in ("ex3_p1.json", "ex3_p2.json", "ex3_psum.json"))


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20190101))
