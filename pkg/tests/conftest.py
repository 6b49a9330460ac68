"""Pytest configuration and fixtures for hassekit tests."""

import os
import random

import pytest

from hassekit.core.config import Bounds, configure_bounds
from hassekit.core.etale import EtaleInvolutionAlgebra
from hassekit.core.fields import FieldFactor
from hassekit.core.quaternion import QuaternionAlgebra


@pytest.fixture(autouse=True)
def reset_bounds(monkeypatch):
    """Start every test from default bounds, ignoring the caller's environment."""
    for key in list(os.environ):
        if key.startswith("HASSEKIT_"):
            monkeypatch.delenv(key, raising=False)
    configure_bounds(Bounds())
    yield
    configure_bounds(None)


@pytest.fixture
def bounds():
    """Default bounds, passed explicitly."""
    return Bounds()


@pytest.fixture
def small_bounds():
    """Tight bounds that make searches give up quickly."""
    return Bounds(checkpoint_cap=50, prescribe_cap=50, witness_cap=4, pool_cap=2)


@pytest.fixture
def rng():
    """Seeded generator for the randomized property checks."""
    return random.Random(20240611)


@pytest.fixture
def q():
    """The rational field Q."""
    return FieldFactor.rational()


@pytest.fixture
def q_sqrt5():
    """Q(sqrt 5): 5 ramifies, 11 splits, 2 and 3 are inert."""
    return FieldFactor.quadratic(5)


@pytest.fixture
def q_sqrt13():
    """Q(sqrt 13)."""
    return FieldFactor.quadratic(13)


@pytest.fixture
def hamilton():
    """Hamilton quaternions (-1, -1)_Q, ramified at 2 and infinity."""
    return QuaternionAlgebra(-1, -1)


@pytest.fixture
def rank_two_split_algebra(q):
    """E = Q(sqrt 5) over F = Q, the smallest algebra with involution."""
    return EtaleInvolutionAlgebra((q,), ((5,),))


@pytest.fixture
def example_algebra(q, q_sqrt13):
    """F = Q x Q(sqrt 13) with d = (13, 17)."""
    return EtaleInvolutionAlgebra((q, q_sqrt13), ((13,), (17, 0)))
