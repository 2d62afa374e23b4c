"""Seeded parameter initialization."""

import numpy as np

from dagn.numerics.tensor import Parameter


def make_rng(seed, stream=0):
    """Counter-based (Philox) generator; ``stream`` separates independent uses."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


def uniform_weight(rng, shape, name, fan_in=None):
    """Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)); fan_in defaults to shape[0]."""
    fan_in = shape[0] if fan_in is None else fan_in
    bound = 1.0 / np.sqrt(fan_in)
    return Parameter(rng.uniform(-bound, bound, size=shape), name)


def zeros(shape, name):
    return Parameter(np.zeros(shape), name)


def ones(shape, name):
    return Parameter(np.ones(shape), name)
