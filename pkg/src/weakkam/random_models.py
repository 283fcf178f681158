"""Seeded generators of random test models."""

from __future__ import annotations

import numpy as np

from .model import AFFINE, SATURATING, make_model


def random_base(rng, n, low=-5, high=5):
    """Integer base cost with entries in ``[low, high]``."""
    return rng.integers(low, high + 1, size=(n, n)).astype(float)


def random_admissible(rng, n, variant=AFFINE, low=0.1, high=1.0, scale=1.0):
    """Random model with ``alpha``/``beta`` coupling vectors in ``[low, high]``.

    Strictly positive weights make the nondegeneracy condition hold at every
    closed measure.
    """
    l0 = random_base(rng, n)
    return make_model(l0, alpha=rng.uniform(low, high, n), beta=rng.uniform(low, high, n),
                      variant=variant, scale=scale)


def admissible_suite(seed, count, max_states=5):
    """``count`` admissible models alternating affine and saturating coupling."""
    rng = np.random.default_rng(seed)
    models = []
    for i in range(count):
        n = int(rng.integers(1, max_states + 1))
        variant = SATURATING if i % 2 else AFFINE
        models.append(random_admissible(rng, n, variant))
    return models


def base_suite(seed, count, max_states=6):
    rng = np.random.default_rng(seed)
    return [random_base(rng, int(rng.integers(1, max_states + 1))) for _ in range(count)]
