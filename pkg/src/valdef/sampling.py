"""Seeded random series for the property suites.

A sample has valuation drawn uniformly from ``[-V, V]`` (in steps of ``1/e``)
and support inside ``[v, v + span]``: the leading exponent is always present,
every other one independently with probability 1/2, each with a uniform
nonzero coefficient.
"""

import numpy as np

from .laurent import LaurentPoly

SPAN = 8


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def random_nonzero(rng, field):
    return field.from_index(int(rng.integers(1, field.q)))


def random_element(rng, field):
    return field.from_index(int(rng.integers(0, field.q)))


def sample_series(rng, field, window=5, ram=1, valuation=None, span=SPAN):
    """``valuation`` (exponent numerator) overrides the uniform draw."""
    if valuation is None:
        n = int(rng.integers(-window * ram, window * ram + 1))
    else:
        n = valuation
    terms = {n: random_nonzero(rng, field)}
    present = rng.random(span) < 0.5
    for j in range(span):
        if present[j]:
            terms[n + 1 + j] = random_nonzero(rng, field)
    return LaurentPoly.from_terms(field, terms, ram)


def sample_with_valuation_range(rng, field, lo, hi, ram=1, span=SPAN):
    """Valuation numerator uniform in ``[lo, hi]``."""
    return sample_series(rng, field, valuation=int(rng.integers(lo, hi + 1)), ram=ram, span=span)
