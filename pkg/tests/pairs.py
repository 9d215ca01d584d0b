"""Random smooth profile pairs shared by the property and acceptance tests.

Both surfaces are hyperboloids with openings ``lam <= 0.2``, so their slopes
stay below 0.2 everywhere; apices are placed at random lateral offsets.
"""
import numpy as np

from pfacorr.profiles import Hyperboloid


def random_pair(rng):
    R1, R2 = rng.uniform(0.5, 2.0, 2)
    l1, l2 = rng.uniform(0.05, 0.2, 2)
    d = rng.uniform(0.05, 0.3)
    c1 = tuple(rng.uniform(-0.3, 0.3, 2))
    c2 = tuple(rng.uniform(-0.3, 0.3, 2))
    return Hyperboloid(R1, l1, 0.0, -1, c1), Hyperboloid(R2, l2, d, 1, c2)


def random_pairs(n, seed):
    rng = np.random.default_rng(seed)
    return [random_pair(rng) for _ in range(n)]
