"""Seeded random parameter/point draws shared by several test modules."""

import numpy as np

from nestfn.model import InputPoint, Parameters
from nestfn.rng import make_rng


def random_interior(seed, n, weights=(0.0, 1.0), curv=(0.1, 1.0), box=(0.1, 100.0)):
    """n draws of (Parameters, InputPoint) with sigma, delta in ``weights``,
    |p|, |q| in ``curv`` with random signs, and K, L log-uniform in ``box``."""
    rng = make_rng(seed)
    u = rng.random((n, 8))
    out = []
    for row in u:
        sigma = weights[0] + row[0] * (weights[1] - weights[0])
        delta = weights[0] + row[1] * (weights[1] - weights[0])
        p = (curv[0] + row[2] * (curv[1] - curv[0])) * (1 if row[4] < 0.5 else -1)
        q = (curv[0] + row[3] * (curv[1] - curv[0])) * (1 if row[5] < 0.5 else -1)
        lo, hi = np.log(box)
        K = float(np.exp(lo + row[6] * (hi - lo)))
        L = float(np.exp(lo + row[7] * (hi - lo)))
        A = 0.5 + 2.0 * row[0] * row[1]
        out.append((Parameters(A, sigma, delta, p, q), InputPoint(K, L)))
    return out
