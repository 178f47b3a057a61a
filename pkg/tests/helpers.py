"""Shared helpers for the test suite: seeded random matrices and Gaussians."""

import numpy as np

from w2assim import Gaussian
from w2assim.rng import stream


def rng(seed, stream_id=0):
    return stream(seed, stream_id)


def random_spd(r, n, jitter=0.1):
    b = r.standard_normal((n, n))
    return b.T @ b + jitter * np.eye(n)


def random_orthogonal(r, n):
    q, rmat = np.linalg.qr(r.standard_normal((n, n)))
    return q * np.sign(np.diag(rmat))


def random_gaussian(r, n, mean_spread=2.0, jitter=0.1):
    return Gaussian(r.normal(0.0, mean_spread, n), random_spd(r, n, jitter))
