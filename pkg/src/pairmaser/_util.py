import numpy as np


def shannon_bits(p, floor=1e-12):
    """Shannon entropy in bits with 0 log 0 = 0.

    Entries with ``|p| < floor`` are treated as exact zeros so that rounding
    noise at the edge of the simplex never reaches the logarithm.
    """
    p = np.asarray(p, dtype=float).ravel()
    p = p[np.abs(p) >= floor]
    if p.size and p.min() < 0:
        raise ValueError(f"negative probability {p.min():.3e}")
    return float(-np.sum(p * np.log2(p)))


def binary_entropy(x):
    return shannon_bits([x, 1.0 - x])
