"""Compiled inner loop for repeated passes on a padded density matrix."""

import numpy as np
from numba import njit

PAD = 2


def flat_offsets(dm, dn, dim):
    """Offsets of the stencil sources in the raveled padded array."""
    return (np.asarray(dm) * (dim + 2 * PAD) + np.asarray(dn)).astype(np.int64)


@njit(cache=True, fastmath=True)
def advance(coef, off, y, n_passes, step, tol):
    """Apply the stencil map up to ``n_passes`` times.

    ``y`` is the density matrix embedded with ``PAD`` zero rows/columns on
    each side, so shifted reads never leave the array.  Only entries with
    ``n - m`` a nonnegative multiple of ``step`` are computed; the lower
    triangle is filled by Hermiticity.  Stops early, before a pass, as soon as
    an entry in the top two rows exceeds ``tol`` in modulus.  Returns the
    array and the number of passes done.
    """
    d = coef.shape[0]
    nk = coef.shape[2]
    w = d + 2 * PAD
    yf = y.copy().ravel()
    buf = np.zeros_like(yf)
    tol2 = tol * tol
    done = 0
    while done < n_passes:
        for m in range(max(d - 2, 0), d):
            for n in range(d):
                v = yf[(m + PAD) * w + n + PAD]
                if v.real * v.real + v.imag * v.imag > tol2:
                    return yf.reshape(y.shape), done
        for m in range(d):
            base = (m + PAD) * w + PAD
            for n in range(m, d, step):
                i = base + n
                sr = 0.0
                si = 0.0
                for k in range(nk):
                    c = coef[m, n, k]
                    v = yf[i + off[k]]
                    sr += c.real * v.real - c.imag * v.imag
                    si += c.real * v.imag + c.imag * v.real
                buf[i] = complex(sr, si)
                if n != m:
                    buf[(n + PAD) * w + m + PAD] = complex(sr, -si)
        yf, buf = buf, yf
        done += 1
    return yf.reshape(y.shape), done
