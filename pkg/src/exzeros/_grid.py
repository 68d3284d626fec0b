"""Row recurrences on truncated series stored as arrays.

Axis 0 is the expansion variable x (row i holds the coefficient of x^i);
the remaining axes hold polynomial coefficients mod p.  Factors of the form
(1 - m x^b) with m a monomial act as "shift along one axis" on the rows.
"""

import numpy as np


def _shift(row, a, axis):
    """Multiply a coefficient row by the monomial of degree ``a`` in ``axis`` (0-based in row)."""
    if a == 0:
        return row
    out = np.zeros_like(row)
    n = row.shape[axis]
    if a >= n:
        if row.any():
            raise OverflowError("shift leaves the allocated grid")
        return out
    src = [slice(None)] * row.ndim
    dst = [slice(None)] * row.ndim
    src[axis] = slice(0, n - a)
    dst[axis] = slice(a, n)
    lost = [slice(None)] * row.ndim
    lost[axis] = slice(n - a, n)
    if row[tuple(lost)].any():
        raise OverflowError("shift leaves the allocated grid")
    out[tuple(dst)] = row[tuple(src)]
    return out


def mul_one_minus(F, b, p, a=0, axis=0):
    """F * (1 - y^a x^b), y the variable along ``axis`` of each row."""
    G = F.copy()
    for i in range(F.shape[0] - 1, b - 1, -1):
        G[i] = (G[i] - _shift(F[i - b], a, axis)) % p
    return G


def div_one_minus(F, b, p, a=0, axis=0, times=1):
    """F / (1 - y^a x^b)^times."""
    if b <= 0:
        raise ValueError("b must be positive")
    G = F.copy()
    for _ in range(times):
        for i in range(b, G.shape[0]):
            G[i] = (G[i] + _shift(G[i - b], a, axis)) % p
    return G
