"""Hot integer kernels, compiled with numba when available.

Every kernel has a pure-numpy twin. The numba versions are used unless the
environment variable ``EXZEROS_NUMBA`` is set to ``0`` (or numba is missing).
Both paths return identical int64 arrays; ``tests/test_kernels.py`` checks
that they agree.

All arrays hold residues modulo a small prime ``p`` as int64.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("EXZEROS_NUMBA", "1") != "0"


# ---------------------------------------------------------------------------
# pure numpy implementations
# ---------------------------------------------------------------------------


def conv_mod_np(a, b, p):
    if a.size == 0 or b.size == 0:
        return np.zeros(0, dtype=np.int64)
    return np.convolve(a, b) % p


def conv2d_trunc_mod_np(a, b, p, rows):
    """C[i+k, j+l] += A[i, j] * B[k, l] for i + k < rows."""
    ncols = a.shape[1] + b.shape[1] - 1
    out = np.zeros((rows, ncols), dtype=np.int64)
    nz_a = [i for i in range(min(a.shape[0], rows)) if a[i].any()]
    nz_b = [k for k in range(min(b.shape[0], rows)) if b[k].any()]
    for i in nz_a:
        for k in nz_b:
            if i + k >= rows:
                break
            out[i + k] += np.convolve(a[i], b[k])
    return out % p


def divmod_mod_np(a, b, p, inv_lead):
    """Long division of a by b over F_p; b[-1] != 0, inv_lead = b[-1]^-1."""
    r = a.copy()
    db = b.size - 1
    dq = r.size - 1 - db
    if dq < 0:
        return np.zeros(0, dtype=np.int64), r
    quot = np.zeros(dq + 1, dtype=np.int64)
    for k in range(dq, -1, -1):
        c = (r[k + db] * inv_lead) % p
        if c:
            quot[k] = c
            r[k : k + db + 1] = (r[k : k + db + 1] - c * b) % p
    return quot, r[:db]


def batch_conv_sum_mod_np(x, y, p, length):
    """sum_a conv(x[a], y[a]) truncated to ``length`` terms."""
    m = (x.T @ y) % p
    i = np.arange(m.shape[0])[:, None] + np.arange(m.shape[1])[None, :]
    keep = i < length
    out = np.bincount(i[keep], weights=m[keep], minlength=length)
    return np.rint(out).astype(np.int64)[:length] % p


def batch_series_mul_mod_np(x, y, p, length):
    """Row-wise product of truncated series: out[a] = conv(x[a], y[a])[:length]."""
    out = np.zeros((x.shape[0], length), dtype=np.int64)
    for i in range(min(x.shape[1], length)):
        col = x[:, i : i + 1]
        if not col.any():
            continue
        w = min(y.shape[1], length - i)
        out[:, i : i + w] = (out[:, i : i + w] + col * y[:, :w]) % p
    return out


def scatter_add_mod_np(idx, vals, p, size):
    out = np.bincount(idx, weights=vals, minlength=size)
    return np.rint(out).astype(np.int64) % p


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def conv_mod_nb(a, b, p):
        na = a.size
        nb = b.size
        if na == 0 or nb == 0:
            return np.zeros(0, dtype=np.int64)
        out = np.zeros(na + nb - 1, dtype=np.int64)
        for i in range(na):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(nb):
                out[i + j] += ai * b[j]
            if (i & 1023) == 1023:
                for j in range(out.size):
                    out[j] %= p
        for j in range(out.size):
            out[j] %= p
        return out

    @njit(cache=True)
    def conv2d_trunc_mod_nb(a, b, p, rows):
        ncols = a.shape[1] + b.shape[1] - 1
        out = np.zeros((rows, ncols), dtype=np.int64)
        for i in range(min(a.shape[0], rows)):
            for j in range(a.shape[1]):
                aij = a[i, j]
                if aij == 0:
                    continue
                for k in range(min(b.shape[0], rows - i)):
                    for l in range(b.shape[1]):
                        out[i + k, j + l] += aij * b[k, l]
            for r in range(rows):
                for c in range(ncols):
                    out[r, c] %= p
        return out

    @njit(cache=True)
    def divmod_mod_nb(a, b, p, inv_lead):
        r = a.copy()
        db = b.size - 1
        dq = r.size - 1 - db
        if dq < 0:
            return np.zeros(0, dtype=np.int64), r
        quot = np.zeros(dq + 1, dtype=np.int64)
        for k in range(dq, -1, -1):
            c = (r[k + db] * inv_lead) % p
            if c != 0:
                quot[k] = c
                for j in range(db + 1):
                    r[k + j] = (r[k + j] - c * b[j]) % p
        return quot, r[:db].copy()

    @njit(cache=True)
    def batch_conv_sum_mod_nb(x, y, p, length):
        out = np.zeros(length, dtype=np.int64)
        for a in range(x.shape[0]):
            for i in range(min(x.shape[1], length)):
                xi = x[a, i]
                if xi == 0:
                    continue
                for j in range(min(y.shape[1], length - i)):
                    out[i + j] += xi * y[a, j]
            if (a & 255) == 255:
                for j in range(length):
                    out[j] %= p
        for j in range(length):
            out[j] %= p
        return out

    @njit(cache=True)
    def batch_series_mul_mod_nb(x, y, p, length):
        rows = x.shape[0]
        out = np.zeros((rows, length), dtype=np.int64)
        for a in range(rows):
            for i in range(min(x.shape[1], length)):
                xi = x[a, i]
                if xi == 0:
                    continue
                for j in range(min(y.shape[1], length - i)):
                    out[a, i + j] = (out[a, i + j] + xi * y[a, j]) % p
        return out

    @njit(cache=True)
    def scatter_add_mod_nb(idx, vals, p, size):
        out = np.zeros(size, dtype=np.int64)
        for i in range(idx.size):
            out[idx[i]] = (out[idx[i]] + vals[i]) % p
        return out


def _pick(name):
    if USE_NUMBA:
        return globals()[name + "_nb"]
    return globals()[name + "_np"]


conv_mod = _pick("conv_mod")
conv2d_trunc_mod = _pick("conv2d_trunc_mod")
divmod_mod = _pick("divmod_mod")
batch_conv_sum_mod = _pick("batch_conv_sum_mod")
batch_series_mul_mod = _pick("batch_series_mul_mod")
scatter_add_mod = _pick("scatter_add_mod")


def backend():
    return "numba" if USE_NUMBA else "numpy"
