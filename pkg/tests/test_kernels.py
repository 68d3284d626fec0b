"""The numba kernels and their numpy twins must agree exactly."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from exzeros import _kernels as K

pytestmark = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")

primes = st.sampled_from([2, 3, 5, 7])


def arr(p, lo=1, hi=40):
    return st.lists(st.integers(0, p - 1), min_size=lo, max_size=hi).map(lambda v: np.array(v, dtype=np.int64))


@given(primes.flatmap(lambda p: st.tuples(st.just(p), arr(p), arr(p))))
def test_conv(args):
    p, a, b = args
    assert np.array_equal(K.conv_mod_np(a, b, p), K.conv_mod_nb(a, b, p))
    assert np.array_equal(K.conv_mod_np(a, b, p), np.convolve(a, b) % p)


@given(primes.flatmap(lambda p: st.tuples(st.just(p), arr(p, 1, 30), arr(p, 1, 10))))
def test_divmod(args):
    p, a, b = args
    b = b.copy()
    b[-1] = max(b[-1], 1)
    inv = pow(int(b[-1]), p - 2, p)
    qn, rn = K.divmod_mod_np(a, b, p, inv)
    qb, rb = K.divmod_mod_nb(a, b, p, inv)
    assert np.array_equal(qn, qb) and np.array_equal(rn, rb)


@given(st.data())
def test_conv2d_trunc(data):
    p = data.draw(primes)
    shape = lambda: (data.draw(st.integers(1, 6)), data.draw(st.integers(1, 6)))
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    a = rng.integers(0, p, shape())
    b = rng.integers(0, p, shape())
    rows = data.draw(st.integers(1, 12))
    assert np.array_equal(K.conv2d_trunc_mod_np(a, b, p, rows), K.conv2d_trunc_mod_nb(a, b, p, rows))


@given(st.data())
def test_batch_kernels(data):
    p = data.draw(primes)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    n, m = data.draw(st.integers(1, 5)), data.draw(st.integers(1, 12))
    x = rng.integers(0, p, (n, m))
    y = rng.integers(0, p, (n, m))
    length = data.draw(st.integers(1, 2 * m))
    assert np.array_equal(K.batch_conv_sum_mod_np(x, y, p, length), K.batch_conv_sum_mod_nb(x, y, p, length))
    assert np.array_equal(K.batch_series_mul_mod_np(x, y, p, length), K.batch_series_mul_mod_nb(x, y, p, length))
    # the sum kernel is the row sum of the per-row products
    assert np.array_equal(K.batch_conv_sum_mod_np(x, y, p, length), K.batch_series_mul_mod_np(x, y, p, length).sum(axis=0) % p)


@given(st.data())
def test_scatter_add(data):
    p = data.draw(primes)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    size = data.draw(st.integers(1, 20))
    idx = rng.integers(0, size, 50)
    vals = rng.integers(0, p, 50)
    expect = np.bincount(idx, weights=vals, minlength=size).astype(np.int64) % p
    assert np.array_equal(K.scatter_add_mod_np(idx, vals, p, size), expect)
    assert np.array_equal(K.scatter_add_mod_nb(idx, vals, p, size), expect)


def test_env_switch_selects_numpy(tmp_path):
    import subprocess, sys, os

    env = dict(os.environ, EXZEROS_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", "from exzeros import _kernels; print(_kernels.backend())"], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "numpy"
