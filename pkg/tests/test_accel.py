import os
import subprocess
import sys

import numpy as np
import pytest

from focusjet import _accel, sampling

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


@needs_numba
@pytest.mark.parametrize("k", [0, 1, 3, 6, 10])
def test_kernels_agree(k, rng):
    a = sampling.random_jet(k, rng).coeffs
    b = sampling.random_jet(k, rng, min_degree=1).coeffs
    bbar = np.conj(b.T).copy()
    assert np.allclose(_accel.mul_trunc_numba(a, b, k), _accel.mul_trunc_numpy(a, b, k),
                       atol=1e-13, rtol=0)
    assert np.allclose(_accel.compose_numba(a, b, bbar, k), _accel.compose_numpy(a, b, bbar, k),
                       atol=1e-12, rtol=0)


def test_truncation_respected(rng):
    k = 4
    a = sampling.random_jet(k, rng).coeffs
    out = _accel.mul_trunc(a, a, k)
    assert np.all(out[~_accel.triangle_mask(k)] == 0)


def test_env_flag_selects_numpy():
    env = dict(os.environ, **{_accel.DISABLE_ENV: "1"})
    res = subprocess.run([sys.executable, "-c", "from focusjet import _accel; print(_accel.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert res.stdout.strip() == "numpy"
