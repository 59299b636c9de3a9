"""Hot kernels for truncated series in (z, zbar).

A jet of order k is stored as a (k+1, k+1) complex array ``c`` where
``c[p, q]`` is the coefficient of z**p * zbar**q; entries with p + q > k are
always zero.

Each kernel exists twice: a numba ``@njit`` version and a pure-numpy version.
Set ``FOCUSJET_NO_NUMBA=1`` (or run without numba installed) to select the
numpy path.  Both are importable by name so they can be benchmarked and
cross-checked.
"""

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

DISABLE_ENV = "FOCUSJET_NO_NUMBA"

USE_NUMBA = HAVE_NUMBA and os.environ.get(DISABLE_ENV, "").lower() not in (
    "1",
    "true",
    "yes",
)

_MASKS = {}


def triangle_mask(k):
    """Boolean (k+1, k+1) mask of the admissible indices p + q <= k."""
    mask = _MASKS.get(k)
    if mask is None:
        idx = np.arange(k + 1)
        mask = (idx[:, None] + idx[None, :]) <= k
        mask.flags.writeable = False
        _MASKS[k] = mask
    return mask


# -- numpy path ---------------------------------------------------------------


def mul_trunc_numpy(a, b, k):
    # dtype follows the inputs, so clongdouble arrays stay in extended precision
    out = np.zeros((k + 1, k + 1), dtype=np.result_type(a, b, np.complex128))
    nz_i, nz_j = np.nonzero(a)
    for i, j in zip(nz_i, nz_j):
        out[i:, j:] += a[i, j] * b[: k + 1 - i, : k + 1 - j]
    out[~triangle_mask(k)] = 0.0
    return out


def compose_numpy(f, g, gbar, k):
    # Horner in g over partial sums S_p = sum_q f[p, q] gbar**q
    dt = np.result_type(f, g, gbar, np.complex128)
    powers = [np.zeros((k + 1, k + 1), dtype=dt)]
    powers[0][0, 0] = 1.0
    for _ in range(k):
        powers.append(mul_trunc_numpy(powers[-1], gbar, k))
    stacked = np.stack(powers)
    acc = np.zeros((k + 1, k + 1), dtype=dt)
    for p in range(k, -1, -1):
        if p < k:
            acc = mul_trunc_numpy(acc, g, k)
        acc = acc + np.tensordot(f[p, : k + 1 - p], stacked[: k + 1 - p], axes=1)
    return acc


# -- numba path ---------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def mul_trunc_numba(a, b, k):
        out = np.zeros((k + 1, k + 1), dtype=np.complex128)
        for i in range(k + 1):
            for j in range(k + 1 - i):
                c = a[i, j]
                if c == 0:
                    continue
                for p in range(k + 1 - i - j):
                    for q in range(k + 1 - i - j - p):
                        out[i + p, j + q] += c * b[p, q]
        return out

    @numba.njit(cache=True)
    def compose_numba(f, g, gbar, k):
        n = k + 1
        powers = np.zeros((n, n, n), dtype=np.complex128)
        powers[0, 0, 0] = 1.0
        for q in range(1, n):
            powers[q] = mul_trunc_numba(powers[q - 1], gbar, k)
        acc = np.zeros((n, n), dtype=np.complex128)
        for p in range(k, -1, -1):
            if p < k:
                acc = mul_trunc_numba(acc, g, k)
            for q in range(k + 1 - p):
                c = f[p, q]
                if c != 0:
                    acc += c * powers[q]
        return acc

else:  # pragma: no cover
    mul_trunc_numba = None
    compose_numba = None


if USE_NUMBA:
    mul_trunc = mul_trunc_numba
    compose_kernel = compose_numba
    BACKEND = "numba"
else:
    mul_trunc = mul_trunc_numpy
    compose_kernel = compose_numpy
    BACKEND = "numpy"
