"""Random jets for property tests, sweeps and the self-test."""

import numpy as np

from .germs import DiffeoJet
from .jetcalc import Jet2, monomials
from .moduli import GaugeTuple, GluingTuple


def _rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def random_complex(rng, size=None, scale=1.0):
    rng = _rng(rng)
    return scale * (rng.normal(size=size) + 1j * rng.normal(size=size)) / np.sqrt(2)


def random_jet(k, rng=None, scale=1.0, min_degree=0):
    rng = _rng(rng)
    terms = {pq: random_complex(rng, scale=scale) for pq in monomials(k, min_degree=min_degree)}
    return Jet2.from_dict(terms, k)


def random_higher(k, rng=None, scale=0.3):
    """Random terms of degree 2..k."""
    if k < 2:
        return Jet2.zero(k)
    return random_jet(k, rng, scale, min_degree=2)


def random_linear(k, rng=None, mu=None, orientation=1):
    """a z + b zbar with |b/a| = mu (uniform in [0.05, 0.95] if not given)."""
    rng = _rng(rng)
    if mu is None:
        mu = rng.uniform(0.05, 0.95)
    a = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    b = mu * abs(a) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    if orientation < 0:
        a, b = b, a
    return Jet2.from_dict({(1, 0): a, (0, 1): b}, k)


def random_diffeo(k, rng=None, mu=None, higher_scale=0.3, orientation=1):
    rng = _rng(rng)
    return DiffeoJet(random_linear(k, rng, mu, orientation) + random_higher(k, rng, higher_scale))


def random_liftable(k, rng=None, kind="z", scale=0.3):
    """z h or zbar h with h(0) well away from 0."""
    rng = _rng(rng)
    h = random_jet(k - 1, rng, scale)
    h0 = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    arr = np.array(h.coeffs)
    arr[0, 0] = h0
    full = np.zeros((k + 1, k + 1), dtype=np.complex128)
    if kind == "z":
        full[1:, :k] = arr
    else:
        full[:k, 1:] = arr
    return DiffeoJet(Jet2(full))


def random_not_liftable(k, rng=None, scale=0.3):
    """Invertible jet with both a pure z^p and a pure zbar^q monomial."""
    rng = _rng(rng)
    arr = np.array(random_diffeo(k, rng, higher_scale=scale).coeffs)
    # the 1-jet a z + b zbar already carries both patterns; add more above it
    if k >= 2:
        arr[rng.integers(2, k + 1), 0] += random_complex(rng, scale=scale)
        arr[0, rng.integers(2, k + 1)] += random_complex(rng, scale=scale)
    return DiffeoJet(Jet2(arr))


def random_tuple(n, k, rng=None, higher_scale=0.3):
    rng = _rng(rng)
    return GluingTuple(tuple(random_diffeo(k, rng, higher_scale=higher_scale) for _ in range(n - 1)))


def random_gauge(n, k, rng=None, scale=0.3, kind=None):
    rng = _rng(rng)
    kind = kind or ("z" if rng.random() < 0.5 else "zbar")
    return GaugeTuple(tuple(random_liftable(k, rng, kind, scale) for _ in range(n)))
