import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from focusjet import sampling
from focusjet.errors import DegenerateJetError, OrderMismatchError
from focusjet.jetcalc import (
    Jet2,
    Jet4,
    compose,
    d_dz,
    d_dzbar,
    ext_compose,
    ext_invert,
    ideal_divide,
    imag_part,
    invert,
    monomials,
    n_monomials,
    real_part,
    substitute_uv,
)

# naive reference: polynomials in (z, w = zbar) as {(p, q): coeff} dicts


def ref_mul(f, g, k):
    out = {}
    for (p1, q1), c1 in f.items():
        for (p2, q2), c2 in g.items():
            if p1 + p2 + q1 + q2 <= k:
                key = (p1 + p2, q1 + q2)
                out[key] = out.get(key, 0) + c1 * c2
    return out


def ref_pow(f, n, k):
    out = {(0, 0): 1.0}
    for _ in range(n):
        out = ref_mul(out, f, k)
    return out


def ref_compose(f, g, k):
    gbar = {(q, p): complex(c).conjugate() for (p, q), c in g.items()}
    out = {}
    for (p, q), c in f.items():
        for key, v in ref_mul(ref_pow(g, p, k), ref_pow(gbar, q, k), k).items():
            out[key] = out.get(key, 0) + c * v
    return out


def as_jet(d, k):
    return Jet2.from_dict(d, k)


def seeds():
    return st.integers(0, 2**32 - 1)


def test_monomial_count_and_order():
    for k in range(7):
        m = monomials(k)
        assert len(m) == n_monomials(k) == (k + 1) * (k + 2) // 2
        degs = [p + q for p, q in m]
        assert degs == sorted(degs)


@given(seeds(), st.integers(1, 5))
def test_compose_matches_reference(seed, k):
    rng = np.random.default_rng(seed)
    f = sampling.random_jet(k, rng)
    g = sampling.random_jet(k, rng, min_degree=1)
    want = as_jet(ref_compose(f.terms(), g.terms(), k), k)
    assert (compose(f, g) - want).max_abs() < 1e-10


@given(seeds(), st.integers(0, 6))
def test_product_matches_reference(seed, k):
    rng = np.random.default_rng(seed)
    f, g = sampling.random_jet(k, rng), sampling.random_jet(k, rng)
    assert (f * g - as_jet(ref_mul(f.terms(), g.terms(), k), k)).max_abs() < 1e-12


@given(seeds(), st.integers(1, 6))
def test_invert_is_two_sided(seed, k):
    rng = np.random.default_rng(seed)
    f = sampling.random_diffeo(k, rng)
    g = invert(f)
    tol = 1e-11 * max(1.0, g.max_abs())  # inverse coefficients grow as mu -> 1
    assert (compose(f, g) - Jet2.z(k)).max_abs() < tol
    assert (compose(g, f) - Jet2.z(k)).max_abs() < tol


@given(seeds(), st.integers(1, 5))
def test_compose_associative(seed, k):
    rng = np.random.default_rng(seed)
    f, g, h = (sampling.random_diffeo(k, rng) for _ in range(3))
    lhs = compose(f, compose(g, h))
    rhs = compose(compose(f, g), h)
    assert (lhs - rhs).max_abs() < 1e-10


@given(seeds(), st.integers(0, 5))
def test_conj_and_parts(seed, k):
    rng = np.random.default_rng(seed)
    f = sampling.random_jet(k, rng)
    assert f.conj().conj() == f
    assert (real_part(f) + imag_part(f) * 1j - f).max_abs() < 1e-14
    x = 0.3 - 0.2j
    assert abs(f.conj()(x) - np.conj(f(x))) < 1e-12
    assert abs(imag_part(f)(x) - f(x).imag) < 1e-12


def test_wirtinger_derivatives():
    k = 4
    z, zb = Jet2.z(k), Jet2.zbar(k)
    f = z**2 * zb + zb**3 * 2j
    dz, dzb = d_dz(f), d_dzbar(f)
    assert dz[1, 1] == 2 and dz.max_abs() == 2
    assert dzb[2, 0] == 1 and dzb[0, 2] == 6j


@given(seeds(), st.integers(2, 5))
def test_ideal_divide_recomposes(seed, k):
    rng = np.random.default_rng(seed)
    phi = sampling.random_diffeo(k, rng)
    w = sampling.random_jet(k, rng, min_degree=1)
    u1, u2 = ideal_divide(w, phi)
    assert (phi * u1 + phi.conj() * u2 - w).max_abs() < 1e-9


def test_ideal_divide_rejects_constant_term():
    phi = Jet2.z(3) + Jet2.zbar(3) * 0.5
    with pytest.raises(DegenerateJetError):
        ideal_divide(Jet2.constant(1.0, 3), phi)


def test_invert_rejects_degenerate_linear_part():
    with pytest.raises(DegenerateJetError):
        invert(Jet2.z(3) + Jet2.zbar(3))
    with pytest.raises(DegenerateJetError):
        invert(Jet2.z(3) + 1.0)


def test_order_mismatch():
    with pytest.raises(OrderMismatchError):
        Jet2.z(2) + Jet2.z(3)


def test_vector_round_trip(rng):
    f = sampling.random_jet(5, rng)
    assert Jet2.from_vector(f.to_vector(), 5) == f
    g = sampling.random_jet(5, rng, min_degree=1)
    assert Jet2.from_vector(g.to_vector(min_degree=1), 5, min_degree=1) == g


def test_truncate_and_degree_part(rng):
    f = sampling.random_jet(5, rng)
    assert (f.degree_part(0, 2) + f.degree_part(3) - f).max_abs() == 0
    assert f.truncate(2) == Jet2(f.degree_part(0, 2).coeffs[:3, :3])


def test_real_matrix_of_linear_part():
    f = Jet2.from_dict({(1, 0): 2 + 1j, (0, 1): 0.5j}, 1)
    M = f.real_matrix()
    x = np.array([0.3, -0.7])
    w = f(x[0] + 1j * x[1])
    assert np.allclose(M @ x, [w.real, w.imag])


def test_substitute_uv_and_jet4_product():
    k = 2
    f = Jet2.from_dict({(1, 0): 1.0, (1, 1): 2.0}, k)
    F = substitute_uv(f)
    assert F.order == 4
    assert F.coeffs == {(1, 0, 1, 0): 1.0, (1, 1, 1, 1): 2.0}
    u, v = Jet4.variable("u", 4), Jet4.variable("v", 4)
    assert (u * v - Jet4({(1, 0, 1, 0): 1.0}, 4)).max_abs() == 0


@given(seeds(), st.integers(1, 6))
def test_extended_precision_agrees(seed, k):
    rng = np.random.default_rng(seed)
    f = sampling.random_diffeo(k, rng)
    g = sampling.random_diffeo(k, rng)
    assert np.max(np.abs(ext_compose(f, g) - compose(f, g).coeffs)) < 1e-12
    assert np.max(np.abs(ext_invert(f) - invert(f).coeffs)) < 1e-9 * max(1, invert(f).max_abs())
