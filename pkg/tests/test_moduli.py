import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from focusjet import moduli, sampling
from focusjet.errors import ContractError, MuZeroError, OrientationError
from focusjet.jetcalc import Jet2, compose, imag_part, invert
from focusjet.moduli import EquivStatus, GaugeTuple, GluingTuple

seeds = st.integers(0, 2**32 - 1)


def canon(phi):
    return np.array(moduli.canonicalize_invariant(moduli.first_order_invariants(phi)).mus)


def test_spec_tuple_invariant():
    phi = GluingTuple((Jet2.z(1) * 2 + Jet2.zbar(1) * 1j,))
    raw = moduli.first_order_invariants(phi).mus[0]
    assert raw == pytest.approx(0.5j)
    assert canon(phi)[0] == pytest.approx(0.5)


@given(seeds, st.integers(2, 4), st.integers(1, 5))
def test_gauge_action_is_an_action(seed, n, k):
    rng = np.random.default_rng(seed)
    phi = sampling.random_tuple(n, k, rng)
    e1, e2 = sampling.random_gauge(n, k, rng), sampling.random_gauge(n, k, rng)
    lhs = moduli.gauge_act(e1, moduli.gauge_act(e2, phi))
    rhs = moduli.gauge_act(e1 @ e2, phi)
    for a, b in zip(lhs.maps, rhs.maps):
        assert (a - b).max_abs() < 1e-8 * max(1.0, a.max_abs())


@given(seeds, st.integers(2, 4), st.integers(1, 5))
def test_invariants_constant_on_orbits(seed, n, k):
    rng = np.random.default_rng(seed)
    phi = sampling.random_tuple(n, k, rng)
    eta = sampling.random_gauge(n, k, rng)
    assert np.max(np.abs(canon(moduli.gauge_act(eta, phi)) - canon(phi))) < 1e-9


def test_canonical_form_handles_rotation_and_conjugation():
    mus = np.array([0.3 - 0.1j, 0.2 + 0.4j])
    base = moduli.canonicalize_invariant(moduli.FirstOrderInvariant(tuple(mus))).mus
    for u in (np.exp(0.7j), np.exp(-2.1j)):
        for m in (mus * u, np.conj(mus * u)):
            got = moduli.canonicalize_invariant(moduli.FirstOrderInvariant(tuple(m))).mus
            assert np.allclose(got, base, atol=1e-14)
    assert base[0].imag == 0 and base[0].real > 0


@given(seeds, st.integers(1, 6))
def test_normalize_double_pinched(seed, k):
    rng = np.random.default_rng(seed)
    mu = rng.uniform(0.05, 0.9)
    phi = sampling.random_diffeo(k, rng, mu)
    res = moduli.normalize_double_pinched(phi)
    assert res.mu == pytest.approx(mu, abs=1e-12)
    target = Jet2.z(k) + Jet2.zbar(k) * mu
    assert (compose(res.psi1, compose(phi, invert(res.psi2))) - target).max_abs() < 1e-8
    for psi in res:
        assert np.all(psi.coeffs[0, 1:] == 0)  # divisible by z


def test_normalize_rejects_mu_zero_and_reversal():
    with pytest.raises(MuZeroError):
        moduli.normalize_double_pinched(Jet2.z(3) + Jet2.z(3) ** 2)
    with pytest.raises(OrientationError):
        moduli.normalize_double_pinched(Jet2.zbar(3) + Jet2.z(3) * 0.5)


def test_equivalence_examples():
    z, zb = Jet2.z(4), Jet2.zbar(4)
    res = moduli.equivalent_double_pinched(z + zb * 0.5 + zb**3, z + zb * 0.5)
    assert res.status is EquivStatus.EQUIVALENT and res.residual < 1e-12
    res = moduli.equivalent_double_pinched(z + zb * 0.5, z + zb * 0.3)
    assert res.status is EquivStatus.NOT_EQUIVALENT and res.witness is None
    res = moduli.equivalent_double_pinched(z + z**2, z + zb**2)
    assert res.status is EquivStatus.UNDECIDED_MU_ZERO


@given(seeds, st.integers(1, 6))
def test_equivalence_witness_is_liftable(seed, k):
    rng = np.random.default_rng(seed)
    mu = rng.uniform(0.05, 0.9)
    phi, other = sampling.random_diffeo(k, rng, mu), sampling.random_diffeo(k, rng, mu)
    res = moduli.equivalent_double_pinched(phi, other)
    assert res.status is EquivStatus.EQUIVALENT
    chi1, chi2 = res.witness.psis
    for chi in (chi1, chi2):
        assert np.all(chi.coeffs[0, 1:] == 0)  # divisible by z
    assert res.residual < 1e-8


@given(seeds, st.integers(2, 4), st.integers(1, 6))
def test_symplectize(seed, n, k):
    rng = np.random.default_rng(seed)
    phi = sampling.random_tuple(n, k, rng)
    out, eta = moduli.symplectize_gluing(phi)
    zi = imag_part(Jet2.z(k))
    for m in out.maps:
        assert (imag_part(m) - zi).max_abs() < 1e-9
    assert np.allclose(canon(out), canon(phi), atol=1e-12)
    recomputed = moduli.gauge_act(eta, phi)
    for a, b in zip(out.maps, recomputed.maps):
        assert (a - b).max_abs() < 1e-6 * max(1.0, b.max_abs())


def test_liftable_with_imag_part():
    z = Jet2.z(3)
    f = imag_part(z * 2 + z.conj() * 0.5 + z * z.conj() * z)
    psi = moduli.liftable_with_imag_part(f)
    assert (imag_part(psi) - f).max_abs() < 1e-15
    assert np.all(psi.coeffs[0, 1:] == 0)
    with pytest.raises(ContractError):
        moduli.liftable_with_imag_part(z)  # not real valued


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("k", range(1, 9))
def test_orbit_rank_matches_formulas(n, k):
    r = moduli.orbit_tangent_rank(moduli.generic_linear_tuple(n, k, 3))
    assert r.stab_dim == moduli.stabilizer_formula(n, k)
    assert r.codim == moduli.codim_formula(n, k)
    assert r.orbit_dim + r.stab_dim == r.group_dim
    assert r.orbit_dim + r.codim == r.space_dim


def test_formulas_closed_form():
    # n = 2 stabilizes at codim 1 from k = 3 on
    assert [moduli.codim_formula(2, k) for k in range(1, 6)] == [1, 1, 1, 1, 1]
    assert moduli.stabilizer_formula(3, 2) == 3
    assert moduli.stabilizer_formula(3, 5) == 25 - 15 + 6


@given(seeds, st.integers(3, 6), st.sampled_from([2.0, 10.0, 100.0]))
def test_conj_by_scaling_law(seed, k, c):
    rng = np.random.default_rng(seed)
    phi = Jet2.z(k) + sampling.random_higher(k, rng)
    out = moduli.conj_by_scaling(phi, c)
    for (p, q), v in phi.terms().items():
        assert out[p, q] == pytest.approx(v * c ** (1 - p - q), rel=1e-13)


def test_gauge_size_mismatch():
    with pytest.raises(ContractError):
        moduli.gauge_act(GaugeTuple((Jet2.z(2),) * 3), GluingTuple((Jet2.z(2),)))
