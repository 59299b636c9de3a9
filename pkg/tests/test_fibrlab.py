import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from focusjet import fibrlab, geomlin, moduli, sampling
from focusjet.errors import ContractError, NotCriticalError, RankError
from focusjet.fibrlab import FamilyPoint, LocalModelChart, ProfileRow, Rank1Family
from focusjet.jetcalc import Jet2, compose, invert

seeds = st.integers(0, 2**32 - 1)


# model charts g_i give F = g_i(uv); the normal chart is g_i^{-1}, so the
# gluing map between the two points is g_1^{-1} o g_2


def random_chart(rng, k=3, center=(0, 0, 0, 0)):
    A = rng.normal(size=(2, 2)) + 2 * np.eye(2)
    return LocalModelChart(np.array(center, float), sampling.random_diffeo(k, rng, higher_scale=0.2),
                           fibrlab.symplectic_frame(A))


@settings(max_examples=20)
@given(seeds)
def test_fd_hessian_matches_closed_form(seed):
    rng = np.random.default_rng(seed)
    chart = random_chart(rng)
    fmap = fibrlab.NumericMomentMap.from_charts([chart])
    H = fibrlab.fd_hessian(fmap, chart.center)
    ref = chart.hessian()
    scale = max(1.0, np.max(np.abs(ref.stack)))
    assert np.max(np.abs(H.stack - ref.stack)) < 1e-6 * scale


def test_not_critical():
    fmap = fibrlab.NumericMomentMap.from_charts([random_chart(np.random.default_rng(1))])
    with pytest.raises(NotCriticalError):
        fibrlab.fd_hessian(fmap, np.array([0.5, 0.2, -0.1, 0.3]))


def test_outside_chart_radius():
    chart = random_chart(np.random.default_rng(2))
    with pytest.raises(ContractError):
        fibrlab.eval_model(chart, np.array([9.0, 0, 0, 0]))


@settings(max_examples=20)
@given(seeds)
def test_detect_focus_recovers_chart_structure(seed):
    rng = np.random.default_rng(seed)
    chart = random_chart(rng)
    res = fibrlab.detect_focus(fibrlab.NumericMomentMap.from_charts([chart]), chart.center, seed=3)
    assert res.focus and res.kind == "FocusFocus"
    want = geomlin.STANDARD.conjugated(chart.chart.real_matrix())
    assert res.J[0].close_to(want, tol=1e-6)


def test_hyperbolic_point_is_not_focus():
    res = fibrlab.detect_focus(fibrlab.hyperbolic_model(), np.zeros(4))
    assert not res.focus and res.kind == "NotFocus" and res.reason


@pytest.mark.parametrize("route", ["slice", "suspended"])
def test_varying_family_profile(route):
    prof = fibrlab.mu_profile(fibrlab.linear_gluing_family(0.2, 0.5), 11, route=route)
    assert len(prof) == 11
    for row in prof:
        oracle = moduli.mu_double(Jet2.z(1) + Jet2.zbar(1) * (0.2 + 0.5 * row.t))
        assert row.ok
        assert row.mu == pytest.approx(oracle, abs=1e-6)
        assert row.trace == pytest.approx(geomlin.trace_from_mu(oracle), rel=1e-6)


@pytest.mark.parametrize("route", ["slice", "suspended"])
def test_nonlinear_family_matches_gluing_oracle(route):
    rng = np.random.default_rng(11)
    g1 = sampling.random_diffeo(3, rng, mu=0.3, higher_scale=0.2)
    g2 = sampling.random_diffeo(3, rng, mu=0.1, higher_scale=0.2)
    d = sampling.random_jet(3, rng, scale=0.1, min_degree=1)
    pts = [FamilyPoint(3, {pq: [c] for pq, c in g1.terms().items()}),
           FamilyPoint(3, {pq: [g2[pq], d[pq]] for pq in set(g2.terms()) | set(d.terms())},
                       frame=lambda t: fibrlab.symplectic_frame([[1.5, t], [0.0, 1.0]]))]
    fam = Rank1Family(0.0, 1.0, pts)
    for row in fibrlab.mu_profile(fam, 5, route=route):
        glue = compose(invert(pts[0].chart(row.t)), pts[1].chart(row.t))
        assert row.ok
        assert row.mu == pytest.approx(moduli.mu_double(glue), abs=1e-6)


def test_obstruction_verdicts():
    vary = fibrlab.product_obstruction_report(fibrlab.mu_profile(fibrlab.linear_gluing_family(0.2, 0.5)))
    assert vary.kind == "NotAlmostDirectProduct"
    assert vary.evidence[0][0] == 0 and vary.evidence[1][0] == 1
    const = fibrlab.product_obstruction_report(
        fibrlab.mu_profile(fibrlab.linear_gluing_family(0.45, 0.0)))
    assert const.kind == "ProductConsistent"
    assert any("not a proof" in line for line in const.lines())


def test_obstruction_needs_two_valid_rows():
    rows = [ProfileRow(0.0, 3.0, 0.4, "ok"), ProfileRow(1.0, np.nan, np.nan, "ERR rank: x")]
    with pytest.raises(ContractError):
        fibrlab.product_obstruction_report(rows)


def test_family_needs_two_points():
    with pytest.raises(ContractError):
        Rank1Family(0, 1, [FamilyPoint(1, {(1, 0): [1.0]})])


def test_rank_error_off_the_critical_circle():
    fam = fibrlab.linear_gluing_family(0.2, 0.5)
    with pytest.raises(RankError):
        fibrlab.rank1_restricted_hessian(fam.suspended(), np.array([0.3, 0.1, 0.2, -0.4, 0.5]))


def test_eigen_route_matches_hessian_route():
    rng = np.random.default_rng(5)
    for _ in range(10):
        fmap, charts = fibrlab.random_eigen_model(rng)
        em = fibrlab.eigen_route_mu(fmap, charts[0].center, charts[1].center,
                                    rng.normal(size=2), (0.0, 1.0))
        glue = compose(invert(charts[0].chart), charts[1].chart)
        assert abs(em) == pytest.approx(moduli.mu_double(glue), abs=1e-6)
