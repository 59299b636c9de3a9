"""Acceptance suite, shared by ``focusjet selftest`` and the test-suite.

Each check returns a :class:`CriterionResult`; ``run_all`` runs them in
order.  Everything is seeded, so a run is reproducible.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import fibrlab, geomlin, germs, moduli, sampling
from .jetcalc import Jet2, imag_part


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} [{self.number}] {self.name}: {self.detail}"


def _canon_vec(phi):
    mus = moduli.canonicalize_invariant(moduli.first_order_invariants(phi)).mus
    return np.array([v for m in mus for v in (m.real, m.imag)])


def liftability(seed=0):
    rng = np.random.default_rng(seed)
    bad_lift, bad_not, worst = 0, 0, 0.0
    for i in range(200):
        k = int(rng.integers(1, 7))
        psi = sampling.random_liftable(k, rng, kind="z" if i % 2 == 0 else "zbar")
        cls = germs.classify_liftable(psi)
        if not cls.liftable:
            bad_lift += 1
            continue
        worst = max(worst, germs.verify_lift(psi, germs.lift_to_model(psi)))
    for _ in range(200):
        k = int(rng.integers(1, 7))
        if germs.classify_liftable(sampling.random_not_liftable(k, rng)).liftable:
            bad_not += 1
    ok = bad_lift == 0 and bad_not == 0 and worst < 1e-9
    return ok, (f"liftable misclassified {bad_lift}/200, not-liftable misclassified "
                f"{bad_not}/200, worst lift residual {worst:.2e}")


def _canonical_jacobian(n, rng, h=1e-6):
    x0 = np.concatenate([rng.uniform(0.5, 1.5, n - 1) * np.exp(1j * rng.uniform(0, 6.28, n - 1)),
                         rng.uniform(0.1, 0.4, n - 1) * np.exp(1j * rng.uniform(0, 6.28, n - 1))])
    params = np.concatenate([x0.real, x0.imag])

    def f(v):
        c = v[: 2 * (n - 1)] + 1j * v[2 * (n - 1):]
        a, b = c[: n - 1], c[n - 1:]
        tup = moduli.GluingTuple(tuple(Jet2.from_dict({(1, 0): ai, (0, 1): bi}, 1)
                                       for ai, bi in zip(a, b)))
        return _canon_vec(tup)

    cols = []
    for i in range(params.size):
        e = np.zeros_like(params)
        e[i] = h
        cols.append((f(params + e) - f(params - e)) / (2 * h))
    return np.column_stack(cols)


def gauge_invariance(seed=0):
    rng = np.random.default_rng(seed)
    drift = 0.0
    for n in (2, 3, 4):
        for _ in range(100):
            k = int(rng.integers(1, 7))
            phi = sampling.random_tuple(n, k, rng)
            eta = sampling.random_gauge(n, k, rng)
            drift = max(drift, np.max(np.abs(_canon_vec(moduli.gauge_act(eta, phi))
                                             - _canon_vec(phi))))
    rank_ok, worst_gap = True, np.inf
    for n in (2, 3, 4):
        for _ in range(10):
            sv = np.linalg.svd(_canonical_jacobian(n, rng), compute_uv=False)
            r = 2 * n - 3
            rank = int(np.sum(sv > 1e-6 * sv[0]))
            gap = sv[r - 1] / sv[r] if sv[r] > 0 else np.inf
            worst_gap = min(worst_gap, gap)
            rank_ok &= rank == r and gap > 1e3
    ok = drift <= 1e-9 and rank_ok
    return ok, f"max drift {drift:.2e}, rank 2n-3 at all points: {rank_ok}, min gap {worst_gap:.2e}"


def double_pinched(seed=0):
    rng = np.random.default_rng(seed)
    k = 6
    wrong_eq, wrong_ne, worst = 0, 0, 0.0
    for _ in range(100):
        mu = rng.uniform(0.05, 0.95)
        res = moduli.equivalent_double_pinched(sampling.random_diffeo(k, rng, mu),
                                               sampling.random_diffeo(k, rng, mu))
        if res.status is not moduli.EquivStatus.EQUIVALENT:
            wrong_eq += 1
        else:
            worst = max(worst, res.residual)
    for _ in range(100):
        mu = rng.uniform(0.05, 0.95)
        mu2 = mu
        while abs(mu2 - mu) <= 1e-3:
            mu2 = rng.uniform(0.05, 0.95)
        res = moduli.equivalent_double_pinched(sampling.random_diffeo(k, rng, mu),
                                               sampling.random_diffeo(k, rng, mu2))
        if res.status is not moduli.EquivStatus.NOT_EQUIVALENT:
            wrong_ne += 1
    ok = wrong_eq == 0 and wrong_ne == 0 and worst < 1e-8
    return ok, (f"equal-mu pairs not Equivalent {wrong_eq}/100, distinct-mu pairs not "
                f"NotEquivalent {wrong_ne}/100, worst witness residual {worst:.2e}")


def stabilizer_codim(seed=0):
    mismatches = []
    for n in (2, 3, 4):
        for k in range(1, 9):
            r = moduli.orbit_tangent_rank(moduli.generic_linear_tuple(n, k, seed + 7))
            if r.stab_dim != moduli.stabilizer_formula(n, k) or r.codim != moduli.codim_formula(n, k):
                mismatches.append((n, k, r.stab_dim, r.codim))
    return not mismatches, f"24 (n, k) cells, mismatches: {mismatches or 'none'}"


def trace_formula(seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(1000):
        phi = sampling.random_diffeo(1, rng)
        t = geomlin.trace_invariant(geomlin.STANDARD, geomlin.j_from_gluing(phi))
        worst = max(worst, abs(t - geomlin.trace_from_mu(moduli.mu_double(phi))))
    z, zb = Jet2.z(1), Jet2.zbar(1)
    spot0 = geomlin.trace_invariant(geomlin.STANDARD, geomlin.STANDARD)
    spot_half = geomlin.trace_invariant(geomlin.STANDARD, geomlin.j_from_gluing(z + zb * 0.5))
    ok = worst < 1e-9 and abs(spot0 - 2) < 1e-9 and abs(spot_half - 10 / 3) < 1e-9
    return ok, f"max error {worst:.2e}, mu=0 -> {spot0:.12g}, mu=1/2 -> {spot_half:.12g}"


def eigenvalue_formula(seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(1000):
        l1, l2 = sampling.random_complex(rng, 2) * 2
        a = rng.uniform(0.2, 5.0) * rng.choice([-1, 1])
        b = rng.normal() * 3
        m = geomlin.eigen_mu(l1, l2)
        m2 = geomlin.eigen_mu(a * l1 + 1j * b, a * l2 + 1j * b)
        worst = max(worst, abs(m - m2) / max(1.0, abs(m)))
    route = 0.0
    for _ in range(50):
        fmap, charts = fibrlab.random_eigen_model(rng)
        ell = rng.normal(size=2)
        em = abs(fibrlab.eigen_route_mu(fmap, charts[0].center, charts[1].center, ell, (0.0, 1.0)))
        J1 = fibrlab.detect_focus(fmap, charts[0].center).J[0]
        J2 = fibrlab.detect_focus(fmap, charts[1].center).J[0]
        hm = geomlin.mu_from_trace(geomlin.trace_invariant(J1, J2))
        route = max(route, abs(em - hm))
    ok = worst < 1e-12 and route < 1e-6
    return ok, f"reparametrization drift {worst:.2e}, eigen vs Hessian route {route:.2e}"


def symplectization(seed=0):
    rng = np.random.default_rng(seed)
    worst_im, worst_inv = 0.0, 0.0
    for _ in range(100):
        n, k = int(rng.integers(2, 5)), int(rng.integers(1, 7))
        phi = sampling.random_tuple(n, k, rng)
        out, _ = moduli.symplectize_gluing(phi)
        zi = imag_part(Jet2.z(k))
        for m in out.maps:
            worst_im = max(worst_im, (imag_part(m) - zi).max_abs())
        worst_inv = max(worst_inv, np.max(np.abs(_canon_vec(out) - _canon_vec(phi))))
    ok = worst_im < 1e-9 and worst_inv < 1e-9
    return ok, f"max |Im phi - Im z| {worst_im:.2e}, invariant drift {worst_inv:.2e}"


def varying_family(seed=0):
    varying = fibrlab.linear_gluing_family(0.2, 0.5)
    prof = fibrlab.mu_profile(varying, 11, seed=seed)
    err = max(abs(r.mu - (0.2 + 0.5 * r.t)) if r.ok else np.inf for r in prof)
    rep = fibrlab.product_obstruction_report(prof)
    const = fibrlab.product_obstruction_report(
        fibrlab.mu_profile(fibrlab.linear_gluing_family(0.45, 0.0), 11, seed=seed))
    ok = err < 1e-6 and not rep.consistent and const.consistent
    return ok, f"max |mu(t) - (0.2+0.5t)| {err:.2e}, varying: {rep.kind}, constant: {const.kind}"


def degeneration(seed=0):
    rng = np.random.default_rng(seed)
    worst_law, worst_ratio = 0.0, 0.0
    for _ in range(50):
        k = int(rng.integers(3, 7))
        phi = Jet2.z(k) + sampling.random_higher(k, rng)
        for c in (2.0, 10.0, 100.0):
            out = moduli.conj_by_scaling(phi, c)
            for (p, q), v in phi.terms().items():
                want = v * c ** (1 - p - q)
                worst_law = max(worst_law, abs(out[p, q] - want) / max(abs(want), 1e-300))
        flat = phi - phi.degree_part(2, 2)
        d1 = (moduli.conj_by_scaling(flat, 1.0) - Jet2.z(k)).max_abs()
        d100 = (moduli.conj_by_scaling(flat, 100.0) - Jet2.z(k)).max_abs()
        worst_ratio = max(worst_ratio, d100 / d1)
    ok = worst_law < 1e-12 and worst_ratio < 1e-3
    return ok, f"max relative law error {worst_law:.2e}, max dist(c=100)/dist(c=1) {worst_ratio:.2e}"


CRITERIA = [
    (1, "liftability", liftability),
    (2, "gauge-orbit invariance", gauge_invariance),
    (3, "double-pinched classification", double_pinched),
    (4, "stabilizer and codimension", stabilizer_codim),
    (5, "trace formula", trace_formula),
    (6, "eigenvalue formula", eigenvalue_formula),
    (7, "symplectization", symplectization),
    (8, "varying-mu family", varying_family),
    (9, "degeneration under scaling", degeneration),
]


def run_criterion(number, seed=0):
    num, name, fn = CRITERIA[number - 1]
    t0 = time.perf_counter()
    try:
        ok, detail = fn(seed)
    except Exception as exc:  # a crash is a failure, reported like one
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CriterionResult(num, name, bool(ok), detail, time.perf_counter() - t0)


def run_all(seed=0):
    return [run_criterion(i, seed) for i in range(1, len(CRITERIA) + 1)]
