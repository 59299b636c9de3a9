"""Numeric moment-map models around focus-focus points.

Each singular point carries a local model F = g(uv) where
u = p1 - i p2, v = q1 + i q2 are read off a linear frame of R^4, so that
uv = (p1 q1 + p2 q2) + i (p1 q2 - p2 q1).  Hessians are taken by finite
differences and fed to :func:`geomlin.hessian_to_j`.

Rank-1 families (F_t(x), t) are handled on the R^5 reduction: the circle
factor is dropped because every quantity computed here is constant along
the critical circle.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ContractError, NotCriticalError, NotFocusError, RankError
from .geomlin import (
    HessianForm,
    hamiltonian_linearization,
    hessian_to_j,
    joint_spectrum,
    mu_from_trace,
    normal_form_hessian,
    select_eigenvalue,
    trace_invariant,
    eigen_mu,
)
from .germs import as_diffeo
from .jetcalc import Jet2

FD_STEP = 1e-4
CRITICAL_TOL = 1e-6
OBSTRUCTION_FACTOR = 10


def model_coords(y):
    """(u, v) from model coordinates (p1, p2, q1, q2)."""
    return complex(y[0], -y[1]), complex(y[2], y[3])


@dataclass(frozen=True)
class LocalModelChart:
    center: np.ndarray
    chart: Jet2
    frame: np.ndarray = field(default_factory=lambda: np.eye(4))
    radius: float = 4.0

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(4))
        object.__setattr__(self, "frame", np.asarray(self.frame, dtype=float).reshape(4, 4))
        # raises on g(0) != 0 or a non-invertible linear part
        object.__setattr__(self, "chart", as_diffeo(self.chart))
        if abs(np.linalg.det(self.frame)) < 1e-12:
            raise ContractError("frame is singular")

    def contains(self, x):
        return np.linalg.norm(np.asarray(x, dtype=float) - self.center) <= self.radius

    def hessian(self):
        """Closed-form d^2F at the center: D_g . (normal form) . frame."""
        return normal_form_hessian().pull(self.frame).push(self.chart.real_matrix())


def eval_model(chart, x):
    x = np.asarray(x, dtype=float)
    if not chart.contains(x):
        raise ContractError(f"point at distance {np.linalg.norm(x - chart.center):.3g} "
                            f"outside chart radius {chart.radius}")
    u, v = model_coords(chart.frame @ (x - chart.center))
    w = chart.chart(u * v)
    return np.array([w.real, w.imag])


@dataclass
class NumericMomentMap:
    """Black-box F: R^4 -> R^2 together with the model charts it came from."""

    evaluator: Callable
    charts: tuple = ()

    def __call__(self, x):
        return np.asarray(self.evaluator(np.asarray(x, dtype=float)), dtype=float)

    @property
    def singular_points(self):
        return [c.center for c in self.charts]

    @classmethod
    def from_charts(cls, charts):
        charts = tuple(charts)

        def evaluator(x):
            d = [np.linalg.norm(x - c.center) for c in charts]
            return eval_model(charts[int(np.argmin(d))], x)

        return cls(evaluator, charts)


def chart_centers(n, spacing=10.0):
    return [np.array([spacing * i, 0.0, 0.0, 0.0]) for i in range(n)]


def _fd_gradient(f, x, h):
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((f(x + e) - f(x - e)) / (2 * h))
    return np.column_stack(cols)


def _fd_second(f, x, h):
    n = x.size
    fx = f(x)
    out = np.zeros((fx.size, n, n))
    eye = np.eye(n) * h
    for i in range(n):
        out[:, i, i] = (f(x + eye[i]) - 2 * fx + f(x - eye[i])) / h**2
        for j in range(i):
            d = (
                f(x + eye[i] + eye[j])
                - f(x + eye[i] - eye[j])
                - f(x - eye[i] + eye[j])
                + f(x - eye[i] - eye[j])
            ) / (4 * h * h)
            out[:, i, j] = out[:, j, i] = d
    return out


def fd_hessian(fmap, P, h=FD_STEP, richardson=True, crit_tol=CRITICAL_TOL):
    """Central-difference Hessian of a map R^4 -> R^2 at a critical point."""
    P = np.asarray(P, dtype=float)
    step = h * max(1.0, float(np.max(np.abs(P))))
    sec = _fd_second(fmap, P, step)
    if richardson:
        sec = (4 * _fd_second(fmap, P, step / 2) - sec) / 3
    grad = _fd_gradient(fmap, P, step)
    scale = max(1.0, float(np.max(np.abs(sec))))
    if np.max(np.abs(grad)) > crit_tol * scale:
        raise NotCriticalError(f"|dF(P)| = {np.max(np.abs(grad)):.3g} at a supposed critical point")
    return HessianForm(sec[0], sec[1])


@dataclass(frozen=True)
class FocusResult:
    focus: bool
    J: tuple = ()
    reason: str = ""
    hessian: HessianForm | None = None

    @property
    def kind(self):
        return "FocusFocus" if self.focus else "NotFocus"


def detect_focus(fmap, P, seed=0, h=FD_STEP):
    H = fd_hessian(fmap, P, h=h)
    return detect_focus_hessian(H, seed=seed)


def detect_focus_hessian(H, seed=0):
    try:
        J = hessian_to_j(H, seed=seed)
    except NotFocusError as exc:
        return FocusResult(False, reason=str(exc), hessian=H)
    return FocusResult(True, J=J, hessian=H)


def quadratic_model(q1, q2):
    """Moment map x -> (x.Q1.x / 2, x.Q2.x / 2), Hessian exactly (Q1, Q2)."""
    q1, q2 = np.asarray(q1, float), np.asarray(q2, float)
    return NumericMomentMap(lambda x: np.array([x @ q1 @ x / 2, x @ q2 @ x / 2]))


def hyperbolic_model():
    """(p1 q1, p2 q2): a nondegenerate rank-0 point that is not focus-focus."""
    q1 = np.zeros((4, 4))
    q1[0, 2] = q1[2, 0] = 1.0
    q2 = np.zeros((4, 4))
    q2[1, 3] = q2[3, 1] = 1.0
    return quadratic_model(q1, q2)


# -- rank-1 families -------------------------------------------------------------


@dataclass
class FamilyPoint:
    """One focus point of a family; chart coefficients are polynomials in t.

    ``coeffs`` maps (p, q) to a list [c0, c1, ...] of complex numbers meaning
    c0 + c1 t + c2 t^2 + ...; ``frame`` is a 4x4 matrix or a callable of t.
    """

    order: int
    coeffs: dict
    frame: object = None
    center: np.ndarray | None = None

    def chart(self, t):
        arr = np.zeros((self.order + 1, self.order + 1), dtype=np.complex128)
        for (p, q), poly in self.coeffs.items():
            arr[p, q] = np.polynomial.polynomial.polyval(t, np.asarray(poly, dtype=np.complex128))
        return Jet2(arr)

    def frame_at(self, t):
        if self.frame is None:
            return np.eye(4)
        return np.asarray(self.frame(t) if callable(self.frame) else self.frame, dtype=float)


@dataclass
class Rank1Family:
    t_min: float
    t_max: float
    points: list

    def __post_init__(self):
        if len(self.points) != 2:
            raise ContractError("a rank-1 family carries exactly two focus points")
        centers = chart_centers(len(self.points))
        for pt, c in zip(self.points, centers):
            if pt.center is None:
                pt.center = c
            pt.center = np.asarray(pt.center, dtype=float)

    def samples(self, count):
        if count < 1:
            raise ContractError("need at least one sample")
        if count == 1:
            return np.array([self.t_min])
        return np.linspace(self.t_min, self.t_max, count)

    def moment_map(self, t):
        charts = [LocalModelChart(p.center, p.chart(t), p.frame_at(t)) for p in self.points]
        return NumericMomentMap.from_charts(charts)

    def suspended(self):
        """F3(x, t) = (F_t(x), t) on R^5."""

        def F3(xt):
            xt = np.asarray(xt, dtype=float)
            return np.concatenate([self.moment_map(xt[4])(xt[:4]), [xt[4]]])

        return F3


def linear_gluing_family(mu0, slope, order=1):
    """Second chart z + (mu0 + slope t) zbar, first chart the identity."""
    ident = FamilyPoint(order, {(1, 0): [1.0]})
    varying = FamilyPoint(order, {(1, 0): [1.0], (0, 1): [mu0, slope]})
    return Rank1Family(0.0, 1.0, [ident, varying])


@dataclass(frozen=True)
class ProfileRow:
    t: float
    trace: float
    mu: float
    status: str
    critical_value: tuple = ()

    @property
    def ok(self):
        return self.status == "ok"


def _canonical_basis(proj, dim):
    """Orthonormal basis of a subspace from its projector, built by
    Gram-Schmidt on projected standard vectors (deterministic, aligned with
    the coordinate axes whenever possible)."""
    basis = []
    for e in np.eye(proj.shape[0]):
        w = proj @ e
        for b in basis:
            w = w - (b @ w) * b
        nw = np.linalg.norm(w)
        if nw > 1e-6:
            basis.append(w / nw)
        if len(basis) == dim:
            break
    if len(basis) != dim:
        raise RankError("could not build a basis")
    return np.column_stack(basis)


def rank1_restricted_hessian(F3, P, h=FD_STEP):
    """Hessian of F3: R^5 -> R^3 on Ker dF3 x Ker dF3, valued in Coker dF3."""
    P = np.asarray(P, dtype=float)
    step = h * max(1.0, float(np.max(np.abs(P))))
    F3 = _as_array_fn(F3)
    jac = _fd_gradient(F3, P, step)
    U, sv, Vt = np.linalg.svd(jac)
    rank = int(np.sum(sv > 1e-6))
    if not (sv[0] > 1e-4 and rank == 1):
        raise RankError(f"dF has rank {rank} at P, expected 1 (singular values {np.round(sv, 8)})")
    kernel = Vt[1:].T
    coker = U[:, 1:]
    K = _canonical_basis(kernel @ kernel.T, kernel.shape[1])
    C = _canonical_basis(coker @ coker.T, 2)

    def restricted(y):
        return C.T @ F3(P + K @ y)

    return fd_hessian(restricted, np.zeros(K.shape[1]), h=h)


def _as_array_fn(f):
    return lambda x: np.asarray(f(x), dtype=float)


def _critical_value(family, t):
    fmap = family.moment_map(t)
    val = fmap(family.points[0].center)
    return (float(val[0]), float(val[1]), float(t))


def _profile_row(family, t, route, seed, h):
    cv = ()
    try:
        cv = _critical_value(family, t)
        Js = []
        for pt in family.points:
            if route == "slice":
                res = detect_focus(family.moment_map(t), pt.center, seed=seed, h=h)
            elif route == "suspended":
                H = rank1_restricted_hessian(family.suspended(), np.append(pt.center, t), h=h)
                res = detect_focus_hessian(H, seed=seed)
            else:
                raise ContractError(f"unknown route {route!r}")
            if not res.focus:
                raise NotFocusError(res.reason)
            Js.append(res.J[0])
        tr = trace_invariant(Js[0], Js[1])
        return ProfileRow(float(t), tr, mu_from_trace(tr), "ok", cv)
    except (ContractError, ValueError) as exc:
        code = getattr(exc, "code", "contract")
        return ProfileRow(float(t), float("nan"), float("nan"), f"ERR {code}: {exc}", cv)


def mu_profile(family, samples=11, route="slice", seed=0, h=FD_STEP):
    """Trace invariant and mu at evenly spaced t; failures become error rows."""
    return [_profile_row(family, t, route, seed, h) for t in family.samples(samples)]


@dataclass(frozen=True)
class ObstructionReport:
    consistent: bool
    spread: float
    threshold: float
    evidence: tuple
    valid_samples: int

    @property
    def kind(self):
        return "ProductConsistent" if self.consistent else "NotAlmostDirectProduct"

    def lines(self):
        out = [f"verdict\t{self.kind}", f"spread\t{self.spread:.12g}",
               f"threshold\t{self.threshold:.3g}", f"valid_samples\t{self.valid_samples}"]
        (ta, ma), (tb, mb) = self.evidence
        out.append(f"evidence\tt={ta:.12g} mu={ma:.12g}\tt={tb:.12g} mu={mb:.12g}")
        if self.consistent:
            out.append("note\tconstant mu is necessary for a product structure, not sufficient; "
                       "this is not a proof that one exists")
        else:
            out.append("note\tmu varies along the critical curve, so no almost direct "
                       "product is diffeomorphic to this family")
        return out


def product_obstruction_report(profile, tol=CRITICAL_TOL):
    valid = [r for r in profile if r.ok]
    if len(valid) < 2:
        raise ContractError(f"need at least 2 valid samples, got {len(valid)}")
    lo = min(valid, key=lambda r: r.mu)
    hi = max(valid, key=lambda r: r.mu)
    spread = hi.mu - lo.mu
    threshold = OBSTRUCTION_FACTOR * tol
    return ObstructionReport(
        consistent=spread <= threshold,
        spread=spread,
        threshold=threshold,
        evidence=((lo.t, lo.mu), (hi.t, hi.mu)),
        valid_samples=len(valid),
    )


# -- eigenvalue route -------------------------------------------------------------


def symplectic_frame(A):
    """diag(A, A^{-T}) on (p, q): preserves dp1^dq1 + dp2^dq2."""
    A = np.asarray(A, dtype=float)
    return np.block([[A, np.zeros((2, 2))], [np.zeros((2, 2)), np.linalg.inv(A).T]])


def eigen_route_mu(fmap, P1, Pi, ell, sigma, seed=0):
    """mu from linearization eigenvalues of H = ell.F at two focus points.

    ``sigma`` is the base functional generating the circle action; its
    paired eigenvalue fixes which member of each quadruple is used.
    """
    lams = []
    for P in (P1, Pi):
        H = fd_hessian(fmap, P)
        A_H = hamiltonian_linearization(ell[0] * H.q1 + ell[1] * H.q2)
        A_S = hamiltonian_linearization(sigma[0] * H.q1 + sigma[1] * H.q2)
        pairs = joint_spectrum(A_H, A_S)
        lams.append(select_eigenvalue([p[0] for p in pairs], "generator", [p[1] for p in pairs]))
    return eigen_mu(lams[0], lams[1])


def random_eigen_model(rng, n_points=2):
    """Linear-chart model whose normal charts share the circle functional Im.

    The normal chart at point i is w -> r_i . w + i Im w, so its inverse g_i
    is the model chart; frames are random symplectic.  Returns (map, charts).
    """
    charts = []
    for c in chart_centers(n_points):
        r1 = rng.uniform(0.5, 2.0)
        r2 = rng.uniform(-1.0, 1.0)
        # phi_i = [[r1, r2], [0, 1]] in (x, y); chart g_i is its inverse
        M = np.linalg.inv(np.array([[r1, r2], [0.0, 1.0]]))
        a = complex((M[0, 0] + M[1, 1]) / 2, (M[1, 0] - M[0, 1]) / 2)
        b = complex((M[0, 0] - M[1, 1]) / 2, (M[1, 0] + M[0, 1]) / 2)
        g = Jet2.from_dict({(1, 0): a, (0, 1): b}, 1)
        A = rng.normal(size=(2, 2)) + 2 * np.eye(2)
        charts.append(LocalModelChart(c, g, symplectic_frame(A)))
    return NumericMomentMap.from_charts(charts), charts
