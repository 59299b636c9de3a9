"""Complex structures on the base tangent plane and related invariants.

Two routes lead to the same pair +-J: the differential of a gluing map
conjugating the standard structure, and the Hessian of the moment map at a
focus-focus point, which is complex bilinear for exactly one J up to sign.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, NotFocusError, OrientationError
from .germs import as_diffeo

J_ST = np.array([[0.0, -1.0], [1.0, 0.0]])

# symplectic matrix for omega = dp1^dq1 + dp2^dq2 in coordinates (p1, p2, q1, q2)
OMEGA = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])


@dataclass(frozen=True)
class ComplexStructure2:
    """2x2 real J with J^2 = -I.

    The stored sign is whatever the producer chose; :meth:`positive` returns
    the sign inducing the standard orientation, (e1, J e1) positively
    oriented, i.e. J[1, 0] > 0.
    """

    J: np.ndarray

    def __post_init__(self):
        J = np.array(self.J, dtype=float)
        if J.shape != (2, 2):
            raise ContractError("a complex structure is a 2x2 matrix")
        scale = max(1.0, float(np.max(np.abs(J))) ** 2)
        if np.max(np.abs(J @ J + np.eye(2))) > 1e-9 * scale:
            raise ContractError("J^2 != -I")
        J.flags.writeable = False
        object.__setattr__(self, "J", J)

    def __neg__(self):
        return ComplexStructure2(-self.J)

    def positive(self):
        return self if self.J[1, 0] > 0 else -self

    def conjugated(self, A):
        """A J A^{-1}, the structure transported by the linear map A."""
        A = np.asarray(A, dtype=float)
        return ComplexStructure2(A @ self.J @ np.linalg.inv(A))

    def close_to(self, other, tol=1e-8, up_to_sign=True):
        scale = max(1.0, float(np.max(np.abs(self.J))))
        d = np.max(np.abs(self.J - other.J))
        if up_to_sign:
            d = min(d, np.max(np.abs(self.J + other.J)))
        return d <= tol * scale


STANDARD = ComplexStructure2(J_ST)


@dataclass(frozen=True)
class HessianForm:
    """d^2F at a critical point: one symmetric 4x4 matrix per base component."""

    q1: np.ndarray
    q2: np.ndarray

    def __post_init__(self):
        for name in ("q1", "q2"):
            q = np.array(getattr(self, name), dtype=float)
            if q.shape != (4, 4):
                raise ContractError(f"{name} must be 4x4")
            if np.max(np.abs(q - q.T)) > 1e-9 * max(1.0, np.max(np.abs(q))):
                raise ContractError(f"{name} is not symmetric")
            q = (q + q.T) / 2
            q.flags.writeable = False
            object.__setattr__(self, name, q)

    @property
    def stack(self):
        return np.stack([self.q1, self.q2])

    def value(self, x, y):
        """d^2F(x, y) in R^2."""
        return np.array([x @ self.q1 @ y, x @ self.q2 @ y])

    def push(self, A):
        """Hessian of A.F for a linear change A of base coordinates."""
        A = np.asarray(A, dtype=float)
        s = np.einsum("ij,jkl->ikl", A, self.stack)
        return HessianForm(s[0], s[1])

    def pull(self, P):
        """Hessian of F(P x) for a linear change P of the source."""
        P = np.asarray(P, dtype=float)
        return HessianForm(P.T @ self.q1 @ P, P.T @ self.q2 @ P)


def normal_form_hessian():
    """Hessians of (Re uv, Im uv) in (p1, p2, q1, q2), u = p1 - i p2, v = q1 + i q2."""
    q1 = np.zeros((4, 4))
    q1[0, 2] = q1[2, 0] = 1.0  # p1 q1
    q1[1, 3] = q1[3, 1] = 1.0  # p2 q2
    q2 = np.zeros((4, 4))
    q2[0, 3] = q2[3, 0] = 1.0  # p1 q2
    q2[1, 2] = q2[2, 1] = -1.0  # -p2 q1
    return HessianForm(q1, q2)


def j_from_gluing(phi):
    """D J_st D^{-1}, D the real matrix of the 1-jet of phi."""
    phi = as_diffeo(phi)
    if phi.orientation != 1:
        raise OrientationError("j_from_gluing expects an orientation preserving jet")
    return STANDARD.conjugated(phi.real_matrix())


def trace_invariant(J1, J2):
    """tr(J2 J1^{-1}) with J2's sign chosen so the pair shares an orientation."""
    t = float(np.trace(J2.J @ np.linalg.inv(J1.J)))
    if t < 0:
        t = -t
    if t < 2 - 1e-9 * max(1.0, t):
        raise OrientationError(f"trace {t:.6g} < 2 after sign resolution")
    return t


def trace_from_mu(mu):
    return 2 * (1 + mu**2) / (1 - mu**2)


def mu_from_trace(t):
    return float(np.sqrt(max(t - 2, 0.0) / (t + 2)))


# -- Hessian route ----------------------------------------------------------------


def _conic_coeffs(Q, a, b, c):
    # Q(x, x) for x = a + s b + t c, as coefficients of s^2, s, 1 (polys in t)
    P = np.polynomial.Polynomial
    s2 = P([b @ Q @ b])
    s1 = P([2 * (a @ Q @ b), 2 * (b @ Q @ c)])
    s0 = P([a @ Q @ a, 2 * (a @ Q @ c), c @ Q @ c])
    return s2, s1, s0


def _slice_null_points(H, a, b, c, rel_tol=1e-8):
    """Real points x = a + s b + t c with Q1(x,x) = Q2(x,x) = 0.

    Eliminating s leaves the quartic resultant in t; its real roots come from
    companion-matrix eigenvalues and are polished by Newton on (s, t).
    """
    A2, A1, A0 = _conic_coeffs(H.q1, a, b, c)
    B2, B1, B0 = _conic_coeffs(H.q2, a, b, c)
    lead = A2 * B1 - A1 * B2
    const = A2 * B0 - A0 * B2
    res = const * const - lead * (A1 * B0 - A0 * B1)
    coef = res.coef
    if coef.size < 2 or np.max(np.abs(coef)) == 0:
        return []
    roots = np.roots(coef[::-1])
    qscale = max(np.max(np.abs(H.q1)), np.max(np.abs(H.q2)))
    out = []
    for t in roots:
        if abs(t.imag) > 1e-6 * (1 + abs(t)):
            continue
        t = t.real
        cands = []
        if abs(lead(t)) > 1e-12 * (1 + abs(const(t))):
            cands.append(-const(t) / lead(t))
        else:
            cands.extend(r.real for r in np.roots([A2(t), A1(t), A0(t)]) if abs(r.imag) < 1e-6)
        for s in cands:
            s, tt = _newton_polish(H, a, b, c, s, t)
            x = a + s * b + tt * c
            r = max(abs(x @ H.q1 @ x), abs(x @ H.q2 @ x))
            if r <= rel_tol * qscale * (x @ x):
                out.append(x)
    return out


def _newton_polish(H, a, b, c, s, t, steps=4):
    for _ in range(steps):
        x = a + s * b + t * c
        f = np.array([x @ H.q1 @ x, x @ H.q2 @ x])
        jac = np.array(
            [[2 * (b @ H.q1 @ x), 2 * (c @ H.q1 @ x)], [2 * (b @ H.q2 @ x), 2 * (c @ H.q2 @ x)]]
        )
        if abs(np.linalg.det(jac)) < 1e-300:
            break
        ds, dt = np.linalg.solve(jac, -f)
        s, t = s + ds, t + dt
    return s, t


def _kernel_plane(H, x):
    """ker Q1(x, .) cap ker Q2(x, .), returned as an orthonormal 4x2 basis."""
    M = np.stack([H.q1 @ x, H.q2 @ x])
    _, sv, vt = np.linalg.svd(M)
    if sv[-1] <= 1e-8 * max(sv[0], 1e-300):
        return None
    return vt[2:].T


def _is_isotropic(H, V, tol):
    return all(np.max(np.abs(V.T @ Q @ V)) <= tol for Q in (H.q1, H.q2))


def hessian_to_j(H, seed=0, resamples=20):
    """The complex structures +-J making d^2F complex bilinear.

    Returns (J, -J) with J positively oriented.  Raises NotFocusError when
    the Hessian is not of focus-focus type.
    """
    rng = np.random.default_rng(seed)
    qscale = max(np.max(np.abs(H.q1)), np.max(np.abs(H.q2)))
    if qscale == 0:
        raise NotFocusError("zero Hessian")
    iso_tol = 1e-7 * qscale
    last_reason = "no real common null vector on any slice"
    for _ in range(resamples):
        a, b, c = rng.normal(size=(3, 4))
        points = _slice_null_points(H, a, b, c)
        if not points:
            continue
        x1 = points[0] / np.linalg.norm(points[0])
        V = _kernel_plane(H, x1)
        if V is None:
            last_reason = "degenerate null direction"
            continue
        Vp = None
        for x in points[1:]:
            x = x / np.linalg.norm(x)
            if np.linalg.norm(x - V @ (V.T @ x)) > 1e-3:
                Vp = _kernel_plane(H, x)
                if Vp is not None:
                    break
        if Vp is None:
            last_reason = "second null plane not found"
            continue
        if not (_is_isotropic(H, V, iso_tol) and _is_isotropic(H, Vp, iso_tol)):
            raise NotFocusError("null set is not a union of isotropic planes")
        if np.linalg.svd(np.hstack([V, Vp]), compute_uv=False)[-1] < 1e-6:
            raise NotFocusError("null planes are not transverse")
        return _structure_from_planes(H, V, Vp)
    raise NotFocusError(last_reason)


def _structure_from_planes(H, V, Vp):
    xi, eta = V[:, 0], V[:, 1]
    D_xi = np.stack([xi @ H.q1 @ Vp, xi @ H.q2 @ Vp])
    D_eta = np.stack([eta @ H.q1 @ Vp, eta @ H.q2 @ Vp])
    if abs(np.linalg.det(D_xi)) <= 1e-10 * max(np.max(np.abs(D_xi)), 1e-300) ** 2:
        raise NotFocusError("d^2F(xi, .) is not an isomorphism onto the base")
    R = D_eta @ np.linalg.inv(D_xi)
    N = R - np.trace(R) / 2 * np.eye(2)
    # traceless 2x2: N^2 = -det(N) I
    det = np.linalg.det(N)
    if det <= 1e-10 * max(np.max(np.abs(R)), 1e-300) ** 2:
        raise NotFocusError("not focus-focus: N^2 is not a negative scalar")
    J = ComplexStructure2(N / np.sqrt(det)).positive()
    # d^2F(xi, J_fib eta') = J d^2F(xi, eta') with J_fib = D_xi^{-1} J D_xi on V'
    J_fib = np.linalg.inv(D_xi) @ J.J @ D_xi
    err = np.max(np.abs(D_eta @ J_fib - J.J @ D_eta))
    if err > 1e-6 * max(1.0, np.max(np.abs(D_eta)) * np.max(np.abs(J.J))):
        raise NotFocusError("Hessian is not complex bilinear for the recovered J")
    return J, -J


# -- eigenvalue route --------------------------------------------------------------


def eigen_mu(lam1, lam_i):
    """(lam_i - lam1) / (lam_i + conj(lam1))."""
    den = lam_i + np.conj(lam1)
    if abs(den) <= 1e-14 * max(1.0, abs(lam_i), abs(lam1)):
        raise ContractError("lam_i + conj(lam_1) vanishes")
    return complex((lam_i - lam1) / den)


def hamiltonian_linearization(hess):
    """Linearization Omega^{-1} Hess of the Hamiltonian field at a critical point."""
    return np.linalg.solve(OMEGA, np.asarray(hess, dtype=float))


def joint_spectrum(A_H, A_S):
    """Paired eigenvalues of two commuting operators on shared eigenvectors."""
    mix = A_H + np.sqrt(2) * A_S + np.pi * 1e-3 * (A_H @ A_S)
    _, vecs = np.linalg.eig(mix)
    pairs = []
    for v in vecs.T:
        nv = np.vdot(v, v)
        pairs.append((complex(np.vdot(v, A_H @ v) / nv), complex(np.vdot(v, A_S @ v) / nv)))
    return pairs


def select_eigenvalue(eigs, convention="positive", generator=None, tol=1e-9):
    """Pick one eigenvalue out of a quadruple +-a +-bi.

    ``positive``: the one with Re > 0 and Im >= 0.  ``generator``: the one
    with Re > 0 whose paired eigenvalue of the circle-action generator is +i
    (``generator`` lists those paired values in the same order as ``eigs``).
    """
    eigs = [complex(e) for e in eigs]
    scale = max(abs(e) for e in eigs)
    right = [i for i, e in enumerate(eigs) if e.real > tol * scale]
    if not right or all(abs(e.real) <= tol * scale for e in eigs):
        raise ContractError("Re(lambda) = 0: Hamiltonian is not generic")
    if convention == "positive":
        best = max(right, key=lambda i: eigs[i].imag)
        lam = eigs[best]
        return complex(lam.real, abs(lam.imag)) if abs(lam.imag) <= tol * scale else lam
    if convention == "generator":
        if generator is None or len(generator) != len(eigs):
            raise ContractError("generator convention needs paired generator eigenvalues")
        best = max(right, key=lambda i: complex(generator[i]).imag)
        return eigs[best]
    raise ContractError(f"unknown eigenvalue convention {convention!r}")
