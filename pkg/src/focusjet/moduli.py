"""Gauge action of liftable jets on gluing tuples and its invariants.

A tuple (phi_12, ..., phi_1n) of orientation preserving k-jets is acted on by
n-tuples (psi_1, ..., psi_n) of liftable jets of one orientation class:

    phi_1i  ->  psi_1 o phi_1i o psi_i^{-1}

The module computes first order invariants and their canonical form, the
complete normalization for n = 2 off the mu = 0 stratum, a representative
with Im phi = Im z, and orbit/stabilizer dimensions at jet level.
"""

import cmath
import enum
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .config import MU_ZERO_TOL, RANK_TOL, tolerance
from .errors import (
    ContractError,
    DegenerateJetError,
    MuZeroError,
    NotLiftableError,
    OrderMismatchError,
    OrientationError,
)
from .germs import DiffeoJet, LiftKind, as_diffeo, classify_liftable
from .jetcalc import (
    Jet2,
    compose,
    d_dz,
    d_dzbar,
    EXT,
    ext_array,
    ext_compose,
    ext_invert,
    ideal_divide,
    imag_part,
    invert,
    monomials,
)


@dataclass(frozen=True)
class GluingTuple:
    """Gluing maps (phi_12, ..., phi_1n) relative to the chart at point 1."""

    maps: tuple

    def __post_init__(self):
        maps = tuple(as_diffeo(m) for m in self.maps)
        if not maps:
            raise ContractError("a gluing tuple needs n >= 2 points")
        orders = {m.order for m in maps}
        if len(orders) != 1:
            raise OrderMismatchError(f"gluing maps of different orders {sorted(orders)}")
        for i, m in enumerate(maps, start=2):
            if m.orientation != 1:
                raise OrientationError(f"phi_1{i} is orientation reversing")
        object.__setattr__(self, "maps", maps)

    @property
    def n(self):
        return len(self.maps) + 1

    @property
    def order(self):
        return self.maps[0].order

    def gluing_map(self, i, j):
        """phi_ij = phi_1i^{-1} o phi_1j, indices 1-based; phi_11 = id."""
        k = self.order
        ident = Jet2.z(k)
        left = ident if i == 1 else invert(self.maps[i - 2])
        right = ident if j == 1 else self.maps[j - 2]
        return compose(left, right)


@dataclass(frozen=True)
class GaugeTuple:
    """(psi_1, ..., psi_n) liftable, all divisible by z or all by zbar."""

    psis: tuple

    def __post_init__(self):
        psis = tuple(as_diffeo(p) for p in self.psis)
        kinds = set()
        for i, p in enumerate(psis, start=1):
            cls = classify_liftable(p)
            if not cls.liftable:
                raise NotLiftableError(f"psi_{i} is not liftable")
            kinds.add(cls.kind)
        if len(kinds) > 1:
            raise OrientationError("gauge tuple mixes orientation classes")
        orders = {p.order for p in psis}
        if len(orders) > 1:
            raise OrderMismatchError(f"gauge entries of different orders {sorted(orders)}")
        object.__setattr__(self, "psis", psis)

    @property
    def n(self):
        return len(self.psis)

    @property
    def orientation(self):
        return self.psis[0].orientation

    def __matmul__(self, other):
        """Componentwise composition (self o other)."""
        return GaugeTuple(tuple(compose(a, b) for a, b in zip(self.psis, other.psis)))


@dataclass(frozen=True)
class FirstOrderInvariant:
    mus: tuple
    canonical: bool = False

    def as_array(self):
        return np.array(self.mus, dtype=np.complex128)


def gauge_act(eta, phi):
    if eta.n != phi.n:
        raise ContractError(f"gauge tuple has {eta.n} entries, gluing tuple needs {phi.n}")
    if eta.psis[0].order != phi.order:
        raise OrderMismatchError("gauge and gluing tuples have different orders")
    psi1 = eta.psis[0]
    out = []
    for psi_i, phi_1i in zip(eta.psis[1:], phi.maps):
        out.append(compose(psi1, compose(phi_1i, invert(psi_i))))
    return GluingTuple(tuple(out))


def first_order_invariants(phi):
    mus = []
    for m in phi.maps:
        a, b = m.linear_part
        mus.append(b / np.conj(a))
    return FirstOrderInvariant(tuple(complex(x) for x in mus))


def _lex_less(x, y, tol):
    for s, t in zip(x, y):
        if abs(s - t) > tol:
            return s < t
    return False


def canonicalize_invariant(inv, tol=None):
    """Representative modulo a common unit factor and simultaneous conjugation.

    Rotate so that the first nonzero entry is real positive, then keep
    whichever of the tuple and its conjugate is lexicographically smaller in
    the interleaved (Re, Im) sequence.
    """
    tol = tolerance() if tol is None else tol
    mus = np.array(inv.mus, dtype=np.complex128)
    mus[np.abs(mus) <= tol] = 0
    nonzero = np.flatnonzero(mus)
    if nonzero.size:
        j = nonzero[0]
        mus = mus * np.exp(-1j * np.angle(mus[j]))
        mus[j] = abs(mus[j])
    inter = np.column_stack([mus.real, mus.imag]).ravel()
    inter_c = np.column_stack([mus.real, -mus.imag]).ravel()
    if _lex_less(inter_c, inter, tol):
        mus = np.conj(mus)
    return FirstOrderInvariant(tuple(complex(x) for x in mus), canonical=True)


def mu_double(phi):
    """|b / a| for an orientation preserving a z + b zbar + ..."""
    phi = as_diffeo(phi)
    if phi.orientation != 1:
        raise OrientationError("mu is defined for orientation preserving jets")
    a, b = phi.linear_part
    return abs(b / a)


def normalize_linear_part(phi):
    """Gauge (cz, caz) turning the 1-jet a z + b zbar into z + mu zbar, mu >= 0."""
    phi = as_diffeo(phi)
    if phi.orientation != 1:
        raise OrientationError("normalize_linear_part needs an orientation preserving jet")
    k = phi.order
    a, b = phi.linear_part
    theta = -cmath.phase(b / np.conj(a)) / 2 if b != 0 else 0.0
    c = cmath.exp(1j * theta)
    eta = GaugeTuple((Jet2.monomial(1, 0, k, c), Jet2.monomial(1, 0, k, c * a)))
    out = gauge_act(eta, GluingTuple((phi,))).maps[0]
    # clean rounding in the 1-jet so it is exactly z + mu zbar
    arr = np.array(out.coeffs)
    arr[1, 0] = 1.0
    arr[0, 1] = abs(b / a)
    return eta, DiffeoJet(Jet2(arr))


def _damping_scale(phi, target):
    """Smallest c >= 1 with every degree-d coefficient times c**(1-d) <= target."""
    c = 1.0
    for d in range(2, phi.order + 1):
        mag = phi.degree_part(d, d).max_abs()
        if mag > target:
            c = max(c, (mag / target) ** (1.0 / (d - 1)))
    return c


@dataclass(frozen=True)
class DoublePinchedNormalization:
    psi1: DiffeoJet
    psi2: DiffeoJet
    mu: float
    residual: float

    def __iter__(self):
        return iter((self.psi1, self.psi2))


def normalize_double_pinched(phi, mu_tol=MU_ZERO_TOL):
    """Liftable psi1, psi2 with psi1 o phi o psi2^{-1} = z + mu zbar at jet level.

    Off mu = 0 the remainder after linear normalization splits uniquely as
    z u + mu zbar v (monomials with a z factor go to u, pure zbar powers to v).
    Dividing u and v in the ideal (phi, conj phi) produces cofactors g and h
    with z g + mu zbar conj(g) = phi h, whence psi2 = z g and
    psi1 = z (h o phi^{-1}).
    """
    phi = as_diffeo(phi)
    k = phi.order
    mu = mu_double(phi)
    if mu <= mu_tol:
        raise MuZeroError(f"level mu=0 is non-normalizable (mu = {mu:.3g})")
    eta, phin = normalize_linear_part(phi)
    z = Jet2.z(k)
    zb = Jet2.zbar(k)
    target = z + zb * mu

    # (cz, cz) keeps the 1-jet and scales degree d by c**(1-d); shrinking the
    # nonlinear part keeps the ideal division well conditioned
    c = _damping_scale(phin, (1 - mu) * 0.1)
    if c != 1.0:
        scale = Jet2.monomial(1, 0, k, c)
        eta = GaugeTuple(tuple(compose(scale, e) for e in eta.psis))
        phin = DiffeoJet(compose(scale, compose(phin, Jet2.monomial(1, 0, k, 1 / c))))

    rem = np.array(phin.degree_part(2).coeffs)
    u_arr = np.zeros_like(rem)
    v_arr = np.zeros_like(rem)
    u_arr[:-1, :] = rem[1:, :]  # z^p zbar^q, p >= 1  ->  z^(p-1) zbar^q
    v_arr[0, :-1] = rem[0, 1:] / mu  # zbar^q  ->  zbar^(q-1) / mu
    u, v = Jet2(u_arr), Jet2(v_arr)

    u1, u2 = ideal_divide(u, phin)
    v1, v2 = ideal_divide(v, phin)
    phib = phin.conj()
    g = 1.0 + phin * v2.conj() + phib * u2
    h = 1.0 + z * (v2.conj() - u1) + zb * mu * (u2.conj() - v1)

    psi2 = z * g
    psi1 = z * compose(h, invert(phin))
    psi1 = DiffeoJet(compose(psi1, eta.psis[0]))
    psi2 = DiffeoJet(compose(psi2, eta.psis[1]))
    check = compose(psi1, compose(phi, invert(psi2)))
    residual = float(np.max(np.abs((check - target).coeffs)))
    return DoublePinchedNormalization(psi1, psi2, mu, residual)


class EquivStatus(enum.Enum):
    EQUIVALENT = "EQUIVALENT"
    NOT_EQUIVALENT = "NOT_EQUIVALENT"
    UNDECIDED_MU_ZERO = "UNDECIDED_MU_ZERO"


@dataclass(frozen=True)
class Equivalence:
    status: EquivStatus
    mu: float
    mu_other: float
    witness: GaugeTuple | None = None
    residual: float | None = None


def _growth(f):
    """max over d >= 2 of |degree-d part|^(1/(d-1)): the radius scale of f."""
    return max([f.degree_part(d, d).max_abs() ** (1.0 / (d - 1)) for d in range(2, f.order + 1)]
               + [0.0])


def _scaled(f, c):
    k = f.order
    return compose(Jet2.monomial(1, 0, k, c), compose(f, Jet2.monomial(1, 0, k, 1.0 / c)))


def _real_coeffs(jet):
    return np.concatenate([jet.coeffs.real.ravel(), jet.coeffs.imag.ravel()])


def _homological_operators(mu, k):
    """For each degree d: the liftable degree-d corrections (z B, z A) and the
    pseudo-inverse of (B, A) -> B o L - A - mu conj(A), L = z + mu zbar."""
    L = Jet2.z(k) + Jet2.zbar(k) * mu
    ops = []
    for d in range(2, k + 1):
        basis = [(p + 1, q, c) for p, q in monomials(k, d - 1, d - 1) for c in (1.0, 1j)]
        cols = [_real_coeffs(compose(Jet2.monomial(p, q, k, c), L).degree_part(d, d))
                for p, q, c in basis]
        for p, q, c in basis:
            m = Jet2.monomial(p, q, k, c)
            cols.append(_real_coeffs(-(m + m.conj() * mu)))
        ops.append((d, basis, np.linalg.pinv(np.column_stack(cols))))
    return ops


def _match_higher_terms(p, q, ops):
    """Liftable (z + ..., z + ...) carrying p to q, given equal 1-jets.

    Degree by degree the linearized equation is solved in the least-norm
    sense and the exact composite is carried forward.
    """
    k = p.order
    z = Jet2.z(k)
    P1, P2, cur = z, z, p
    for d, basis, pinv in ops:
        x = pinv @ _real_coeffs((q - cur).degree_part(d, d))
        m = len(basis)
        B = np.zeros((k + 1, k + 1), dtype=np.complex128)
        A = np.zeros_like(B)
        for (a, b, c), xb, xa in zip(basis, x[:m], x[m:]):
            B[a, b] += c * xb
            A[a, b] += c * xa
        s1, s2 = z + Jet2(B), z + Jet2(A)
        cur = compose(s1, compose(cur, invert(s2)))
        P1, P2 = compose(s1, P1), compose(s2, P2)
    return P1, P2


# real scalings (cz, cz) fix z + mu zbar; tried on top of the balancing scale
WITNESS_SCALES = (1.0, 2.0, 4.0, 8.0)


def equivalent_double_pinched(phi, phi_other, mu_tol=1e-8, zero_tol=MU_ZERO_TOL):
    """Decide whether two double-pinched gluing jets lie in one gauge orbit.

    The witness (chi1, chi2) satisfies chi1 o phi o chi2^{-1} = phi_other.
    Its linear part comes from the linear normalizations of both jets; the
    higher terms solve the homological equation degree by degree.  The
    stabilizer of z + mu zbar contains the scalings (cz, cz); c is chosen to
    balance the coefficient growth of the two normalized jets, and the
    candidate with the smallest verified residual is kept.
    """
    phi, phi_other = as_diffeo(phi), as_diffeo(phi_other)
    if phi.order != phi_other.order:
        raise OrderMismatchError(f"orders {phi.order} and {phi_other.order} differ")
    mu, mu2 = mu_double(phi), mu_double(phi_other)
    if mu <= zero_tol and mu2 <= zero_tol:
        return Equivalence(EquivStatus.UNDECIDED_MU_ZERO, mu, mu2)
    if abs(mu - mu2) > mu_tol:
        return Equivalence(EquivStatus.NOT_EQUIVALENT, mu, mu2)
    k = phi.order
    eta, p = normalize_linear_part(phi)
    eta2, q = normalize_linear_part(phi_other)
    ops = _homological_operators(mu, k)
    back1, back2 = invert(eta2.psis[0]), invert(eta2.psis[1])
    gp, gq = _growth(p), _growth(q)
    base = gp / gq if min(gp, gq) > 1e-3 else 1.0  # nothing to balance against
    best = None
    for f in WITNESS_SCALES if k > 1 else (1.0,):
        c = base * f if k > 1 else 1.0
        P1, P2 = _match_higher_terms(DiffeoJet(_scaled(p, c)), q, ops)
        S = Jet2.monomial(1, 0, k, c)
        chi1 = compose(back1, compose(P1, compose(S, eta.psis[0])))
        chi2 = compose(back2, compose(P2, compose(S, eta.psis[1])))
        witness = GaugeTuple((chi1, chi2))
        image = gauge_act(witness, GluingTuple((phi,))).maps[0]
        residual = float(np.max(np.abs((image - phi_other).coeffs)))
        if best is None or residual < best[1]:
            best = (witness, residual)
        if residual <= 1e-13 * max(1.0, phi_other.max_abs()):
            break
    return Equivalence(EquivStatus.EQUIVALENT, mu, mu2, best[0], best[1])


def conj_by_scaling(phi, c):
    """cz o phi o (z / c); the (p, q) coefficient picks up c**(1 - p - q)."""
    if not c > 0:
        raise ContractError("scaling factor must be positive")
    phi = as_diffeo(phi)
    k = phi.order
    return DiffeoJet(
        compose(Jet2.monomial(1, 0, k, c), compose(phi, Jet2.monomial(1, 0, k, 1.0 / c)))
    )


# -- real coordinates -------------------------------------------------------------


def _xy_substitutions(k):
    zx = np.zeros((k + 1, k + 1), dtype=np.complex128)
    zbx = np.zeros_like(zx)
    x_z = np.zeros_like(zx)
    y_z = np.zeros_like(zx)
    if k >= 1:
        zx[1, 0], zx[0, 1] = 1.0, 1j  # z = x + i y
        zbx[1, 0], zbx[0, 1] = 1.0, -1j
        x_z[1, 0], x_z[0, 1] = 0.5, 0.5  # x = (z + zbar) / 2
        y_z[1, 0], y_z[0, 1] = -0.5j, 0.5j  # y = (z - zbar) / 2i
    return zx, zbx, x_z, y_z


def to_xy(f):
    """Coefficients P[i, j] of x**i y**j for the same polynomial."""
    zx, zbx, _, _ = _xy_substitutions(f.order)
    return np.asarray(_accel.compose_kernel(f.coeffs, zx, zbx, f.order))


def from_xy(poly, k):
    _, _, x_z, y_z = _xy_substitutions(k)
    arr = np.asarray(poly, dtype=np.complex128)
    return Jet2(np.asarray(_accel.compose_kernel(arr, x_z, y_z, k)))


def _liftable_ext(f, k):
    """Coefficients of the liftable jet with Im = f, in extended precision."""
    zx, zbx, x_z, y_z = _xy_substitutions(k)
    poly = _accel.compose_numpy(ext_array(f), zx, zbx, k).real
    v = np.zeros_like(poly)
    u = np.zeros_like(poly)
    v[:-1, :] = poly[1:, :]
    u[0, :-1] = poly[0, 1:]
    cof = _accel.compose_numpy((u + 1j * v).astype(EXT), x_z, y_z, k)
    out = np.zeros_like(cof)
    out[1:, :] = cof[:-1, :]  # times z
    return out


def _check_imag_target(f):
    scale = tolerance() * max(1.0, f.max_abs())
    if np.max(np.abs(f.coeffs - f.conj().coeffs)) > scale:
        raise ContractError("imaginary-part target must be real valued")
    if abs(f.coeffs[0, 0]) > scale:
        raise ContractError("imaginary-part target must vanish at 0")
    if abs(f.coeffs[1, 0]) <= scale:  # df(0) = 0 for a real f
        raise DegenerateJetError("df(0) = 0: no liftable jet has this imaginary part")


def liftable_with_imag_part(f):
    """Liftable psi = z (u + i v) with Im psi = f.

    f is split as x v + y u in real coordinates: terms containing x go to v
    (so x**i y**j with i, j >= 1 lands in v), the pure y powers go to u.
    """
    _check_imag_target(f)
    return DiffeoJet(Jet2(_liftable_ext(f, f.order).astype(np.complex128)))


def symplectize_gluing(phi):
    """Same-orbit tuple with Im phi_1i(z) = Im z, plus the gauge used.

    Returns (tuple, gauge) with gauge = (z, psi_2, ..., psi_n) and
    psi_i liftable with Im psi_i = Im phi_1i.
    """
    k = phi.order
    psis, maps = [DiffeoJet(Jet2.z(k))], []
    for m in phi.maps:
        # psi^{-1} blows up when grad Im phi_1i is small, so the whole
        # construction runs in extended precision
        im = imag_part(m)
        _check_imag_target(im)
        mx = ext_array(m)
        psi = _liftable_ext((mx - np.conj(mx.T)) * (-0.5j), k)
        psis.append(DiffeoJet(Jet2(psi.astype(np.complex128))))
        maps.append(Jet2(ext_compose(mx, ext_invert(psi)).astype(np.complex128)))
    return GluingTuple(tuple(maps)), GaugeTuple(tuple(psis))


# -- orbit and stabilizer dimensions ----------------------------------------------


@dataclass(frozen=True)
class OrbitRank:
    n: int
    order: int
    orbit_dim: int
    stab_dim: int
    codim: int
    group_dim: int
    space_dim: int
    singular_values: np.ndarray = field(repr=False)
    gap: float


def _real_vec(jet):
    v = jet.to_vector(min_degree=1)
    return np.concatenate([v.real, v.imag])


def orbit_tangent_matrix(phi):
    """Differential at the identity of the orbit map LDiff_+^n -> Diff^{n-1}."""
    k, n = phi.order, phi.n
    basis = []
    for p, q in monomials(k, max_degree=k - 1):
        for c in (1.0, 1j):
            basis.append(Jet2.monomial(p + 1, q, k, c))
    block = len(_real_vec(Jet2.z(k)))
    cols = []
    # slot 1: delta o phi_1i in every component
    for delta in basis:
        cols.append(np.concatenate([_real_vec(compose(delta, m)) for m in phi.maps]))
    # slot s: -(phi_z delta + phi_zbar conj(delta)) in component s - 1
    for s, m in enumerate(phi.maps):
        pz, pzb = d_dz(m), d_dzbar(m)
        for delta in basis:
            col = np.zeros(block * len(phi.maps))
            val = -(pz * delta + pzb * delta.conj())
            col[s * block:(s + 1) * block] = _real_vec(val)
            cols.append(col)
    return np.column_stack(cols)


def orbit_tangent_rank(phi, rel_tol=RANK_TOL):
    mat = orbit_tangent_matrix(phi)
    sv = np.linalg.svd(mat, compute_uv=False)
    rank = int(np.sum(sv > rel_tol * sv[0])) if sv.size else 0
    gap = float(sv[rank - 1] / sv[rank]) if 0 < rank < sv.size and sv[rank] > 0 else np.inf
    group_dim, space_dim = mat.shape[1], mat.shape[0]
    return OrbitRank(
        n=phi.n,
        order=phi.order,
        orbit_dim=rank,
        stab_dim=group_dim - rank,
        codim=space_dim - rank,
        group_dim=group_dim,
        space_dim=space_dim,
        singular_values=sv,
        gap=gap,
    )


def generic_linear_tuple(n, k, rng=None):
    """(z + mu_i zbar) with nonzero, pairwise distinct mu_i of modulus 0.2..0.8."""
    rng = np.random.default_rng(7 if rng is None else rng)
    while True:
        r = rng.uniform(0.2, 0.8, n - 1)
        t = rng.uniform(0, 2 * np.pi, n - 1)
        mus = r * np.exp(1j * t)
        if n == 2 or np.min(np.abs(mus[:, None] - mus[None, :]) + np.eye(n - 1)) > 0.05:
            break
    z, zb = Jet2.z(k), Jet2.zbar(k)
    return GluingTuple(tuple(z + zb * m for m in mus))


def stabilizer_formula(n, k):
    if k < 2 * n - 1:
        return k * (k + 1) // 2
    return k * k + (3 - 2 * n) * k + (n - 1) * (2 * n - 3)


def codim_formula(n, k):
    if k < 2 * n - 1:
        # -k^2/2 + (2n - 5/2) k, always an integer
        return (-k * k + (4 * n - 5) * k) // 2
    return (n - 1) * (2 * n - 3)


def codim_table(n, orders, rng=None):
    """Computed (k, orbit, stab, codim) at a generic linear tuple for each k."""
    rows = []
    for k in orders:
        r = orbit_tangent_rank(generic_linear_tuple(n, k, rng))
        rows.append((k, r.orbit_dim, r.stab_dim, r.codim))
    return rows
