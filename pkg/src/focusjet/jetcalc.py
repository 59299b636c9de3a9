"""Truncated power series in z and zbar.

:class:`Jet2` is the carrier for germs of plane maps, gluing maps and gauge
elements; :class:`Jet4` holds series in (u, ubar, v, vbar) for lifts through
the model fibration ``z = uv``.

Coefficients are double precision complex numbers.  Storage is a dense
(k+1, k+1) array indexed by (p, q); :func:`monomials` gives the graded
lexicographic ordering used whenever a jet is flattened into a vector.
"""

from collections import defaultdict

import numpy as np

from . import _accel
from .config import MAX_ORDER, tolerance
from .errors import DegenerateJetError, OrderMismatchError


def monomials(k, min_degree=0, max_degree=None):
    """Exponent pairs (p, q) with min_degree <= p + q <= max_degree, graded lex."""
    if max_degree is None:
        max_degree = k
    out = []
    for d in range(min_degree, max_degree + 1):
        for p in range(d, -1, -1):
            out.append((p, d - p))
    return out


def n_monomials(k):
    return (k + 1) * (k + 2) // 2


class Jet2:
    """k-jet of a function C -> C written as sum c[p, q] z**p zbar**q."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs, order=None):
        arr = np.array(coeffs, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("coefficient array must be square (k+1, k+1)")
        k = arr.shape[0] - 1
        if order is not None and order != k:
            raise ValueError(f"array shape implies order {k}, got order={order}")
        if k < 0 or k > MAX_ORDER:
            raise ValueError(f"order must lie in [0, {MAX_ORDER}], got {k}")
        bad = arr[~_accel.triangle_mask(k)]
        if np.any(bad != 0):
            raise ValueError("coefficients with p + q > order are forbidden")
        arr.flags.writeable = False
        self.order = k
        self.coeffs = arr

    # -- constructors ---------------------------------------------------------

    @classmethod
    def _wrap(cls, arr):
        # trusted internal constructor: arr already truncated
        obj = Jet2.__new__(Jet2)
        arr.flags.writeable = False
        obj.order = arr.shape[0] - 1
        obj.coeffs = arr
        return obj

    @classmethod
    def zero(cls, k):
        return cls._wrap(np.zeros((k + 1, k + 1), dtype=np.complex128))

    @classmethod
    def constant(cls, value, k):
        arr = np.zeros((k + 1, k + 1), dtype=np.complex128)
        arr[0, 0] = value
        return cls._wrap(arr)

    @classmethod
    def from_dict(cls, terms, k):
        arr = np.zeros((k + 1, k + 1), dtype=np.complex128)
        for (p, q), c in terms.items():
            if p < 0 or q < 0:
                raise ValueError(f"negative exponent in {(p, q)}")
            if p + q <= k:
                arr[p, q] += c
        return cls._wrap(arr)

    @classmethod
    def monomial(cls, p, q, k, coeff=1.0):
        return cls.from_dict({(p, q): coeff}, k)

    @classmethod
    def z(cls, k):
        return cls.monomial(1, 0, k)

    @classmethod
    def zbar(cls, k):
        return cls.monomial(0, 1, k)

    @classmethod
    def from_vector(cls, vec, k, min_degree=0):
        """Inverse of :meth:`to_vector`."""
        arr = np.zeros((k + 1, k + 1), dtype=np.complex128)
        for c, (p, q) in zip(vec, monomials(k, min_degree)):
            arr[p, q] = c
        return cls._wrap(arr)

    # -- views ----------------------------------------------------------------

    def to_vector(self, min_degree=0):
        return np.array([self.coeffs[p, q] for p, q in monomials(self.order, min_degree)])

    def terms(self):
        """Nonzero coefficients as {(p, q): c} in graded lex order."""
        return {
            (p, q): complex(self.coeffs[p, q])
            for p, q in monomials(self.order)
            if self.coeffs[p, q] != 0
        }

    def __getitem__(self, pq):
        p, q = pq
        if p + q > self.order:
            return 0j
        return complex(self.coeffs[p, q])

    @property
    def linear_part(self):
        """(a, b) with 1-jet a z + b zbar."""
        if self.order < 1:
            return 0j, 0j
        return complex(self.coeffs[1, 0]), complex(self.coeffs[0, 1])

    def max_abs(self):
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def degree_part(self, lo, hi=None):
        """Keep only the homogeneous pieces of degree lo..hi."""
        hi = self.order if hi is None else hi
        idx = np.arange(self.order + 1)
        deg = idx[:, None] + idx[None, :]
        arr = np.where((deg >= lo) & (deg <= hi), self.coeffs, 0)
        return Jet2._wrap(arr.astype(np.complex128))

    def truncate(self, k):
        if k > self.order:
            arr = np.zeros((k + 1, k + 1), dtype=np.complex128)
            arr[: self.order + 1, : self.order + 1] = self.coeffs
            return Jet2._wrap(arr)
        arr = self.coeffs[: k + 1, : k + 1].copy()
        arr[~_accel.triangle_mask(k)] = 0
        return Jet2._wrap(arr)

    def __call__(self, z):
        """Evaluate the polynomial at a complex point (scalar or array)."""
        z = np.asarray(z, dtype=np.complex128)
        zb = np.conj(z)
        out = np.zeros_like(z)
        for (p, q), c in self.terms().items():
            out = out + c * z**p * zb**q
        return out if out.ndim else complex(out)

    def real_matrix(self):
        """2x2 real matrix of the linear part acting on (x, y)."""
        a, b = self.linear_part
        return np.array(
            [[a.real + b.real, -a.imag + b.imag], [a.imag + b.imag, a.real - b.real]]
        )

    # -- arithmetic -------------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, Jet2):
            raise TypeError(f"expected Jet2, got {type(other).__name__}")
        if other.order != self.order:
            raise OrderMismatchError(f"order mismatch: {self.order} vs {other.order}")

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            return self + Jet2.constant(other, self.order)
        self._check(other)
        return Jet2._wrap(self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            return self - Jet2.constant(other, self.order)
        self._check(other)
        return Jet2._wrap(self.coeffs - other.coeffs)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Jet2._wrap(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return Jet2._wrap(self.coeffs * complex(other))
        self._check(other)
        return Jet2._wrap(_accel.mul_trunc(self.coeffs, other.coeffs, self.order))

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, scalar):
        return Jet2._wrap(self.coeffs / complex(scalar))

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = Jet2.constant(1.0, self.order)
        for _ in range(n):
            out = out * self
        return out

    def conj(self):
        return Jet2._wrap(np.conj(self.coeffs.T))

    def __eq__(self, other):
        return (
            isinstance(other, Jet2)
            and other.order == self.order
            and np.array_equal(self.coeffs, other.coeffs)
        )

    __hash__ = None

    def __repr__(self):
        parts = []
        for (p, q), c in self.terms().items():
            mono = "".join(
                s for s in (
                    "" if p == 0 else ("z" if p == 1 else f"z^{p}"),
                    "" if q == 0 else ("zb" if q == 1 else f"zb^{q}"),
                )
            ) or "1"
            parts.append(f"({c:.6g})*{mono}")
        body = " + ".join(parts) if parts else "0"
        return f"Jet2[{self.order}]({body})"


# -- named operations ------------------------------------------------------------


def add(a, b):
    return a + b


def subtract(a, b):
    return a - b


def multiply(a, b):
    return a * b


def conjugate(a):
    return a.conj()


def real_part(a):
    return (a + a.conj()) * 0.5


def imag_part(a):
    """Im f as a real-valued jet, (f - conj f) / 2i."""
    return (a - a.conj()) * (-0.5j)


def compose(f, g):
    """f(g(z), conj g(z)) truncated at the common order."""
    f._check(g)
    if g.coeffs[0, 0] != 0:
        raise DegenerateJetError("inner jet of a composition must vanish at 0")
    k = f.order
    out = _accel.compose_kernel(f.coeffs, g.coeffs, np.conj(g.coeffs.T).copy(), k)
    return Jet2._wrap(np.asarray(out))


def d_dz(f):
    """Wirtinger derivative d/dz; result padded back to order k."""
    k = f.order
    arr = np.zeros((k + 1, k + 1), dtype=np.complex128)
    p = np.arange(1, k + 1)
    arr[:-1, :] = f.coeffs[1:, :] * p[:, None]
    return Jet2._wrap(arr)


def d_dzbar(f):
    k = f.order
    arr = np.zeros((k + 1, k + 1), dtype=np.complex128)
    q = np.arange(1, k + 1)
    arr[:, :-1] = f.coeffs[:, 1:] * q[None, :]
    return Jet2._wrap(arr)


def scale_tol(*jets):
    """Absolute tolerance after normalizing by the largest input coefficient."""
    ref = max([1.0] + [j.max_abs() for j in jets])
    return tolerance() * ref


def allclose(a, b, tol=None):
    a._check(b)
    if tol is None:
        tol = scale_tol(a, b)
    return float(np.max(np.abs(a.coeffs - b.coeffs))) <= tol


def linear_inverse(a, b):
    """Coefficients (A, B) of the inverse of w = a z + b zbar."""
    det = abs(a) ** 2 - abs(b) ** 2
    return np.conj(a) / det, -b / det


def invert(f):
    """Two-sided compositional inverse up to order k.

    The linear part is inverted in closed form; each pass of the fixed point
    g <- L^{-1}(z - N(g)) fixes one more degree, N being the nonlinear part.
    """
    k = f.order
    if f.coeffs[0, 0] != 0:
        raise DegenerateJetError("jet to invert must vanish at 0")
    a, b = f.linear_part
    scale = max(abs(a), abs(b))
    if scale == 0 or abs(abs(a) - abs(b)) <= tolerance() * scale:
        raise DegenerateJetError(f"degenerate linear part: |a|={abs(a):.3g}, |b|={abs(b):.3g}")
    A, B = linear_inverse(a, b)
    z = Jet2.z(k)
    nonlinear = f.degree_part(2)
    g = Jet2.from_dict({(1, 0): A, (0, 1): B}, k)
    for _ in range(k - 1):
        w = z - compose(nonlinear, g)
        g = w * A + w.conj() * B
    return g


# -- extended precision ------------------------------------------------------------
# Used to verify identities whose float64 evaluation would drown in rounding,
# e.g. recompositions with witnesses whose coefficients reach 1e6 and more.

EXT = np.clongdouble


def ext_array(f):
    return np.asarray(f.coeffs if isinstance(f, Jet2) else f).astype(EXT)


def ext_compose(f, g):
    """compose() in extended precision on raw coefficient arrays."""
    f, g = ext_array(f), ext_array(g)
    k = f.shape[0] - 1
    return _accel.compose_numpy(f, g, np.conj(g.T).copy(), k)


def ext_invert(f):
    """invert() in extended precision on a raw coefficient array."""
    f = ext_array(f)
    k = f.shape[0] - 1
    a, b = f[1, 0], f[0, 1]
    det = abs(a) ** 2 - abs(b) ** 2
    A, B = np.conj(a) / det, -b / det
    nonlinear = f.copy()
    nonlinear[1, 0] = nonlinear[0, 1] = 0
    z = np.zeros_like(f)
    z[1, 0] = 1
    g = np.zeros_like(f)
    g[1, 0], g[0, 1] = A, B
    for _ in range(k - 1):
        w = z - ext_compose(nonlinear, g)
        g = w * A + np.conj(w.T) * B
    return g


def ideal_divide(w, phi):
    """Find u1, u2 with phi*u1 + conj(phi)*u2 = w up to order k.

    The map (u1, u2) -> phi u1 + conj(phi) u2 is complex linear, so the
    minimum norm complex least squares solution is also the minimum norm
    solution over the real coefficient vectors.  Degree-k coefficients of
    u1, u2 cannot reach order <= k and are left at zero.
    """
    phi._check(w)
    k = w.order
    if abs(w.coeffs[0, 0]) > scale_tol(w):
        raise DegenerateJetError("ideal_divide needs w(0) = 0")
    if k == 0:
        return Jet2.zero(0), Jet2.zero(0)
    rows = monomials(k)
    unknowns = monomials(k, max_degree=k - 1)
    row_index = {pq: i for i, pq in enumerate(rows)}
    phibar = phi.conj()
    mat = np.zeros((len(rows), 2 * len(unknowns)), dtype=np.complex128)
    for col, (p, q) in enumerate(unknowns):
        for block, base in ((0, phi), (1, phibar)):
            c = col + block * len(unknowns)
            for (i, j), val in base.terms().items():
                if i + j + p + q <= k:
                    mat[row_index[(i + p, j + q)], c] += val
    rhs = w.to_vector()
    sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    n = len(unknowns)
    u1 = Jet2.from_vector(np.concatenate([sol[:n], np.zeros(k + 1)]), k)
    u2 = Jet2.from_vector(np.concatenate([sol[n:], np.zeros(k + 1)]), k)
    resid = phi * u1 + phibar * u2 - w
    if resid.max_abs() > scale_tol(w, phi) * 10:
        raise DegenerateJetError(
            f"ideal division residual {resid.max_abs():.3g} above tolerance"
        )
    return u1, u2


def substitute_uv(f):
    """f(uv, ubar vbar) as a Jet4 of order 2k."""
    terms = {(p, q, p, q): c for (p, q), c in f.terms().items()}
    return Jet4(terms, 2 * f.order)


class Jet4:
    """Truncated series in u, ubar, v, vbar with sparse storage.

    Keys (a, b, c, d) stand for u**a ubar**b v**c vbar**d.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, terms, order):
        clean = {}
        for key, val in terms.items():
            if len(key) != 4 or min(key) < 0:
                raise ValueError(f"bad Jet4 index {key}")
            if sum(key) <= order and val != 0:
                clean[tuple(int(x) for x in key)] = complex(val)
        self.order = order
        self.coeffs = clean

    @classmethod
    def variable(cls, name, order):
        key = {"u": (1, 0, 0, 0), "ubar": (0, 1, 0, 0), "v": (0, 0, 1, 0), "vbar": (0, 0, 0, 1)}
        return cls({key[name]: 1.0}, order)

    def __add__(self, other):
        out = defaultdict(complex, self.coeffs)
        for key, val in other.coeffs.items():
            out[key] += val
        return Jet4(out, min(self.order, other.order))

    def __neg__(self):
        return Jet4({key: -val for key, val in self.coeffs.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return Jet4({key: val * other for key, val in self.coeffs.items()}, self.order)
        order = min(self.order, other.order)
        out = defaultdict(complex)
        for k1, v1 in self.coeffs.items():
            s1 = sum(k1)
            for k2, v2 in other.coeffs.items():
                if s1 + sum(k2) <= order:
                    out[tuple(x + y for x, y in zip(k1, k2))] += v1 * v2
        return Jet4(out, order)

    __rmul__ = __mul__

    def max_abs(self):
        return max((abs(v) for v in self.coeffs.values()), default=0.0)

    def __repr__(self):
        return f"Jet4[{self.order}]({len(self.coeffs)} terms)"
