"""Diffeomorphism jets, the liftable subgroup, and lifts through z = uv.

A jet is liftable exactly when its series is divisible by z or by zbar; the
lift is then written down explicitly and checked by comparing Psi_1 * Psi_2
with psi(uv, ubar vbar).
"""

import enum
from dataclasses import dataclass

import numpy as np

from .config import tolerance
from .errors import DegenerateJetError, NotLiftableError
from .jetcalc import Jet2, Jet4, substitute_uv


class DiffeoJet(Jet2):
    """An invertible k-jet vanishing at 0, a z + b zbar + h.o.t. with |a| != |b|."""

    __slots__ = ()

    def __init__(self, jet, order=None):
        if isinstance(jet, Jet2):
            super().__init__(jet.coeffs)
        else:
            super().__init__(jet, order)
        if self.order < 1:
            raise DegenerateJetError("a diffeomorphism jet needs order >= 1")
        scale = max(self.max_abs(), 1.0)
        if abs(self.coeffs[0, 0]) > tolerance() * scale:
            raise DegenerateJetError("diffeomorphism jet must vanish at 0")
        a, b = self.linear_part
        lin = max(abs(a), abs(b))
        if lin == 0 or abs(abs(a) - abs(b)) <= tolerance() * lin:
            raise DegenerateJetError(
                f"linear part not invertible: |a|={abs(a):.3g}, |b|={abs(b):.3g}"
            )

    @property
    def a(self):
        return self.linear_part[0]

    @property
    def b(self):
        return self.linear_part[1]

    @property
    def orientation(self):
        """+1 when orientation preserving (|a| > |b|), -1 otherwise."""
        a, b = self.linear_part
        return 1 if abs(a) > abs(b) else -1


def as_diffeo(jet):
    return jet if isinstance(jet, DiffeoJet) else DiffeoJet(jet)


class LiftKind(enum.Enum):
    DIVISIBLE_BY_Z = "DIVISIBLE_BY_Z"
    DIVISIBLE_BY_ZBAR = "DIVISIBLE_BY_ZBAR"
    NOT_LIFTABLE = "NOT_LIFTABLE"


@dataclass(frozen=True)
class LiftClass:
    kind: LiftKind
    cofactor: Jet2 | None = None
    ambiguous: bool = False

    @property
    def liftable(self):
        return self.kind is not LiftKind.NOT_LIFTABLE


def classify_liftable(psi, tol=None):
    """Decide divisibility by z or zbar and return the cofactor h (order k-1).

    A coefficient counts as zero below tol times the largest coefficient.
    When both patterns hold the z class is reported with ``ambiguous=True``.
    """
    psi = as_diffeo(psi)
    k = psi.order
    c = psi.coeffs
    thresh = (tolerance() if tol is None else tol) * psi.max_abs()
    pure_zbar = np.abs(c[0, 1:]) <= thresh  # (0, q), q >= 1
    pure_z = np.abs(c[1:, 0]) <= thresh  # (p, 0), p >= 1
    by_z = bool(np.all(pure_zbar))
    by_zbar = bool(np.all(pure_z))
    if by_z:
        # h[p - 1, q] = psi[p, q]
        h = np.zeros((k, k), dtype=np.complex128)
        h[:, :] = c[1:, :k]
        return LiftClass(LiftKind.DIVISIBLE_BY_Z, Jet2(h), ambiguous=by_zbar)
    if by_zbar:
        h = np.zeros((k, k), dtype=np.complex128)
        h[:, :] = c[:k, 1:]
        return LiftClass(LiftKind.DIVISIBLE_BY_ZBAR, Jet2(h))
    return LiftClass(LiftKind.NOT_LIFTABLE)


def is_liftable(psi):
    return classify_liftable(psi).liftable


def lift_to_model(psi):
    """Explicit lift (Psi_1, Psi_2) of a liftable jet, each a Jet4 of order 2k.

    psi = z h      ->  Psi(u, v) = (u, v h(uv, ubar vbar))
    psi = zbar h   ->  Psi(u, v) = (ubar, vbar h(uv, ubar vbar))

    The second form is the first one for z -> psi(zbar) precomposed with the
    lift (ubar, vbar) of complex conjugation.
    """
    psi = as_diffeo(psi)
    cls = classify_liftable(psi)
    if not cls.liftable:
        raise NotLiftableError("jet is divisible neither by z nor by zbar")
    order = 2 * psi.order
    h_uv = substitute_uv(cls.cofactor)
    h_uv = Jet4(h_uv.coeffs, order)
    if cls.kind is LiftKind.DIVISIBLE_BY_Z:
        first, second = Jet4.variable("u", order), Jet4.variable("v", order)
    else:
        first, second = Jet4.variable("ubar", order), Jet4.variable("vbar", order)
    return first, second * h_uv


def verify_lift(psi, lift):
    """sup-norm of Psi_1 * Psi_2 - psi(uv, ubar vbar) over Jet4 coefficients."""
    psi = as_diffeo(psi)
    first, second = lift
    order = 2 * psi.order
    lhs = Jet4(first.coeffs, order) * Jet4(second.coeffs, order)
    rhs = substitute_uv(psi)
    return (lhs - rhs).max_abs()
