"""Jet-level invariants of focus-focus singularities.

Submodules: ``jetcalc`` (truncated series in z, zbar), ``germs`` (liftability),
``moduli`` (gauge action and invariants), ``geomlin`` (complex structures on the
base), ``fibrlab`` (numerical moment maps) and ``cli``.
"""

from .errors import (
    ContractError,
    DegenerateJetError,
    FocusJetError,
    NotFocusError,
    NotLiftableError,
    ParseError,
)
from .geomlin import ComplexStructure2, eigen_mu, hessian_to_j, trace_invariant
from .germs import DiffeoJet, classify_liftable, lift_to_model, verify_lift
from .jetcalc import Jet2, Jet4, compose, invert
from .moduli import (
    GaugeTuple,
    GluingTuple,
    canonicalize_invariant,
    equivalent_double_pinched,
    first_order_invariants,
    gauge_act,
    mu_double,
    normalize_double_pinched,
    symplectize_gluing,
)

__version__ = "0.1.0"
