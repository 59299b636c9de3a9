"""Exception hierarchy.

Every error carries a short machine code; the CLI prints it as
``ERR <code>: <message>`` and maps the class to an exit status.
"""


class FocusJetError(Exception):
    code = "error"
    exit_status = 2


class ContractError(FocusJetError):
    """A precondition of an operation was violated."""

    code = "contract"


class OrderMismatchError(ContractError):
    code = "order_mismatch"


class DegenerateJetError(ContractError):
    code = "degenerate"


class NotLiftableError(ContractError):
    code = "not_liftable"


class OrientationError(ContractError):
    code = "orientation"


class MuZeroError(ContractError):
    code = "mu_zero"


class NotFocusError(ContractError):
    code = "not_focus"


class NotCriticalError(ContractError):
    code = "not_critical"


class RankError(ContractError):
    code = "rank"


class ParseError(FocusJetError):
    code = "parse"
    exit_status = 4
