"""Exception hierarchy shared by every module."""


class MetasplitError(Exception):
    """Base class. ``exit_code`` is what the CLI returns when one escapes."""

    exit_code = 2


class InsufficientPrecision(MetasplitError, ArithmeticError):
    pass


class DivisionByZero(MetasplitError, ZeroDivisionError):
    pass


class NotAUnit(MetasplitError, ValueError):
    pass


class OddResidueOnly(MetasplitError, ValueError):
    pass


class SearchBudgetExceeded(MetasplitError, RuntimeError):
    def __init__(self, depth, nodes):
        super().__init__(f"conic search gave up at depth {depth} after {nodes} nodes")
        self.depth = depth
        self.nodes = nodes


class EntryNotInBaseField(MetasplitError, ValueError):
    pass


class CertificationFailed(MetasplitError, AssertionError):
    exit_code = 1

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotInvertible(MetasplitError, ZeroDivisionError):
    pass


class ExtensionMismatch(MetasplitError, ValueError):
    pass


class NoEmbedding(MetasplitError, ValueError):
    pass


class NoInvertibleSolution(MetasplitError, ArithmeticError):
    pass


class SystemInconsistent(MetasplitError, ArithmeticError):
    pass


class SamplingBudgetExceeded(MetasplitError, RuntimeError):
    pass


class ActionOrderMismatch(MetasplitError, ValueError):
    pass


class SizeLimitExceeded(MetasplitError, ValueError):
    pass


class UnknownSuite(MetasplitError, KeyError):
    pass


class ConfigOutOfRange(MetasplitError, ValueError):
    pass
