"""Exception hierarchy shared by every module."""


class SSHError(Exception):
    """Base class for all package errors."""


class ParameterError(SSHError, ValueError):
    """An argument or model parameter violates its documented invariant."""


class ContractError(SSHError, ValueError):
    """A function was called outside its contract (wrong mode, zero norm, ...)."""


class UnsupportedParameterError(ParameterError):
    """A closed-form result was requested for parameters it does not cover."""


class DegenerateSpectrumError(SSHError, ArithmeticError):
    """The bulk gap is closed, so a topological invariant is undefined."""


class MissingDefectError(ParameterError):
    """An excitation label (I/II/III) was used on a chain without a defect."""


class InsufficientDataError(SSHError, ValueError):
    """Too few usable samples to perform a fit."""


class NumericalError(SSHError, ArithmeticError):
    """A numerical check (eigensolver residual, unitarity) failed."""


class ConfigError(SSHError, ValueError):
    """A configuration document is malformed or semantically invalid."""
