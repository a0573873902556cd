"""Exception hierarchy shared by every stabkit module."""

from __future__ import annotations


class StabkitError(Exception):
    """Root of all stabkit failures."""


# GF(2) / rational linear algebra
class SingularMatrix(StabkitError, ValueError):
    pass


class RankDeficient(StabkitError, ValueError):
    pass


class Inconsistent(StabkitError, ValueError):
    pass


class SingularSystem(StabkitError, ValueError):
    pass


# Pauli operators and codes
class OddLength(StabkitError, ValueError):
    pass


class LengthMismatch(StabkitError, ValueError):
    pass


class NotAbelian(StabkitError, ValueError):
    pass


class DependentGenerators(StabkitError, ValueError):
    pass


# Channels, limits and inputs
class OutOfRange(StabkitError, ValueError):
    pass


class TooLarge(StabkitError):
    """An exhaustive enumeration would exceed the configured limit."""


class FormatError(StabkitError, ValueError):
    pass


class ConfigError(StabkitError, ValueError):
    pass


# Reduction pipeline
class OracleError(StabkitError):
    pass


class NoCrossing(StabkitError):
    pass


class Exhausted(StabkitError):
    pass


class RoundingAmbiguous(StabkitError):
    pass


class PostCheckFailed(StabkitError):
    pass
