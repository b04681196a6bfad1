"""Exception types raised by the solvers."""


class OmitError(Exception):
    """Base class for all omitlab failures."""


class NoRealRoot(OmitError):
    """The steady-state cubic returned no real root (solver fault)."""


class SingularPoint(OmitError):
    """A denominator in the model vanishes identically at this point."""


class DegenerateDenominator(OmitError):
    """A response denominator is numerically zero."""


class BalancePole(OmitError):
    """The near-EP approximation is evaluated at exact gain-loss balance."""


class Diverged(OmitError):
    """A time-domain trajectory grew without bound."""


class WindowTooShort(OmitError):
    """Not enough beat periods left for demodulation."""
