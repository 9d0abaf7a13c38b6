"""Exception types shared across the package."""


class PtMarkError(Exception):
    """Base class for package-specific failures."""


class ConfigError(PtMarkError, ValueError):
    """Invalid configuration or parameter values."""


class NumericalError(PtMarkError, RuntimeError):
    """A numerical routine failed to converge or produced non-finite values."""


class DegenerateSpectrumError(PtMarkError, ValueError):
    """Spectrum variance is zero; no verification decision is possible."""
