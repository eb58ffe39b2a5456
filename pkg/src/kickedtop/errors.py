"""Exception types shared across the package."""


class NumericsError(RuntimeError):
    """A numerical invariant was violated badly enough to indicate a bug,
    not rounding (e.g. eigenvalue below -1e-10, norm drift, QFI ratio > 1)."""


class ConfigError(ValueError):
    """Invalid experiment configuration (unknown key, bad value, bad range)."""
