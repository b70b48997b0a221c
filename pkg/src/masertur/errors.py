"""Exception taxonomy shared by all modules.

DomainError marks parameter combinations where a requested quantity is
mathematically undefined (empty baths, equal bath occupations, drive off).
NumericalError marks failures of the numerical machinery itself (rank
deficiency, ambiguous eigenvalue branches, non-real residues). The CLI maps
them to distinct exit codes.
"""


class MaserturError(Exception):
    """Base class for all package-specific errors."""


class DomainError(MaserturError, ValueError):
    """A quantity is undefined for the given physical parameters."""


class NumericalError(MaserturError, RuntimeError):
    """A numerical routine could not produce a trustworthy result."""


class ConfigError(MaserturError, ValueError):
    """Invalid or inconsistent run configuration."""
