"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 4, SolverError -> 3,
InvariantViolation -> 2.
"""


class HeleShawError(Exception):
    """Base class for package errors."""


class ConfigError(HeleShawError):
    """Invalid configuration or operation preconditions."""


class SolverError(HeleShawError):
    """Iterative solver failed to reach its tolerance."""


class InvariantViolation(HeleShawError):
    """A run produced data violating a structural invariant (e.g. the
    positivity set touched the truncation box, or monotonicity failed)."""
