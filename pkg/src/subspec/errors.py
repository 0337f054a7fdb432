"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: RuleError -> 1, PreconditionError -> 2,
NumericalError -> 3.
"""


class SubspecError(Exception):
    pass


class RuleError(SubspecError):
    """Malformed rule source or structurally invalid substitution."""


class PreconditionError(SubspecError):
    """An operation was called outside its domain (e.g. non-primitive input)."""


class NumericalError(SubspecError):
    """A numerical procedure failed to reach its required accuracy."""
