"""Exception hierarchy shared across the package."""


class EfsError(Exception):
    """Base class for all errors raised by this package."""


class SingularityError(EfsError):
    """A potential evaluation hit the unregularized singularity at zero separation."""


class InstabilityError(EfsError):
    """An iterative solve produced non-finite iterates (step size too large)."""


class DegenerateEnclosureError(EfsError):
    """All points coincide; no enclosing sphere can be estimated."""


class FormatError(EfsError):
    """A persisted file is malformed or inconsistent."""
