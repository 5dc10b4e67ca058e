"""Exception hierarchy shared by every hexaug module.

The command-line layer maps any :class:`HexaugError` to exit code 1 with a
one-line diagnostic, so each error class here corresponds to a documented,
user-reportable failure mode.
"""


class HexaugError(Exception):
    """Base class for all errors raised by hexaug."""


class FormatError(HexaugError):
    """A file or input does not conform to its declared format."""


class CorruptionError(FormatError):
    """A container parsed but its payload is truncated or inconsistent."""


class ValidationError(HexaugError):
    """Data violates an invariant (bad label, non-finite value, empty set)."""


class CapacityError(HexaugError):
    """A class has too few examples for the requested operation."""


class PlanError(HexaugError):
    """An augmentation plan is infeasible for the given dataset."""


class StatsError(HexaugError):
    """Per-class statistics cannot be computed (e.g. an empty class)."""


class ShapeError(HexaugError):
    """Array dimensions disagree with the model or dataset."""


class TrainingError(HexaugError):
    """Optimization diverged or produced non-finite parameters."""
