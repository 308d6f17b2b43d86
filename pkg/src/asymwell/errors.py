"""Exception hierarchy for asymwell.

Construction and shape problems mean the potential cannot be used at all;
domain/range errors mean a particular evaluation was requested outside the
supported region; the solver errors signal physics (near-degeneracy broken,
localized states) rather than bugs.
"""


class AsymwellError(Exception):
    """Base class for all asymwell errors."""


class ConstructionError(AsymwellError):
    """Potential construction failed (invalid or degenerate parameters)."""


class ShapeError(ConstructionError):
    """Potential does not have exactly two interior minima."""


class DomainError(AsymwellError):
    """Input outside the mathematical domain of an operation."""


class NoBarrierError(DomainError):
    """Energy at or above the barrier top: no classically forbidden region."""


class RangeError(AsymwellError):
    """Argument outside the supported numerical envelope."""


class SingularInputError(AsymwellError):
    """Evaluation at a pole of the quantization machinery (half-integer index)."""


class NearDegeneracyError(AsymwellError):
    """Level pair too far from degeneracy for the two-level pair solver."""


class DegeneracyStructureError(AsymwellError):
    """Fewer than two quantization roots in the search window; the state is
    localized and non-degenerate rather than a tunneling pair."""


class ValidityError(AsymwellError):
    """Evaluation point outside the validity region of an approximation."""


class CoverageError(AsymwellError):
    """Grid does not cover the requested states adequately."""


class ConfigError(AsymwellError):
    """Invalid run configuration."""
