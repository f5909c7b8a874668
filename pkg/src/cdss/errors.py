"""Exception hierarchy shared by all cdss modules."""


class CdssError(Exception):
    """Base class for every error raised by this package."""


class NonPrimitivePolynomialError(CdssError):
    """The reduction polynomial does not generate the full multiplicative group."""


class SingularMatrixError(CdssError):
    """Inversion or solving was attempted on a rank-deficient square matrix."""


class FieldTooSmallError(CdssError):
    """The field order is insufficient for the requested construction."""


class NotSuperRegularError(CdssError):
    """A supplied encoding matrix has at least one singular square submatrix."""


class NotDivisibleError(CdssError):
    """Construction requires the per-cluster node count to divide k."""


class DivisibleError(CdssError):
    """Construction requires the per-cluster node count to NOT divide k."""


class DistanceVerificationError(CdssError):
    """Build-time check found a k-node subset that cannot recover the message."""


class LengthMismatchError(CdssError):
    """Message length is not a multiple of the per-stripe message size."""


class WrongHelperSetError(CdssError):
    """Repair was given contents from the wrong set of helper nodes."""


class IncompletePlanError(CdssError):
    """A repair plan or its helper data is missing required symbols."""


class RankDeficientError(CdssError):
    """A decode system unexpectedly lost rank; indicates a broken code instance."""


class DegenerateConfigError(CdssError):
    """System parameters degenerate (e.g. n = k) and admit no code."""


class IdentityViolationError(CdssError):
    """An algebraic identity that must hold exactly failed to verify."""


class IncompatibleScenarioError(CdssError):
    """Scenario parameters do not match the requested code construction."""


class UnsupportedDataWidthError(CdssError):
    """Byte packing only supports symbol widths 4, 8 and 16."""
