"""Exception hierarchy shared by all cdconf modules."""


class CdconfError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(CdconfError):
    """Operands live in Cayley-Dickson algebras of different levels."""


class DomainError(CdconfError):
    """Input lies outside the mathematical domain of the operation."""


class DivisionByZeroError(DomainError):
    """Inverse or quotient of a zero element."""


class IndexRangeError(CdconfError, IndexError):
    """Coefficient index outside 0 .. 2^r - 1."""


class EvaluationError(CdconfError):
    """A user callable produced a non-finite value; carries the point."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class NotSimilarityError(CdconfError):
    """Jacobian is not a positive multiple of an orthogonal matrix."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NonproperRotationError(CdconfError):
    """Jacobian has negative determinant (orientation reversing)."""


class QuadratureError(CdconfError):
    """Refinement did not converge; carries the last two estimates."""

    def __init__(self, message, estimates=None):
        super().__init__(message)
        self.estimates = estimates


class DegenerateLoopError(CdconfError):
    """The reference point lies on (or too close to) the curve."""


class BoundaryZeroError(CdconfError):
    """|f| fell below tolerance on a contour where zeros are forbidden."""


class PreconditionError(CdconfError):
    """A caller-asserted precondition failed; carries a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PhraseSyntaxError(CdconfError):
    """Phrase text does not conform to the grammar; carries the position."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class PhraseSemanticError(CdconfError):
    """Well-formed text violating a structural phrase rule."""


class MultiplicityError(PhraseSemanticError):
    """Operator/e-symbol multiplicity rules violated in strict mode."""


class UnsupportedPhraseError(CdconfError):
    """Phrase contains symbols the requested operation cannot handle."""


class MissingOperatorArgumentError(CdconfError):
    """Phrase contains operator slots but no slot argument was given."""


class SchemaError(CdconfError):
    """CLI request payload does not match the command schema."""
