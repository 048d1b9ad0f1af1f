"""Exception types. Every error carries a stable ``code`` used by the CLI."""


class AlgebraError(Exception):
    code = "ALGEBRA_ERROR"

    def __init__(self, message: str = "", code: str | None = None):
        if code is not None:
            self.code = code
        super().__init__(message or self.code)


class MixedRings(AlgebraError):
    code = "MIXED_RINGS"


class ShapeError(AlgebraError):
    code = "SHAPE_ERROR"


class NoSolution(AlgebraError):
    code = "NO_SOLUTION"


class NotASummand(AlgebraError):
    code = "NOT_A_SUMMAND"


class NoFactorization(AlgebraError):
    code = "NO_FACTORIZATION"


class NotSurjective(AlgebraError):
    code = "NOT_SURJECTIVE"


class NotInjective(AlgebraError):
    code = "NOT_INJECTIVE"


class BadCover(AlgebraError):
    code = "BAD_COVER"


class NotOrthosymmetric(AlgebraError):
    code = "NOT_ORTHOSYMMETRIC"


class NotADecomposition(AlgebraError):
    code = "NOT_A_DECOMPOSITION"


class FlagMismatch(AlgebraError):
    code = "FLAG_MISMATCH"


class DegenerateGram(AlgebraError):
    code = "DEGENERATE_GRAM"


class IsotropicInput(AlgebraError):
    code = "ISOTROPIC_INPUT"


class NotIsotropic(AlgebraError):
    code = "NOT_ISOTROPIC"


class DegenerateForm(AlgebraError):
    code = "DEGENERATE_FORM"


class NoUnitPartner(AlgebraError):
    code = "NO_UNIT_PARTNER"


class DisconnectedSpace(AlgebraError):
    code = "DISCONNECTED_SPACE"


class TheoremViolation(AlgebraError):
    """A checked identity failed. Over exact arithmetic this is a library bug."""

    code = "THEOREM_VIOLATION"
