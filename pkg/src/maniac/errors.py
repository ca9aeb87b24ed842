"""Exception types shared across the package."""


class ManiacError(Exception):
    pass


class FieldError(ManiacError):
    pass


class InversionOfZero(FieldError, ZeroDivisionError):
    pass


class LevelMismatch(FieldError):
    pass


class ColsNotDivisible(FieldError):
    pass


class BaseLevelHasNoUnfold(FieldError):
    pass


class ShapeMismatch(ManiacError, ValueError):
    pass


class NoSolution(ManiacError):
    pass


class Underdetermined(ManiacError):
    pass


class ParametersExceedFieldDegree(ManiacError, ValueError):
    pass


class AmbientMismatch(ManiacError, ValueError):
    pass


class MalformedInput(ManiacError, ValueError):
    pass


class DecodeFailure(ManiacError):
    """Decoding did not produce a trustworthy message.

    ``stage`` names where it happened (e.g. ``"gabidulin"``, ``"stage1:s=2"``)
    and ``event`` carries the failure class used in trial accounting.
    """

    def __init__(self, message: str = "", *, stage: str | None = None, event: str | None = None):
        super().__init__(message)
        self.stage = stage
        self.event = event


class RateRegionViolation(ManiacError):
    def __init__(self, violations):
        self.violations = list(violations)
        names = ", ".join("{" + ",".join(f"S{i + 1}" for i in row.subset) + "}" for row in self.violations)
        super().__init__(f"rate tuple outside the capacity region on subsets: {names}")


class TooManySources(ManiacError, ValueError):
    pass


class EnumerationCapExceeded(ManiacError):
    pass


class ConfigInvalid(ManiacError, ValueError):
    pass
