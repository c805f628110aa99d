"""Exception hierarchy shared by all modules."""


class SelfAffineError(Exception):
    """Base class for domain errors raised by this package."""


class InvalidParams(SelfAffineError, ValueError):
    pass


class NotApplicable(SelfAffineError, ValueError):
    pass


class CollinearSource(SelfAffineError, ValueError):
    pass


class SingularMap(SelfAffineError, ValueError):
    pass


class DegenerateQuadrangle(SelfAffineError, ValueError):
    pass


class DegenerateDiagonals(SelfAffineError, ValueError):
    pass


class ConvergenceFailure(SelfAffineError, RuntimeError):
    pass


class NotThreePieces(SelfAffineError, ValueError):
    pass


class TypeMismatch(SelfAffineError, ValueError):
    pass


class InvalidWeights(SelfAffineError, ValueError):
    pass


class ParallelogramExcluded(SelfAffineError, ValueError):
    pass


class VerificationFailure(SelfAffineError, RuntimeError):
    pass


class UnverifiedDissection(SelfAffineError, ValueError):
    pass


class MissingCatalogue(SelfAffineError, LookupError):
    pass
