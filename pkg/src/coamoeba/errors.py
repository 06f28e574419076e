"""Exception types raised across the package."""


class CoamoebaError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateSupport(CoamoebaError):
    pass


class ZeroVector(CoamoebaError):
    pass


class NotAFace(CoamoebaError):
    pass


class NotAFacet(NotAFace):
    pass


class IllConditioned(CoamoebaError):
    pass


class OffsetCountMismatch(CoamoebaError):
    pass


class NonSimpleArrangement(CoamoebaError):
    """Coincident curves, tangencies or triple points.

    ``curves`` holds the indices of the offending curves when known.
    """

    def __init__(self, message, curves=()):
        super().__init__(message)
        self.curves = tuple(curves)


class InconsistentCrossing(CoamoebaError):
    pass


class UncalibratedIndex(CoamoebaError):
    pass


class AmbiguousCalibration(CoamoebaError):
    def __init__(self, message, evidence=None):
        super().__init__(message)
        self.evidence = evidence or {}


class NotAYangBaxterSite(CoamoebaError):
    pass


class NotDimerizable(CoamoebaError):
    pass


class NotBipartite(CoamoebaError):
    pass


class NoValidSignAssignment(CoamoebaError):
    def __init__(self, message, faces=()):
        super().__init__(message)
        self.faces = list(faces)


class ZeroDeterminant(CoamoebaError):
    pass


class BudgetExceeded(CoamoebaError):
    pass


class DegenerateSystem(CoamoebaError):
    def __init__(self, message, translation=None):
        super().__init__(message)
        self.translation = translation
