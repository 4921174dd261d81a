"""Exception hierarchy shared by every module of the package."""


class QPError(Exception):
    """Base class for all errors raised by qpmutation."""


# linear algebra
class ContainmentViolation(QPError):
    pass


class NotWellDefined(QPError):
    pass


# quivers
class UnknownVertex(QPError):
    pass


class UnknownArrow(QPError):
    pass


class LoopPresent(QPError):
    pass


class TwoCycleAtK(QPError):
    pass


class NotTwoCycle(QPError):
    pass


class OverlappingPairs(QPError):
    pass


# potentials and QPs
class NotACycle(QPError):
    pass


class ArrowsNotComposableAtK(QPError):
    pass


class DegreeOverflow(QPError):
    pass


class QuiverMismatch(QPError):
    pass


class NotSplittable(QPError):
    pass


class DegenerateQuadraticPart(QPError):
    pass


# representations
class RelationViolated(QPError):
    def __init__(self, arrow, witness, message=None):
        self.arrow = arrow
        self.witness = witness
        super().__init__(message or f"relation d_{arrow}(S) violated at entry {witness}")


class NotNilpotent(QPError):
    pass


class QpMismatch(QPError):
    pass


class Inconclusive(QPError):
    pass


class PreconditionViolated(QPError):
    pass


class NotAMorphism(QPError):
    pass


class GenerationExhausted(QPError):
    pass
