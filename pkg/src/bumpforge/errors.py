"""Exception hierarchy.

Every error raised by the toolkit derives from :class:`BumpforgeError` and
carries a short machine-readable ``code`` (the class name) plus an optional
``witness`` payload so that failures can be re-evaluated.
"""


class BumpforgeError(Exception):
    stage = None

    def __init__(self, message="", witness=None, **info):
        super().__init__(message)
        self.witness = witness
        self.info = info

    @property
    def code(self):
        return type(self).__name__

    def to_dict(self):
        out = {"error": self.code, "message": str(self)}
        if self.stage:
            out["stage"] = self.stage
        if self.witness is not None:
            out["witness"] = self.witness
        return out


# input / parsing
class ParseError(BumpforgeError):
    def __init__(self, message, position=None, **kw):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message, **kw)
        self.position = position


class NonPolynomialModulus(ParseError):
    pass


class SchemaError(BumpforgeError):
    pass


# polyalg
class NoCandidate(BumpforgeError):
    pass


class NotWeightedHomogeneous(BumpforgeError):
    pass


class NonLatticeMonomial(BumpforgeError):
    pass


# levi / sampling
class RegionEmpty(BumpforgeError):
    pass


# exceptional
class InfiniteType(BumpforgeError):
    pass


# fsbump
class NotSubharmonic(BumpforgeError):
    pass


class Harmonic(BumpforgeError):
    pass


class SearchFailed(BumpforgeError):
    pass


# conebump
class EmptyBlock(BumpforgeError):
    pass


class NotFactorable(BumpforgeError):
    pass


class ShellVerificationFailed(BumpforgeError):
    pass


class NotStrictlyPsh(BumpforgeError):
    pass


# assembler
class NoPositiveDelta(BumpforgeError):
    pass


class DeltaTooLarge(BumpforgeError):
    pass


class StrictPshFailed(BumpforgeError):
    pass


class NoPositiveRadius(BumpforgeError):
    pass


class NotSubharmonicNonHarmonic(BumpforgeError):
    pass


# pipeline
class PluriharmonicInP(BumpforgeError):
    pass


class QWeightTooLow(BumpforgeError):
    pass


class NotPsh(BumpforgeError):
    pass


class NotApplicable(BumpforgeError):
    pass


class NotDeckInvariant(BumpforgeError):
    pass


class NoAdmissibleK(BumpforgeError):
    pass


class SliceOutsideBall(BumpforgeError):
    pass
