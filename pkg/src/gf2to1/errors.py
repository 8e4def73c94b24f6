"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class GF2to1Error(Exception):
    """Base class for all errors raised by gf2to1."""


class DegreeOutOfRange(GF2to1Error, ValueError):
    pass


class ReducibleModulus(GF2to1Error, ValueError):
    pass


class DivisionByZero(GF2to1Error, ZeroDivisionError):
    pass


class NotADivisor(GF2to1Error, ValueError):
    pass


class NotInvertible(GF2to1Error, ValueError):
    pass


class DegreeTooLow(GF2to1Error, ValueError):
    pass


class ZeroConstantTerm(GF2to1Error, ValueError):
    pass


class NotTwoToOne(GF2to1Error, ValueError):
    pass


class OddDomain(GF2to1Error, ValueError):
    pass


class DomainNotFullField(GF2to1Error, ValueError):
    pass


class NotBijective(GF2to1Error, ValueError):
    pass


class TooLarge(GF2to1Error, ValueError):
    pass


class InvolutionsDiffer(GF2to1Error):
    """Two 2-to-1 maps pair the domain differently.

    ``witness`` is ``(a, partner_under_f, partner_under_fbar)``.
    """

    def __init__(self, witness: tuple[int, int, int]):
        a, b1, b2 = witness
        super().__init__(f"derived involutions differ at {a:#x}: {b1:#x} vs {b2:#x}")
        self.witness = witness


class ConditionFailed(GF2to1Error):
    """A hypothesis of a construction or criterion does not hold."""

    def __init__(self, which: str, witness=None, detail: str = ""):
        msg = f"condition {which!r} failed"
        if detail:
            msg += f": {detail}"
        if witness is not None:
            msg += f" (witness {witness!r})"
        super().__init__(msg)
        self.which = which
        self.witness = witness
        self.detail = detail


class InvalidParams(GF2to1Error, ValueError):
    def __init__(self, violation):
        super().__init__(f"invalid family parameters: {violation}")
        self.violation = violation


class ZeroC(GF2to1Error, ValueError):
    pass


class NoClosedForm(GF2to1Error):
    pass


class DeltaInSubfield(GF2to1Error, ValueError):
    pass


class PoleAtTheta(GF2to1Error, ZeroDivisionError):
    pass


class IndexOutOfRange(GF2to1Error, IndexError):
    pass


class ParseError(GF2to1Error, ValueError):
    """Malformed hex element, JSON document or domain shorthand."""
