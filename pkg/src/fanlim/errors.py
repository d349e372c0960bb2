"""Exception types shared across the package."""


class FanlimError(Exception):
    """Base class for all errors raised by this package."""


# --- fan / lattice ---

class FanError(FanlimError):
    """Invalid fan data."""


class NonPrimitiveRay(FanError):
    """A ray generator is zero or not primitive."""


class NotPointed(FanError):
    """A cone's generators are linearly dependent."""


class IntersectionNotFace(FanError):
    """Two cones intersect in something other than their common face."""


class UnknownRay(FanError):
    """Ray index out of range, or not a ray of the cone in question."""


class NotRegular(FanError):
    """Operation requires a regular fan (or cone)."""


# --- regions / monomial complexes ---

class RankMismatch(FanlimError):
    """Lattice vector has the wrong length."""


class BrokenDifferential(FanlimError):
    """The differential of a monomial complex does not square to zero."""


class GradingError(FanlimError):
    """Entry shifts admit no consistent grading; degreewise evaluation impossible."""


class NotFace(FanlimError):
    """Localization target is not a face of the cone."""


class NoRhoConstraint(FanlimError):
    """Region has no lower bound at the given ray; divisor restriction undefined."""


class NotMonomialInclusion(FanlimError):
    """Cofibre regions are not representable by ray constraints."""


class ChamberError(FanlimError):
    """Chamber enumeration could not certify an integral witness."""


# --- chain complexes / diagrams ---

class NotAChainMap(FanlimError):
    """Components do not commute with the boundary maps."""


class InconsistentDiagram(FanlimError):
    """Structure maps fail functoriality."""


# --- presheaves / colocal ---

class WrongQuotient(FanlimError):
    """Presheaf is not defined over the expected quotient fan."""


class NotHomotopySheaf(FanlimError):
    """Operation is only defined for homotopy sheaves."""


class WindowInsufficient(FanlimError):
    """Nonzero homology on the window's boundary shell."""


class InvalidWindow(FanlimError):
    """Window specification unusable (e.g. auto mode on a non-complete fan)."""
