"""Exception hierarchy.

Every rejection raised by the library derives from :class:`Rejection`, which
is itself a ``ValueError`` so callers that only care about bad input can catch
that.
"""


class Rejection(ValueError):
    """Base class for all structured rejections."""


class RejectDegeneracy(Rejection):
    """lambda**2 <= mu**2, or lambda <= 0."""


class RejectDeformation(Rejection):
    """beta <= 0."""


class RejectUnits(Rejection):
    """hbar <= 0, c <= 0 or m < 0, or a non-finite constant."""


class RejectDomain(Rejection):
    """Argument outside the domain of the operation."""


class RejectLevel(Rejection):
    """Negative quantum number."""


class RejectGrid(Rejection):
    """Grid too coarse, non-monotone, or otherwise unusable."""


class RejectCount(Rejection):
    """More eigenvalues requested than the operator has."""


class RejectBranch(Rejection):
    """Schrodinger eigenvalue below the potential floor (complex energy)."""


class RejectConvergence(Rejection):
    """Quadrature integrand has not decayed at the edge of the box."""
