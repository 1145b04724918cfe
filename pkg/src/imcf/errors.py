"""Exception hierarchy shared by all imcf modules.

Two broad families matter to callers: ``DomainError`` covers rejected
inputs (bad parameters, points off the model quadric, evaluation outside
a flow's existence interval), ``NumericalError`` covers failures of the
numerical machinery (divergent Newton iterations, degenerate parallel
transport, step-size underflow).  The CLI maps the first family to exit
code 2 and the second to exit code 3.
"""


class ImcfError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ImcfError):
    """Input outside the mathematical domain of an operation."""


class NotOnQuadric(DomainError):
    """Ambient point does not satisfy the model quadric equation."""


class NotUnitNormal(DomainError):
    """Normal vector is not unit, or not orthogonal to the position."""


class UnknownName(DomainError):
    """Requested catalog entry does not exist."""


class NonMeanConvex(DomainError):
    """Initial mean curvature is not positive; flow undefined.

    Carries ``required`` when a closed-form case can state the parameter
    bound that restores mean convexity.
    """

    def __init__(self, msg, required=None):
        super().__init__(msg)
        self.required = required


class OutOfInterval(DomainError):
    """Evaluation time outside the open existence interval."""


class PreconditionError(DomainError):
    """A documented operation precondition was violated."""


class SpectrumMismatch(DomainError):
    """Immersion and flow profile carry different curvature spectra."""


class AtPole(DomainError):
    """Stereographic projection evaluated at (or too near) its pole."""


class WrongSpaceForm(DomainError):
    """Operation requires a different ambient curvature sign."""


class NoEvent(DomainError):
    """Requested boundary refinement but the path recorded no event."""


class NumericalError(ImcfError):
    """A numerical procedure failed to produce a trustworthy result."""


class FocalDegeneracy(NumericalError):
    """Parallel transport hit a focal distance; factors degenerate.

    ``index`` identifies the curvature entry whose factor vanished,
    when known.
    """

    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


class NoConvergence(NumericalError):
    """Iteration exhausted its budget without meeting the tolerance."""


class FactorNonPositive(NumericalError):
    """A transport factor left the positive basin during root finding."""


class DegenerateSample(NumericalError):
    """A sample point produced a degenerate first fundamental form."""
