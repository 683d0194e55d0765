class PadicFramesError(Exception):
    """Base class for construction errors."""


class InvalidTreeError(PadicFramesError, ValueError):
    """A root-to-leaf path carries no zero, so the scaling function would not be compactly supported."""


class TransformError(PadicFramesError, ValueError):
    """An elementary tree transformation was applied where its precondition fails."""

    def __init__(self, message: str, node: int | None = None):
        super().__init__(message)
        self.node = node


class InfeasibleTreeError(PadicFramesError):
    """At least ``p**(N+1)`` zeros: the zero constraints force ``lambda_0 = 0``."""


class UnsolvedTreeError(PadicFramesError):
    """Node values were requested before the mask was solved."""


class InternalContradictionError(PadicFramesError):
    """A node outside the zero set evaluated to (numerically) zero."""


class FrameConstructionError(PadicFramesError):
    """The frame builder was called outside its preconditions."""
