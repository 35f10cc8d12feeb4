"""Exception hierarchy.

Every error raised on bad input derives from :class:`IngrassError`; the CLI
maps those to exit code 3.
"""


class IngrassError(Exception):
    pass


# graph core
class ParseError(IngrassError, ValueError):
    pass


class EmptyGraph(IngrassError, ValueError):
    pass


class DisconnectedGraph(IngrassError, ValueError):
    def __init__(self, n_components, msg=None):
        self.n_components = n_components
        super().__init__(msg or f"graph has {n_components} connected components")


class DimensionMismatch(IngrassError, ValueError):
    pass


class SameNode(IngrassError, ValueError):
    pass


class OutOfRange(IngrassError, IndexError):
    pass


# resistance / eval
class DegenerateSubspace(IngrassError, ArithmeticError):
    pass


class TooLarge(IngrassError, ValueError):
    pass


class BadK(IngrassError, ValueError):
    pass


class NodeSetMismatch(IngrassError, ValueError):
    pass


class SolverFailure(IngrassError, ArithmeticError):
    pass


class NoConvergence(IngrassError, ArithmeticError):
    """Iterative eigensolve hit ``max_iter``; ``report`` holds the best estimate."""

    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


# lrd / setup artifact
class NotConnected(IngrassError, ValueError):
    pass


class EmbedderMismatch(IngrassError, ValueError):
    pass


class VersionMismatch(IngrassError):
    pass


class ChecksumFailure(IngrassError):
    pass


# update
class InvalidTarget(IngrassError, ValueError):
    pass


class NonPositiveWeight(IngrassError, ValueError):
    pass


class InternalInconsistency(IngrassError, RuntimeError):
    pass


# baseline / bench
class DensityTooLow(IngrassError, ValueError):
    pass


class NotEnoughCandidates(IngrassError, ValueError):
    pass
