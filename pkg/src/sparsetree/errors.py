"""Exception hierarchy. Every error names the offending element."""


class SparsifierError(Exception):
    """Base class for all library errors."""


class InvalidInstance(SparsifierError, ValueError):
    pass


class MissingTerminal(InvalidInstance):
    def __init__(self, terminal):
        super().__init__(f"terminal {terminal!r} is not a vertex")
        self.terminal = terminal


class NonpositiveCapacity(InvalidInstance):
    def __init__(self, edge, capacity):
        super().__init__(f"edge {edge} has nonpositive capacity {capacity}")
        self.edge = edge
        self.capacity = capacity


class SelfLoop(InvalidInstance):
    def __init__(self, vertex):
        super().__init__(f"self-loop at {vertex!r}")
        self.vertex = vertex


class WeightSumNotOne(SparsifierError, ValueError):
    def __init__(self, total):
        super().__init__(f"convex weights sum to {total}, not 1")


class VertexSetMismatch(SparsifierError, ValueError):
    def __init__(self, diff):
        super().__init__(f"sparsifiers disagree on vertices {diff}")


class NonInjectiveCorrespondence(SparsifierError, ValueError):
    def __init__(self, targets):
        super().__init__(f"terminal correspondence is not injective: {targets}")


class UnknownTerminal(SparsifierError, ValueError):
    def __init__(self, terminal):
        super().__init__(f"unknown terminal {terminal!r}")
        self.terminal = terminal


class NotATree(InvalidInstance):
    def __init__(self, detail="graph is not a tree"):
        super().__init__(detail)


class NotUnitCapacities(InvalidInstance):
    def __init__(self, edge=None):
        msg = "instance must have unit capacities"
        if edge is not None:
            msg += f"; edge {edge} violates this"
        super().__init__(msg)
        self.edge = edge


class NoNonterminalAvailable(InvalidInstance):
    pass


class TooManyExtensions(SparsifierError, ValueError):
    pass


class UnknownEdge(SparsifierError, KeyError):
    pass


class SameTerminal(SparsifierError, ValueError):
    pass


class NotALeafTerminal(SparsifierError, ValueError):
    pass


class UnmappedVertex(SparsifierError, AssertionError):
    pass


class NonterminalAdjacency(InvalidInstance):
    def __init__(self, u, v):
        super().__init__(f"non-terminals {u!r} and {v!r} are adjacent; graph is not quasi-bipartite")
        self.edge = (u, v)


class SingleRay(SparsifierError, ValueError):
    pass


class OverlappingSets(SparsifierError, ValueError):
    pass


class EmptySide(SparsifierError, ValueError):
    pass


class TooManyTerminals(SparsifierError, ValueError):
    pass


class UnsupportedTopology(SparsifierError, ValueError):
    pass


class ParseError(SparsifierError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
