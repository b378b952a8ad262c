"""Exception hierarchy shared by all ctxgraph modules."""


class CtxGraphError(Exception):
    """Base class for every error raised by ctxgraph."""


class EmptyLabelSet(CtxGraphError, ValueError):
    pass


class UnknownNode(CtxGraphError, KeyError):
    pass


class UnknownEdge(CtxGraphError, KeyError):
    pass


class UnknownElement(CtxGraphError, KeyError):
    pass


class UnknownCode(CtxGraphError, KeyError):
    pass


class UnknownNamespace(CtxGraphError, KeyError):
    pass


class TypeMismatch(CtxGraphError, TypeError):
    pass


class MalformedRow(CtxGraphError, ValueError):
    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class MissingIdColumn(CtxGraphError, ValueError):
    pass


class ImportAborted(CtxGraphError, RuntimeError):
    pass


class QuerySyntaxError(CtxGraphError, SyntaxError):
    """Raised by the query parser; carries a 1-based line and column."""

    def __init__(self, message, line=1, column=1):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class UnboundVariable(QuerySyntaxError):
    pass


class UnknownEdgeType(QuerySyntaxError):
    pass


class DisconnectedPattern(CtxGraphError, ValueError):
    pass


class AutomatonTooLarge(CtxGraphError, ValueError):
    pass


class TimedOut(CtxGraphError, TimeoutError):
    pass


class EmptyProjection(CtxGraphError, ValueError):
    pass


class BudgetExceeded(CtxGraphError, RuntimeError):
    pass


class ScaleTooSmall(CtxGraphError, ValueError):
    pass


class EquivalenceViolation(CtxGraphError, AssertionError):
    pass
