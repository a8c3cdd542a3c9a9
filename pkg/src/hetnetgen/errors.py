"""Exception types shared across the package."""


class HetnetgenError(Exception):
    """Base class for all package errors."""


class ParameterError(HetnetgenError, ValueError):
    """A caller-supplied parameter is out of range or inconsistent."""


class GraphFormatError(HetnetgenError):
    """A node/edge/corpus file could not be parsed."""

    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}:{line_no}: {message}")


class GraphIntegrityError(HetnetgenError):
    """Graph data violates a structural invariant (dangling edge, type clash...)."""


class ShapeMismatchError(HetnetgenError):
    """Tensor operands have incompatible shapes."""

    def __init__(self, op, *shapes):
        self.shapes = shapes
        super().__init__(f"{op}: incompatible shapes {' vs '.join(str(s) for s in shapes)}")


class ContractError(HetnetgenError):
    """An operation was invoked outside its contract (e.g. non-scalar loss)."""


class SamplingError(HetnetgenError):
    """A sampling operation has no support to draw from."""


class GenerationError(HetnetgenError):
    """Walk generation failed (e.g. sampled node type has no member nodes)."""


class TrainingError(HetnetgenError):
    """Training produced a non-finite loss; the last checkpoint is preserved."""


class AssemblyStallError(HetnetgenError):
    """Edge assembly stalled before reaching the target; carries the partial graph."""

    def __init__(self, message, partial_graph):
        self.partial_graph = partial_graph
        super().__init__(message)
