"""Exception types shared across the library."""


class GpdError(Exception):
    """Base class for all library errors."""


class IsolatedNodeError(GpdError):
    """Degree normalization is undefined for a zero-degree node."""

    def __init__(self, node):
        self.node = node
        super().__init__(f"node {node} has zero degree")


class NotSymmetricError(GpdError):
    """A matrix required to be symmetric is not, beyond tolerance."""


class DisconnectedAfterRetriesError(GpdError):
    """A random-graph generator kept producing disconnected graphs."""

    def __init__(self, retries):
        self.retries = retries
        super().__init__(f"no connected graph after {retries} attempts")


class ZeroSignalError(GpdError):
    """A reference signal with zero norm makes the operation undefined."""


class IsolatedClusterError(GpdError):
    """A coarsened cluster has no edges to the rest of the graph."""

    def __init__(self, cluster):
        self.cluster = cluster
        super().__init__(f"cluster {cluster} has zero total degree")


class NonFiniteLossError(GpdError):
    """The fitting loss became NaN or infinite."""

    def __init__(self, epoch):
        self.epoch = epoch
        super().__init__(f"loss is not finite at epoch {epoch}")


class ZeroRowError(GpdError):
    """A row of the operator has zero norm, so its normalization fails."""

    def __init__(self, row):
        self.row = row
        super().__init__(f"row {row} of the operator has zero norm")


class SolverConvergenceError(GpdError):
    """An iterative linear solver did not reach its tolerance."""


class ConfigError(GpdError):
    """An experiment configuration is malformed or inconsistent."""


class DataFormatError(GpdError):
    """An input data file is malformed; message carries the line number."""
