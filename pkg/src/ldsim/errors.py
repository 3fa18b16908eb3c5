"""Exception types shared across the package."""


class LdsimError(Exception):
    """Base class for all package-specific errors."""


class ConnectivityFailure(LdsimError):
    """Rejection sampling could not produce a connected deployment."""

    def __init__(self, attempts):
        self.attempts = attempts
        super().__init__(f"no connected deployment after {attempts} attempts")


class Disconnected(LdsimError):
    """A tree builder ran out of frontier edges before spanning all sensors."""


class InsufficientEnergy(LdsimError):
    """A node cannot afford a requested energy drain."""

    def __init__(self, node, required, available):
        self.node = node
        self.required = required
        self.available = available
        super().__init__(
            f"node {node} has {available!r} J, needs {required!r} J"
        )


class NodeDeath(LdsimError):
    """A sensor cannot afford its round cost; the trial is over."""

    def __init__(self, node):
        self.node = node
        super().__init__(f"node {node} died at round start")


class ProtocolViolation(LdsimError):
    """A message arrived that the distributed protocol forbids."""


class TooLarge(LdsimError):
    """Instance exceeds the size cap of an exhaustive routine."""
