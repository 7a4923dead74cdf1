"""Exception hierarchy shared across the package."""


class VNEError(Exception):
    """Base class for all embedding and simulation errors."""


class ConfigError(VNEError, ValueError):
    """Invalid configuration. ``field`` carries the dotted path of the offending value."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class GenerationError(VNEError):
    def __init__(self, seed: int, domain: int, attempts: int):
        super().__init__(
            f"domain {domain} stayed disconnected after {attempts} attempts (seed={seed})"
        )
        self.seed = seed
        self.domain = domain


class InsufficientResources(VNEError):
    """Raised by the ledger when a node or link cannot cover a demand.

    ``element`` is the node id or the ``(u, v)`` link key that failed first.
    """

    def __init__(self, element, needed, available):
        super().__init__(f"{element!r}: need {needed}, available {available}")
        self.element = element
        self.needed = needed
        self.available = available


class UnknownReceipt(VNEError):
    pass


class AlreadyReleased(VNEError):
    pass


class NoFeasibleCandidate(VNEError):
    def __init__(self, vnode, domain):
        super().__init__(f"virtual node {vnode} has no feasible candidate in domain {domain}")
        self.vnode = vnode
        self.domain = domain


class MissingUpload(VNEError):
    def __init__(self, domain):
        super().__init__(f"no upload received from domain {domain}")
        self.domain = domain


class NoPath(VNEError):
    def __init__(self, vlink):
        super().__init__(f"no capacity-feasible path for virtual link {vlink}")
        self.vlink = vlink


class NoFeasibleAssignment(VNEError):
    pass


class EmptySample(VNEError):
    pass
