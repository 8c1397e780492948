"""Exception types shared across the package."""


class SubgraphLabError(Exception):
    """Base class for all package-specific errors."""


class InvalidEdge(SubgraphLabError):
    pass


class SelfLoopRejected(SubgraphLabError):
    pass


class ShapeMismatch(SubgraphLabError):
    pass


class InvalidProbability(SubgraphLabError):
    pass


class TooSmall(SubgraphLabError):
    pass


class InvalidNode(SubgraphLabError):
    pass


class DegenerateBag(SubgraphLabError):
    pass


class UnsupportedPolicy(SubgraphLabError):
    pass


class BadSignature(SubgraphLabError):
    pass


class BadChannel(SubgraphLabError):
    pass


class DomainError(SubgraphLabError):
    pass


class NotScalar(SubgraphLabError):
    pass


class BadTerm(SubgraphLabError):
    pass


class NotAllowedInIGN2(SubgraphLabError):
    pass


class Unsupported(SubgraphLabError):
    pass


class MissingMembership(SubgraphLabError):
    pass


class UnknownSuite(SubgraphLabError):
    pass


class ParseError(SubgraphLabError):
    """Malformed graph/config document; message carries line context when known."""


class IoError(SubgraphLabError):
    pass


class DivergenceDetected(SubgraphLabError):
    def __init__(self, epoch: int):
        super().__init__(f"non-finite loss at epoch {epoch}")
        self.epoch = epoch


class NoInput(SubgraphLabError):
    pass
