"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class QembedError(Exception):
    """Base class for all library errors."""


class NetError(QembedError, ValueError):
    """A net (or a matrix inside it) violates a structural or numerical invariant."""


class ParseError(NetError):
    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{location}: {message}"
        super().__init__(message)


class CycleError(NetError):
    def __init__(self, member):
        self.member = member
        super().__init__(f"net contains a cycle through node {member!r}")


class CapError(QembedError):
    """A state space or enumeration exceeds the configured size cap."""

    def __init__(self, what, required, cap):
        self.required = required
        self.cap = cap
        super().__init__(f"{what} needs {required} entries, cap is {cap}")


class ImpossibleEvidence(QembedError):
    """Evidence has zero probability mass, or no sampled run was accepted."""


class PromiseViolation(QembedError):
    """An oracle function is outside the class the algorithm was promised."""


class InsufficientRank(QembedError):
    """Too few independent equations to pin down a hidden period."""
