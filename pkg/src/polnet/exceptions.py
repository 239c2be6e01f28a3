"""Exception types raised across the package."""


class PolnetError(Exception):
    """Base class for all package errors."""


class ValidationError(PolnetError, ValueError):
    """Input failed a structural check (duplicate ids, asymmetric matrix, ...)."""


class DecodingError(PolnetError, ValueError):
    """A document is not valid UTF-8."""

    def __init__(self, offset, source=None):
        self.offset = offset
        self.source = source
        where = f" in {source}" if source else ""
        super().__init__(f"invalid UTF-8{where} at byte offset {offset}")


class NoCoverageError(PolnetError, ValueError):
    """No token of the stream matched the sentiment lexicon."""


class GraphSizeError(PolnetError, ValueError):
    """Graph is too small (or too large) for the requested computation."""


class ConnectivityError(PolnetError, ValueError):
    """A connected graph was required."""

    def __init__(self, n_components):
        self.n_components = n_components
        super().__init__(
            f"graph must be connected, found {n_components} components; "
            "pass the giant component instead"
        )


class ConfigurationError(PolnetError, ValueError):
    """Pipeline configuration is incomplete or inconsistent."""
