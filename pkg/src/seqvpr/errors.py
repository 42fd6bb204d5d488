"""Exception hierarchy shared across the package."""


class SeqVPRError(Exception):
    """Base class for all library errors."""


class ConfigError(SeqVPRError, ValueError):
    """Invalid parameters or configuration."""


class DataError(SeqVPRError):
    """Input data could not be read or is malformed."""


class LoadError(DataError):
    def __init__(self, path, reason="not found"):
        self.path = str(path)
        super().__init__(f"cannot load {self.path}: {reason}")


class DecodeError(DataError):
    def __init__(self, message, index=None):
        self.index = index
        if index is not None:
            message = f"frame {index}: {message}"
        super().__init__(message)


class EmptySetError(DataError):
    pass


class EncodeError(DataError):
    def __init__(self, message, index=None):
        self.index = index
        if index is not None:
            message = f"frame {index}: {message}"
        super().__init__(message)


class DimensionError(SeqVPRError, ValueError):
    pass


class ComparatorError(SeqVPRError, ValueError):
    """Descriptors of different dimensionality were compared."""


class FormatError(DataError):
    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} (at byte offset {offset})")


class RangeError(SeqVPRError, IndexError):
    pass


class InfeasibleError(SeqVPRError, ValueError):
    """Requested sequence length does not fit the available frames."""


class UndefinedRatioError(SeqVPRError, ZeroDivisionError):
    pass


class DependencyError(DataError):
    """Required upstream artifacts are missing."""

    def __init__(self, message, missing=()):
        self.missing = list(missing)
        if self.missing:
            listing = ", ".join(str(m) for m in self.missing)
            message = f"{message}: {listing}"
        super().__init__(message)
