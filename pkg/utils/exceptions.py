"""
Error hierarchy shared by the models, data, evaluation and CLI layers
"""


class PolyceptronError(Exception):
    """Base class for every error raised by the toolkit"""


class InputError(PolyceptronError, ValueError):
    """Invalid samples, labels or parameter values"""


class DimensionMismatchError(InputError):
    """Model and data disagree on the feature dimension"""


class ConfigError(InputError):
    """Invalid configuration value or config-file content"""


class ParseError(PolyceptronError):
    """
    Malformed data or model file

    Args:
        message: What went wrong
        line: 1-based line number in the offending file, when known
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StratificationError(PolyceptronError):
    """A class would be missing from some cross-validation training split"""


class EnumerationBudgetError(PolyceptronError):
    """The credit-assignment enumeration is too large to attempt"""


class GenerationError(PolyceptronError):
    """Random instance generation could not produce enough samples"""
