# File: dsqi_bench/core/exceptions.py
"""Error taxonomy shared by all pipeline stages

Every error carries the process exit code the command-line front end
returns when it escapes a subcommand.
"""

from typing import Optional


class DsqiError(Exception):
    """Base class for all errors raised by the toolkit"""

    exit_code: int = 1


class ConfigurationError(DsqiError):
    """Invalid configuration, missing payload or unwritable output"""

    exit_code = 2


class UsageError(ConfigurationError):
    """Unknown scheme, subcommand or flag"""


class ArgumentError(ConfigurationError, ValueError):
    """Invalid argument passed to a library function"""


class EmptyStreamError(ConfigurationError):
    """Signal or stream too short to produce a single frame"""


class UnsupportedSchemeError(ConfigurationError):
    """Scheme cannot run with the given classifier"""


class InvariantError(DsqiError, ValueError):
    """A value violates a domain invariant (range, unit sum, argmax)"""


class FeatureExtractionError(DsqiError):
    """Feature extractor failed on a frame"""


class EvaluationError(DsqiError):
    """Classifier evaluation failed (e.g. non-finite input)"""


class TrainingError(DsqiError):
    """Model training failed"""

    exit_code = 5


class ParseError(DsqiError):
    """Malformed input file

    Args:
        message: Description of the problem
        path: File being parsed
        line: 1-based line number of the offending row
    """

    exit_code = 3

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")


class AlignmentError(DsqiError):
    """Stream and timeline (or two streams) do not line up

    Args:
        message: Description of the mismatch
        frame: First frame index where the mismatch occurs
    """

    exit_code = 4

    def __init__(self, message: str, frame: Optional[int] = None):
        self.frame = frame
        suffix = f" (first mismatch at frame {frame})" if frame is not None else ""
        super().__init__(f"{message}{suffix}")
