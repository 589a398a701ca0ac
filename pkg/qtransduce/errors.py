"""
MIT License

Copyright (c) 2024-present Isabelle Phoebe <izzy@uwu.gal>

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
"""

from typing import Final


__all__: Final[tuple[str, ...]] = (
    "QTransduceException",
    "InvalidArgument",
    "NumericalInstability",
    "DegenerateSteadyState",
    "ResonanceSingularity",
    "ProtocolViolation",
    "PreconditionError",
    "ConfigError",
    "CheckpointError",
    "CorruptCheckpoint",
    "CheckpointVersionMismatch",
)


class QTransduceException(Exception):
    """Base exception class for qtransduce errors. Every custom exception in the library derives from it."""

    pass


class InvalidArgument(QTransduceException, ValueError):
    """Raised when an argument violates a documented precondition (shape, sign, range)."""

    pass


class NumericalInstability(QTransduceException):
    """Raised when an integration or an update produces non-finite values or drifts beyond tolerance."""

    pass


class DegenerateSteadyState(QTransduceException):
    """Raised when a Liouvillian has no unique steady state."""

    pass


class ResonanceSingularity(QTransduceException):
    """Raised when the resolvent of the drift matrix cannot be formed at the requested detuning."""

    pass


class ProtocolViolation(QTransduceException):
    """Raised when the episode protocol is not respected, e.g. stepping a finished episode."""

    pass


class PreconditionError(QTransduceException):
    """Raised when an operation is invoked on an object that is not ready for it."""

    pass


class ConfigError(QTransduceException):
    """Raised when a run configuration cannot be parsed or validated."""

    def __init__(self, message: str, *, key: str | None = None, line: int | None = None) -> None:
        super().__init__(message)
        self.key: str | None = key
        self.line: int | None = line


class CheckpointError(QTransduceException):
    """Base class for checkpoint persistence errors."""

    pass


class CorruptCheckpoint(CheckpointError):
    """Raised when a checkpoint fails its integrity check or cannot be decoded."""

    pass


class CheckpointVersionMismatch(CheckpointError):
    """Raised when a checkpoint was written by an incompatible format version."""

    pass
