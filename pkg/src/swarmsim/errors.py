"""Exception types raised across the package."""


class SwarmsimError(Exception):
    """Base class for all package-specific errors."""


class WriteByNonWriter(SwarmsimError):
    """A single-writer shared variable was written by a robot that does not own it."""


class UnknownVariable(SwarmsimError):
    """An update arrived for a shared variable that was never declared."""


class WrongPlatformCommand(SwarmsimError):
    """A low-level command was applied to a platform that does not support it."""


class CommandWhileGrounded(SwarmsimError):
    """An attitude command was issued to a quadrotor that is not airborne."""


class MalformedTrace(SwarmsimError):
    """A trace violates its well-formedness invariants (time order, orphan events)."""


class ScenarioError(SwarmsimError):
    """A scenario file failed validation; the message carries the offending location."""


class RuntimeFault(SwarmsimError):
    """An application block hit a runtime fault (bad index, type mismatch)."""


class ProgramSyntaxError(SwarmsimError):
    """Program text could not be parsed; carries line/column in the message."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class UndeclaredVariable(ProgramSyntaxError):
    """A program references a variable that was never declared."""


class WriteToForeignSharedVar(ProgramSyntaxError):
    """A program writes a single-writer shared slot it cannot be shown to own."""


class ElectionTimeout(SwarmsimError):
    """Leader election timed out before any participant was observed."""


class DegenerateSegment(SwarmsimError):
    """The two reference points of a perpendicular-bisector computation coincide."""
