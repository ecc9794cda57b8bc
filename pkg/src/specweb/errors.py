"""Exception types raised by the re-engineering pipeline."""

from __future__ import annotations


class ReengineeringError(Exception):
    """Base class; every structured failure of the pipeline derives from it."""

    exit_code = 1


class MalformedInput(ReengineeringError):
    exit_code = 3

    def __init__(self, position: int, reason: str):
        self.position = position
        self.reason = reason
        super().__init__(f"line {position}: {reason}")


class UnrecoverableMarkup(MalformedInput):
    """Markup whose tag balance cannot be restored by escaping stray brackets."""

    def __init__(self, line: int, reason: str = "unbalanced markup"):
        super().__init__(line, reason)

    @property
    def line(self) -> int:
        return self.position


class SchemaViolation(ReengineeringError):
    exit_code = 3

    def __init__(self, element: str, position: int | None, reason: str = "unexpected element"):
        self.element = element
        self.position = position
        self.reason = reason
        where = f" at line {position}" if position else ""
        super().__init__(f"<{element}>{where}: {reason}")


class InvalidTree(ReengineeringError):
    exit_code = 1

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:5])
        more = f" (+{len(self.violations) - 5} more)" if len(self.violations) > 5 else ""
        super().__init__(f"{len(self.violations)} validation error(s): {lines}{more}")


class EmptyNumber(ReengineeringError):
    def __init__(self):
        super().__init__("cannot build a page filename from an empty number")


class EmptyHeadings(ReengineeringError):
    def __init__(self, reason: str = "no heading token survived filtering"):
        super().__init__(reason)


class EmptyReport(ReengineeringError):
    def __init__(self):
        super().__init__("at least one report row is required")


class IoFailure(ReengineeringError):
    exit_code = 2

    def __init__(self, path, reason: str = ""):
        self.path = path
        super().__init__(f"{path}: {reason}" if reason else str(path))
