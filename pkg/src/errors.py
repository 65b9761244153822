"""Error taxonomy shared by the library and the CLI.

Every error carries the process exit code the CLI uses for it: 2 for bad
input or usage, 1 for failures inside the computation.
"""

from __future__ import annotations
from typing import Optional


class QsaError(Exception):
    exit_code = 1


class InvalidArgument(QsaError, ValueError):
    exit_code = 2


class InvalidSize(InvalidArgument):
    pass


class InvalidEdge(InvalidArgument):
    pass


class DegenerateInstance(InvalidArgument):
    pass


class ParseError(InvalidArgument):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class TooLarge(InvalidArgument):
    def __init__(self, what: str, cap: int, got: int):
        self.what = what
        self.cap = cap
        self.got = got
        super().__init__(f"{what}: n={got} exceeds cap {cap}")


class NumericalUnderflow(QsaError):
    pass


class InternalError(QsaError):
    pass
