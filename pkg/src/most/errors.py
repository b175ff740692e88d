"""Errors raised while reading programs."""


class MostError(Exception):
    kind = "Error"

    def __init__(self, message: str, pos=None):
        super().__init__(message)
        self.message = message
        self.pos = pos

    def __str__(self):
        if self.pos:
            return f"{self.pos[0]}:{self.pos[1]}: {self.message}"
        return self.message


class ParseError(MostError):
    kind = "ParseError"


class ScopeError(MostError):
    kind = "ScopeError"


class WfError(MostError):
    kind = "WfError"


class UnknownName(MostError):
    kind = "UnknownName"
