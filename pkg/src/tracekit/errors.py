"""Shared exception types."""


class TracekitError(Exception):
    pass


class ParseError(TracekitError):
    def __init__(self, message, line, col):
        super().__init__(f"{message} (line {line}, col {col})")
        self.line = line
        self.col = col


class MissingMain(TracekitError):
    pass


class MalformedTrace(TracekitError):
    pass


class SchemaError(TracekitError):
    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"{message} (record {line_number})"
        super().__init__(message)
        self.line_number = line_number


class MissingVariable(TracekitError):
    def __init__(self, name, line):
        super().__init__(f"variable {name!r} not in finalized state of covered line {line}")
        self.name = name
        self.line = line


class LengthMismatch(TracekitError):
    pass


class EmptyCorpus(TracekitError):
    pass


class TooFewCandidates(TracekitError):
    pass
