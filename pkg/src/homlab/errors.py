"""Exception types shared across the package."""


class HomlabError(Exception):
    """Base class for all errors raised by this package."""


class SpecError(HomlabError):
    """An algebra/module description file is malformed.

    Carries an optional (line, column) position for parser diagnostics.
    """

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, col {column}: {message}"
        super().__init__(message)


class BuildError(HomlabError):
    """A constructed algebra failed one of its structural laws."""


class ModuleError(HomlabError):
    """Action matrices do not define a module over the given algebra."""


class UndeterminedError(HomlabError):
    """A decision procedure exhausted its exact regime without a verdict.

    Verification suites treat this as a hard abort, never as a pass or a
    violation.
    """
