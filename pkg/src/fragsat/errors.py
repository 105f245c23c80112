"""Exception hierarchy shared by all fragsat modules."""


class FragsatError(Exception):
    """Base class; the CLI turns these into a machine-readable error line."""


class DuplicateEntry(FragsatError):
    pass


class ParseError(FragsatError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class SplitTooSmall(FragsatError):
    pass


class UnknownWord(FragsatError):
    pass


class NotInFragment(FragsatError):
    def __init__(self, message, position=None):
        self.position = position
        super().__init__(message if position is None else f"{message} (at char {position})")


class WrongFragment(FragsatError):
    pass


class BudgetExceeded(FragsatError):
    pass


class ProverUnavailable(FragsatError):
    pass


class UnparseableOutput(FragsatError):
    pass


class NoProofFound(FragsatError):
    pass


class GenerationStuck(FragsatError):
    pass


class EmptyHardSet(FragsatError):
    pass


class VocabTooSmall(FragsatError):
    pass


class ConstructionStuck(FragsatError):
    pass


class SchemaError(FragsatError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)
