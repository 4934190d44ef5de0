"""Exception types shared across the package."""


class DipcommError(Exception):
    """Base class for all package errors."""


# game
class UnknownProvince(DipcommError, ValueError):
    pass


class MalformedOrder(DipcommError, ValueError):
    pass


class NoSuchUnit(DipcommError, LookupError):
    pass


class PhaseMismatch(DipcommError, ValueError):
    pass


class MapFormatError(DipcommError, ValueError):
    pass


# intent graphs
class GraphSyntaxError(DipcommError, ValueError):
    pass


class UnbalancedText(GraphSyntaxError):
    pass


class DuplicateVariable(GraphSyntaxError):
    pass


class DanglingReference(GraphSyntaxError):
    pass


# smatch / analytics
class LengthMismatch(DipcommError, ValueError):
    pass


class RankDeficient(DipcommError, ValueError):
    pass


class SchemaMismatch(DipcommError, ValueError):
    pass


# grounding / detection
class NoActorUnit(DipcommError, LookupError):
    pass


class MissingLedgerEntry(DipcommError, KeyError):
    pass


# simulator / io
class ConfigInvalid(DipcommError, ValueError):
    pass


class EmptyCorpus(DipcommError, ValueError):
    pass


class SchemaError(DipcommError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
