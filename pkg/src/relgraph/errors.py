"""Error types shared across the package.

Every user-facing failure derives from RelgraphError so the CLI can map
them to exit codes without touching internals.
"""

from __future__ import annotations


class RelgraphError(Exception):
    """Base class for all errors raised by this package."""


# ---------------------------------------------------------------------------
# storage


class StorageError(RelgraphError):
    pass


class MissingFileError(StorageError):
    pass


class HeaderMismatchError(StorageError):
    pass


class CellTypeError(StorageError):
    """A CSV cell failed to parse as its declared type.

    Carries 1-based data row number (header excluded) and column name.
    """

    def __init__(self, row: int, column: str, message: str):
        super().__init__(f"row {row}, column {column!r}: {message}")
        self.row = row
        self.column = column


class UnknownRelationError(StorageError):
    pass


class DuplicateRelationError(StorageError):
    pass


class RowOutOfRangeError(StorageError):
    pass


# ---------------------------------------------------------------------------
# graph mapping


class MappingError(RelgraphError):
    pass


class DanglingEdgeError(MappingError):
    """An edge row's key value matches no vertex row."""

    def __init__(self, relation: str, row: int, endpoint: str, value):
        super().__init__(
            f"edge relation {relation!r} row {row}: {endpoint} key value {value!r} "
            f"matches no vertex row"
        )
        self.relation = relation
        self.row = row
        self.endpoint = endpoint
        self.value = value


class AmbiguousKeyError(MappingError):
    """A referenced vertex key column contains duplicate values."""


class UnknownGraphError(MappingError):
    pass


# ---------------------------------------------------------------------------
# frontend


class ParseError(RelgraphError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"parse error at {line}:{col}: {message}")
        self.line = line
        self.col = col


class ValidationError(RelgraphError):
    pass


class UnknownLabelError(ValidationError):
    pass


class UnknownAttributeError(ValidationError):
    pass


class UnknownVariableError(ValidationError):
    pass


class UnknownColumnError(ValidationError):
    pass


class AmbiguousColumnError(ValidationError):
    pass


class DuplicateAliasError(ValidationError):
    pass


class DisconnectedPatternError(ValidationError):
    pass


class TypeMismatchError(ValidationError):
    pass


class UnsupportedQueryError(ValidationError):
    pass


# ---------------------------------------------------------------------------
# planning / execution


class PlanError(RelgraphError):
    pass


class CrossProductRequiredError(PlanError):
    """The join graph is disconnected; no cross products are considered."""


class SchemaMismatchError(PlanError):
    """A plan's declared schema does not fit its inputs; raised at open time."""


class SizeLimitError(RelgraphError):
    """Enumeration or planning would exceed the supported problem size."""


class QueryTimeoutError(RelgraphError):
    pass
