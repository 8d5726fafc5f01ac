class FaParetoError(Exception):
    """Base class for package errors."""


class ConfigError(FaParetoError, ValueError):
    pass


class DatasetError(FaParetoError, ValueError):
    pass


class CSVParseError(DatasetError):
    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.row = row
        self.column = column


class UndefinedTPRError(DatasetError):
    def __init__(self, g, y):
        super().__init__(f"TPR undefined: no rows with group={g}, label={y}")
        self.g = g
        self.y = y


class UndefinedCorrelationError(FaParetoError, ValueError):
    pass


class ArchitectureMismatch(FaParetoError, ValueError):
    pass
