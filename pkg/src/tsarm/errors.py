"""Exception hierarchy shared by every tsarm module."""


class TsarmError(Exception):
    """Base class for all library errors."""


class ShapeError(TsarmError, ValueError):
    """Input has the wrong length or shape (empty, ragged, mismatched)."""


class DegenerateVector(TsarmError, ValueError):
    """A vector has zero norm, or a normaliser is not positive."""


class ConfigError(TsarmError, ValueError):
    """A parameter is outside its admissible range."""


class StratificationError(TsarmError, ValueError):
    """A class disappeared from a split after label-ratio subsetting."""


class DataFormatError(TsarmError, ValueError):
    """A CSV or JSON file could not be parsed.

    ``row`` and ``column`` are 1-based positions in the offending file when
    known, else ``None``.
    """

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column

    def __str__(self):
        where = []
        if self.row is not None:
            where.append(f"row {self.row}")
        if self.column is not None:
            where.append(f"column {self.column}")
        base = super().__str__()
        return f"{base} ({', '.join(where)})" if where else base


class Inapplicable(TsarmError):
    """The recommender cannot pick a synthetic twin for the query.

    Raised when both the trend and the seasonal divergence scores fall
    below the threshold, so the query resembles neither template family.
    """

    def __init__(self, message, ds_trend, ds_season):
        super().__init__(message)
        self.ds_trend = ds_trend
        self.ds_season = ds_season


class NonFiniteError(TsarmError, ValueError):
    """A series contains NaN or infinite values."""
