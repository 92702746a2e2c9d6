"""
Error hierarchy for commentary_align.

Every error raised on purpose by the package derives from `AlignError` and
carries the exit code the command line reports for it:

    0 success, 1 usage, 2 data error, 3 endpoint error.

Errors that are also natural built-in categories subclass those too, so a
caller can write `except ValueError` around a kernel call.
"""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_ENDPOINT = 3


class AlignError(Exception):
    """Base class of every deliberate commentary_align failure."""

    exit_code: int = EXIT_DATA


class UsageError(AlignError):
    """Invalid flags, config values or command requests."""

    exit_code = EXIT_USAGE


class DataError(AlignError):
    """Input data violates a format or a domain invariant."""

    exit_code = EXIT_DATA


class MatchFileError(DataError):
    """A match file failed to parse or validate.

    Attributes:
        match_id (str | None): Id of the offending match, when it could be read.
        field (str): Dotted path of the offending field (e.g. `commentaries.2.t`).
    """

    def __init__(self, message: str, *, match_id: str | None = None, field: str = "") -> None:
        self.match_id = match_id
        self.field = field
        where = f"match {match_id or '<unknown>'}"
        if field:
            where += f", field {field}"
        super().__init__(f"{where}: {message}")


class InvariantError(DataError):
    """A domain-type invariant does not hold.

    Attributes:
        field (str): Dotted path of the offending field, relative to its owner.
    """

    def __init__(self, field: str, message: str) -> None:
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class FeatureFileError(DataError):
    """An ALNF feature file is truncated, has a bad header or bad values."""


class CheckpointError(DataError):
    """An MTAC checkpoint file is truncated or has a bad header."""


class DimensionError(DataError, ValueError):
    """Array shapes are inconsistent with each other or with a head."""


class ZeroNormError(DataError, ValueError):
    """A zero-norm row makes cosine similarity undefined.

    Attributes:
        row (int): Index of the offending row.
        side (str): Which matrix the row belongs to.
    """

    def __init__(self, side: str, row: int) -> None:
        self.side = side
        self.row = row
        super().__init__(f"{side} row {row} has zero norm")


class MissingGroundTruthError(DataError):
    """A commentary needed for training or evaluation has no `t_gt`."""


class EmptyWindowError(DataError):
    """A candidate window holds no frame.

    Attributes:
        commentary_index (int): Index of the commentary whose window is empty.
    """

    def __init__(self, commentary_index: int, start_s: float, end_s: float) -> None:
        self.commentary_index = commentary_index
        super().__init__(
            f"commentary {commentary_index}: no frame in window [{start_s:.3f}, {end_s:.3f}]"
        )


class NumericError(DataError, ArithmeticError):
    """A gradient, loss or parameter became non-finite."""


class GradientCheckError(NumericError):
    """Analytic gradients disagree with finite differences beyond tolerance."""


class EndpointError(AlignError):
    """The LLM endpoint is unreachable, failing, or not configured."""

    exit_code = EXIT_ENDPOINT
