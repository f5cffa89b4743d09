"""Exceptions raised by floodcast.

Every error carries a ``code``: the short name used in the machine-readable
error JSON printed by the command line.
"""
from typing import Any, Dict


class FloodcastError(Exception):
    """Base class of all floodcast errors."""

    @property
    def code(self) -> str:
        name = type(self).__name__
        return name[: -len("Error")] if name.endswith("Error") else name

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.code, "message": str(self)}


# %% data_store
class MissingFileError(FloodcastError, FileNotFoundError):
    pass


class SchemaMismatchError(FloodcastError, ValueError):
    pass


class DuplicateIdError(FloodcastError, ValueError):
    pass


class NonFiniteValueError(FloodcastError, ValueError):
    pass


class CoverageGapError(FloodcastError, ValueError):
    pass


class UnknownEventError(FloodcastError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class ForeignKeyError(FloodcastError, ValueError):
    pass


class IoFailureError(FloodcastError, OSError):
    pass


# %% synth_hydro
class InvalidCountError(FloodcastError, ValueError):
    pass


class InvalidDurationError(FloodcastError, ValueError):
    pass


class IncompleteFeaturesError(FloodcastError, ValueError):
    pass


class EmptyTableError(FloodcastError, ValueError):
    pass


# %% features
class NoGaugesError(FloodcastError, ValueError):
    pass


class MissingTideError(FloodcastError, ValueError):
    pass


class UnknownSegmentError(FloodcastError, ValueError):
    pass


class DegenerateFeatureError(FloodcastError, ValueError):
    pass


# %% windowing
class EventTooShortError(FloodcastError, ValueError):
    pass


class OverlappingSplitsError(FloodcastError, ValueError):
    pass


class SplitTooSmallError(FloodcastError, ValueError):
    pass


# %% neuralnet / model
class ShapeMismatchError(FloodcastError, ValueError):
    pass


class EmptyBatchError(FloodcastError, ValueError):
    pass


class InvalidConfigError(FloodcastError, ValueError):
    pass


class NonFiniteLossError(FloodcastError, ArithmeticError):
    pass


class ScalerMismatchError(FloodcastError, ValueError):
    pass


# %% nas / eval
class EmptyLogError(FloodcastError, ValueError):
    pass


class UnknownPresetError(FloodcastError, ValueError):
    pass


class EmptyInputError(FloodcastError, ValueError):
    pass


class LengthMismatchError(FloodcastError, ValueError):
    pass


class InsufficientRowsError(FloodcastError, ValueError):
    pass


class MissingFoldModelError(FloodcastError, ValueError):
    pass


# %% cli
class UnknownCommandError(FloodcastError, ValueError):
    pass


class ConfigInvalidError(FloodcastError, ValueError):
    pass
