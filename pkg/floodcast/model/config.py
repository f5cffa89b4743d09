from typing import List, Literal, Optional, Tuple, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from floodcast.errors import InvalidConfigError
from floodcast.neuralnet import GATES, RegSpec

DenseActivation = Literal["relu", "selu", "linear"]

RNN_LAYER_OPTIONS = (1, 2, 3)
RNN_UNIT_OPTIONS = (12, 20)
SPATIAL_LAYER_OPTIONS = (2, 3)
SPATIAL_UNIT_OPTIONS = (4, 8)
ACTIVATION_OPTIONS: Tuple[DenseActivation, ...] = ("relu", "selu", "linear")
HEAD_OPTIONS: Tuple[Tuple[int, ...], ...] = (
    (64, 64, 1),
    (32, 32, 1),
    (32, 16, 1),
    (64, 64, 16, 1),
    (64, 32, 32, 1),
)
LOOK_BACK_OPTIONS = (1, 4)
N_SPATIAL = 3


def _within(name: str, value: object, options: tuple) -> None:
    if value not in options:
        raise ValueError(f"{name} must be one of {list(options)}, got {value!r}")


class ArchConfig(BaseModel):
    """One architecture of the search space.

    ``head_act`` is either one activation for every head layer or one per
    layer.
    """

    model_config = ConfigDict(frozen=True)

    rnn_type: Literal["LSTM", "GRU"] = "GRU"
    rnn_layers: int = 1
    rnn_units: int = 20
    spatial_layers: int = 2
    spatial_units: int = 4
    spatial_act: DenseActivation = "selu"
    head_units: Tuple[int, ...] = (64, 64, 16, 1)
    head_act: Union[DenseActivation, Tuple[DenseActivation, ...]] = (
        "linear",
        "selu",
        "selu",
        "selu",
    )
    look_back: int = 4
    include_max15: bool = True

    @field_validator("head_units", mode="before")
    @classmethod
    def _head_tuple(cls, value: object) -> object:
        return tuple(value) if isinstance(value, list) else value

    @field_validator("head_act", mode="before")
    @classmethod
    def _act_tuple(cls, value: object) -> object:
        return tuple(value) if isinstance(value, list) else value

    @model_validator(mode="after")
    def _check_domains(self) -> "ArchConfig":
        _within("rnn_layers", self.rnn_layers, RNN_LAYER_OPTIONS)
        _within("rnn_units", self.rnn_units, RNN_UNIT_OPTIONS)
        _within("spatial_layers", self.spatial_layers, SPATIAL_LAYER_OPTIONS)
        _within("spatial_units", self.spatial_units, SPATIAL_UNIT_OPTIONS)
        _within("head_units", self.head_units, HEAD_OPTIONS)
        _within("look_back", self.look_back, LOOK_BACK_OPTIONS)
        if self.head_units[-1] != 1:
            raise ValueError("the last head layer must have one unit")
        if isinstance(self.head_act, tuple) and len(self.head_act) != len(
            self.head_units
        ):
            raise ValueError(
                f"{len(self.head_act)} head activations for "
                f"{len(self.head_units)} head layers"
            )
        return self

    @property
    def head_activations(self) -> List[DenseActivation]:
        if isinstance(self.head_act, tuple):
            return list(self.head_act)
        return [self.head_act] * len(self.head_units)

    @property
    def head_layers(self) -> int:
        return len(self.head_units)

    @property
    def temporal_width(self) -> int:
        return 5 if self.include_max15 else 4

    def parameter_count(self) -> int:
        """Closed form: ``gates * (in * u + u**2 + u)`` per recurrent layer and
        ``in * out + out`` per dense layer."""
        gates = GATES[self.rnn_type]
        u = self.rnn_units
        total = 0
        n_in = self.temporal_width
        for _ in range(self.rnn_layers):
            total += gates * (n_in * u + u * u + u)
            n_in = u
        n_in = N_SPATIAL
        for _ in range(self.spatial_layers):
            total += n_in * self.spatial_units + self.spatial_units
            n_in = self.spatial_units
        n_in = u + self.spatial_units
        for width in self.head_units:
            total += n_in * width + width
            n_in = width
        return total

    def with_variant(
        self,
        rnn_type: Optional[str] = None,
        include_max15: Optional[bool] = None,
        look_back: Optional[int] = None,
    ) -> "ArchConfig":
        """A copy with another cell type, MAX15 flag or look-back."""
        changes = {
            k: v
            for k, v in (
                ("rnn_type", rnn_type),
                ("include_max15", include_max15),
                ("look_back", look_back),
            )
            if v is not None
        }
        return parse_arch_config({**self.model_dump(), **changes})


CHAMPION = ArchConfig()


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    lr: float = Field(default=1e-3, gt=0)
    beta1: float = Field(default=0.9, gt=0, lt=1)
    beta2: float = Field(default=0.999, gt=0, lt=1)
    eps: float = Field(default=1e-7, gt=0)
    batch_size: int = Field(default=512, gt=0)
    max_epochs: int = Field(default=100, gt=0)
    early_stop_patience: int = Field(default=10, gt=0)
    seed: int = 0
    reg: RegSpec = RegSpec()

    @model_validator(mode="after")
    def _check_patience(self) -> "TrainConfig":
        if self.early_stop_patience >= self.max_epochs:
            raise ValueError(
                f"early_stop_patience ({self.early_stop_patience}) must be < "
                f"max_epochs ({self.max_epochs})"
            )
        return self


def parse_arch_config(raw: Union[str, dict]) -> ArchConfig:
    """Validate an architecture from JSON text or a mapping."""
    try:
        if isinstance(raw, str):
            return ArchConfig.model_validate_json(raw)
        return ArchConfig.model_validate(raw)
    except ValidationError as e:
        raise InvalidConfigError(str(e)) from e
