"""The architecture search space and its named presets."""
import hashlib
import itertools
import json
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, field_validator

from floodcast.errors import UnknownPresetError
from floodcast.model import (
    ACTIVATION_OPTIONS,
    CHAMPION,
    HEAD_OPTIONS,
    LOOK_BACK_OPTIONS,
    RNN_LAYER_OPTIONS,
    RNN_UNIT_OPTIONS,
    SPATIAL_LAYER_OPTIONS,
    SPATIAL_UNIT_OPTIONS,
    ArchConfig,
    TrainConfig,
    parse_arch_config,
)
from floodcast.model.config import DenseActivation
from floodcast.windowing import SplitPlan

HeadAct = Union[DenseActivation, Tuple[DenseActivation, ...]]

# Enumeration order, outermost first
GRID_AXES = (
    "rnn_type",
    "include_max15",
    "look_back",
    "rnn_layers",
    "rnn_units",
    "spatial_layers",
    "spatial_units",
    "spatial_act",
    "head_units",
    "head_act",
)


class GridSpec(BaseModel):
    """Option sets of every architecture axis.

    A per-layer ``head_acts`` entry only combines with the ``head_units`` of
    the same depth.
    """

    model_config = ConfigDict(frozen=True)

    rnn_types: Tuple[Literal["LSTM", "GRU"], ...] = ("LSTM",)
    rnn_layers: Tuple[int, ...] = RNN_LAYER_OPTIONS
    rnn_units: Tuple[int, ...] = RNN_UNIT_OPTIONS
    spatial_layers: Tuple[int, ...] = SPATIAL_LAYER_OPTIONS
    spatial_units: Tuple[int, ...] = SPATIAL_UNIT_OPTIONS
    spatial_acts: Tuple[DenseActivation, ...] = ACTIVATION_OPTIONS
    head_units: Tuple[Tuple[int, ...], ...] = HEAD_OPTIONS
    head_acts: Tuple[HeadAct, ...] = ACTIVATION_OPTIONS
    look_backs: Tuple[int, ...] = (4,)
    max15: Tuple[bool, ...] = (True,)

    @field_validator("*", mode="before")
    @classmethod
    def _tuples(cls, value: Any) -> Any:
        if isinstance(value, list):
            return tuple(tuple(v) if isinstance(v, list) else v for v in value)
        return value

    @field_validator("*")
    @classmethod
    def _nonempty(cls, value: Tuple[Any, ...]) -> Tuple[Any, ...]:
        if not value:
            raise ValueError("every option set needs at least one value")
        return value

    @field_validator("look_backs")
    @classmethod
    def _look_backs(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        bad = [v for v in value if v not in LOOK_BACK_OPTIONS]
        if bad:
            raise ValueError(f"look-back must be one of {LOOK_BACK_OPTIONS}: {bad}")
        return value

    @property
    def size(self) -> int:
        return len(enumerate_grid(self))


PRESETS: Dict[str, GridSpec] = {
    # every option of the search table, one cell type and look-back
    "full": GridSpec(),
    "mini": GridSpec(
        rnn_layers=(1, 2),
        rnn_units=(12, 20),
        spatial_layers=(2,),
        spatial_units=(4,),
        spatial_acts=("selu",),
        head_units=((64, 64, 16, 1), (32, 16, 1)),
        head_acts=("selu", "relu", "linear"),
    ),
    "champion": GridSpec(
        rnn_types=(CHAMPION.rnn_type,),
        rnn_layers=(CHAMPION.rnn_layers,),
        rnn_units=(CHAMPION.rnn_units,),
        spatial_layers=(CHAMPION.spatial_layers,),
        spatial_units=(CHAMPION.spatial_units,),
        spatial_acts=(CHAMPION.spatial_act,),
        head_units=(CHAMPION.head_units,),
        head_acts=(CHAMPION.head_act,),
        look_backs=(CHAMPION.look_back,),
        max15=(CHAMPION.include_max15,),
    ),
}


def grid_preset(name: str) -> GridSpec:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPresetError(
            f"unknown grid preset {name!r}, expected one of {sorted(PRESETS)}"
        ) from None


def enumerate_grid(spec: GridSpec) -> List[ArchConfig]:
    """Cartesian product in lexicographic order of the option indices."""
    configs = []
    for values in itertools.product(
        spec.rnn_types,
        spec.max15,
        spec.look_backs,
        spec.rnn_layers,
        spec.rnn_units,
        spec.spatial_layers,
        spec.spatial_units,
        spec.spatial_acts,
        spec.head_units,
        spec.head_acts,
    ):
        fields = dict(zip(GRID_AXES, values))
        head_act = fields["head_act"]
        if isinstance(head_act, tuple) and len(head_act) != len(fields["head_units"]):
            continue
        configs.append(parse_arch_config(fields))
    return configs


def run_id(
    config: ArchConfig,
    tc: Optional[TrainConfig] = None,
    plan: Optional[SplitPlan] = None,
) -> str:
    """Stable id of one search run: readable prefix plus a content hash."""
    tc = tc or TrainConfig()
    payload: Dict[str, Any] = {
        "arch": config.model_dump(mode="json"),
        "train": tc.model_dump(mode="json"),
    }
    if plan is not None:
        payload["validation"] = plan.train_event_ids
        payload["test"] = plan.test_event_ids
    digest = hashlib.sha256(
        json.dumps(payload, sort_keys=True).encode()
    ).hexdigest()[:10]
    return f"{config.rnn_type.lower()}-{config.rnn_layers}x{config.rnn_units}-{digest}"
