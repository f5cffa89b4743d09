import pytest
from pydantic import ValidationError

from floodcast.errors import InvalidConfigError, UnknownPresetError
from floodcast.model import CHAMPION, TrainConfig
from floodcast.nas import GridSpec, enumerate_grid, grid_preset, run_id
from floodcast.windowing import loeo_splits


def test_preset_sizes() -> None:
    assert len(enumerate_grid(grid_preset("full"))) == 1080
    assert grid_preset("mini").size == 24
    assert enumerate_grid(grid_preset("champion")) == [CHAMPION]
    with pytest.raises(UnknownPresetError):
        grid_preset("huge")


def test_grid_order_is_lexicographic() -> None:
    spec = GridSpec(
        rnn_types=("LSTM", "GRU"),
        rnn_layers=(1, 2),
        rnn_units=(12,),
        spatial_layers=(2,),
        spatial_units=(4,),
        spatial_acts=("selu",),
        head_units=((32, 16, 1),),
        head_acts=("relu",),
    )
    configs = enumerate_grid(spec)
    assert [(c.rnn_type, c.rnn_layers) for c in configs] == [
        ("LSTM", 1),
        ("LSTM", 2),
        ("GRU", 1),
        ("GRU", 2),
    ]
    assert enumerate_grid(spec) == configs


def test_per_layer_head_activations_match_depth() -> None:
    spec = GridSpec(
        rnn_layers=(1,),
        rnn_units=(20,),
        spatial_layers=(2,),
        spatial_units=(4,),
        spatial_acts=("selu",),
        head_units=((64, 64, 16, 1), (32, 16, 1)),
        head_acts=("selu", ("linear", "selu", "selu", "selu")),
    )
    configs = enumerate_grid(spec)
    assert len(configs) == 3
    assert configs[1].head_activations == ["linear", "selu", "selu", "selu"]


def test_grid_from_json_lists() -> None:
    spec = GridSpec.model_validate({"head_units": [[32, 16, 1]], "look_backs": [1]})
    assert spec.head_units == ((32, 16, 1),)
    with pytest.raises(ValidationError):
        GridSpec(look_backs=(2,))
    with pytest.raises(ValidationError):
        GridSpec(rnn_units=())


def test_grid_entry_outside_the_domain() -> None:
    with pytest.raises(InvalidConfigError, match="rnn_units"):
        enumerate_grid(GridSpec(rnn_units=(7,)))


def test_run_id_is_stable() -> None:
    rid = run_id(CHAMPION)
    assert rid == run_id(CHAMPION.model_copy())
    assert rid.startswith("gru-1x20-")
    assert rid != run_id(CHAMPION.with_variant(look_back=1))
    assert rid != run_id(CHAMPION, TrainConfig(seed=1))
    plan = loeo_splits(["A", "B"], ["C"])
    assert rid != run_id(CHAMPION, plan=plan)
