import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from floodcast.errors import (
    EmptyBatchError,
    InvalidConfigError,
    IoFailureError,
    MissingFileError,
    NonFiniteLossError,
    ScalerMismatchError,
    ShapeMismatchError,
)
from floodcast.features import Scaler
from floodcast.neuralnet import (
    MODEL_FORMAT_VERSION,
    NadamState,
    layers_from_list,
    layers_to_list,
    nadam_step,
)
from floodcast.windowing import SampleBatch

from .config import ArchConfig, TrainConfig, parse_arch_config
from .network import TwoBranchModel

logger = logging.getLogger(__name__)

PREDICT_CHUNK = 4096


class EpochRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    epoch: int
    train_mae: float
    val_mae: float


@dataclass
class TrainedModel:
    """A model restored to its best validation epoch."""

    config: ArchConfig
    model: TwoBranchModel
    history: List[EpochRecord]
    best_epoch: int
    train_config: TrainConfig = field(default_factory=TrainConfig)
    scaler: Optional[Scaler] = None
    scaler_digest: Optional[str] = None

    @property
    def best_val_mae(self) -> float:
        return self.history[self.best_epoch].val_mae

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": MODEL_FORMAT_VERSION,
            "arch": self.config.model_dump(mode="json"),
            "train": self.train_config.model_dump(mode="json"),
            "layers": layers_to_list([layer for _, layer in self.model.layers]),
            "scaler": (
                None if self.scaler is None else json.loads(self.scaler.to_json())
            ),
            "scaler_digest": self.scaler_digest,
            "history": [h.model_dump() for h in self.history],
            "best_epoch": self.best_epoch,
        }

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "TrainedModel":
        if raw.get("version") != MODEL_FORMAT_VERSION:
            raise InvalidConfigError(
                f"unsupported model version {raw.get('version')!r}"
            )
        config = parse_arch_config(raw["arch"])
        try:
            train_config = TrainConfig.model_validate(raw["train"])
        except ValidationError as e:
            raise InvalidConfigError(str(e)) from e
        layers = layers_from_list(raw["layers"])
        n_rnn, n_spatial = config.rnn_layers, config.spatial_layers
        model = TwoBranchModel(
            config,
            temporal=layers[:n_rnn],  # type: ignore[arg-type]
            spatial=layers[n_rnn : n_rnn + n_spatial],  # type: ignore[arg-type]
            head=layers[n_rnn + n_spatial :],  # type: ignore[arg-type]
            reg=train_config.reg,
        )
        scaler = None
        if raw["scaler"] is not None:
            scaler = Scaler.from_json(json.dumps(raw["scaler"]))
        return cls(
            config=config,
            model=model,
            history=[EpochRecord.model_validate(h) for h in raw["history"]],
            best_epoch=int(raw["best_epoch"]),
            train_config=train_config,
            scaler=scaler,
            scaler_digest=raw.get("scaler_digest"),
        )

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(self.to_dict()) + "\n")
        except OSError as e:
            raise IoFailureError(f"cannot write {path}: {e}") from e
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "TrainedModel":
        path = Path(path)
        if not path.is_file():
            raise MissingFileError(f"no model file {path}")
        return cls.from_dict(json.loads(path.read_text()))


def _check_batch(config: ArchConfig, batch: SampleBatch, name: str) -> None:
    if len(batch) == 0:
        raise EmptyBatchError(f"the {name} batch is empty")
    if batch.look_back != config.look_back:
        raise ShapeMismatchError(
            f"{name} batch look-back {batch.look_back} != {config.look_back}"
        )
    if batch.temporal.shape[2] != config.temporal_width:
        raise ShapeMismatchError(
            f"{name} batch has {batch.temporal.shape[2]} temporal features, "
            f"the model expects {config.temporal_width}"
        )


def _mae(model: TwoBranchModel, batch: SampleBatch) -> float:
    pred = _predict_chunks(model, batch)
    return float(np.abs(pred - batch.require_targets()).mean())


def _predict_chunks(model: TwoBranchModel, batch: SampleBatch) -> np.ndarray:
    parts = [
        model.predict_raw(
            batch.temporal[k : k + PREDICT_CHUNK], batch.spatial[k : k + PREDICT_CHUNK]
        )
        for k in range(0, len(batch), PREDICT_CHUNK)
    ]
    return np.concatenate(parts)


def train(
    model: TwoBranchModel,
    train_batch: SampleBatch,
    val_batch: SampleBatch,
    tc: Optional[TrainConfig] = None,
    scaler: Optional[Scaler] = None,
) -> TrainedModel:
    """Minibatch Nadam on MAE plus penalty, with early stopping.

    The sample order is reshuffled every epoch from a stream seeded by
    ``tc.seed``. The parameters of the epoch with the lowest validation MAE
    are restored at the end.
    """
    tc = tc or TrainConfig()
    config = model.config
    _check_batch(config, train_batch, "training")
    _check_batch(config, val_batch, "validation")
    if train_batch.scaler_digest != val_batch.scaler_digest:
        raise ScalerMismatchError("training and validation batches differ in scaling")
    if scaler is not None and scaler.digest != train_batch.scaler_digest:
        raise ScalerMismatchError("the batches were not scaled by the given scaler")
    train_batch.require_targets()
    val_batch.require_targets()
    model.reg = tc.reg

    rng = np.random.default_rng(tc.seed)
    params = {k: v.copy() for k, v in model.parameters().items()}
    model.set_parameters(params)
    state = NadamState.zeros_like(
        params, lr=tc.lr, beta1=tc.beta1, beta2=tc.beta2, eps=tc.eps
    )
    history: List[EpochRecord] = []
    best_epoch, best_val = 0, math.inf
    best_params = params
    n = len(train_batch)
    for epoch in range(tc.max_epochs):
        order = rng.permutation(n)
        for k, start in enumerate(range(0, n, tc.batch_size)):
            batch = train_batch.take(order[start : start + tc.batch_size])
            loss, grads = model.loss_and_grads(batch)
            if not math.isfinite(loss) or not all(
                np.isfinite(g).all() for g in grads.values()
            ):
                raise NonFiniteLossError(
                    f"non-finite loss {loss} at epoch {epoch}, minibatch {k} "
                    f"({config.rnn_type}, lr={tc.lr})"
                )
            params, state = nadam_step(params, grads, state)
            model.set_parameters(params)
        record = EpochRecord(
            epoch=epoch,
            train_mae=_mae(model, train_batch),
            val_mae=_mae(model, val_batch),
        )
        history.append(record)
        logger.debug(
            "epoch %d: train MAE %.5f m, val MAE %.5f m",
            epoch,
            record.train_mae,
            record.val_mae,
        )
        if record.val_mae < best_val:
            best_epoch, best_val, best_params = epoch, record.val_mae, params
        elif epoch - best_epoch >= tc.early_stop_patience:
            logger.debug("Early stop at epoch %d (best %d)", epoch, best_epoch)
            break
    model.set_parameters(best_params)
    return TrainedModel(
        config=config,
        model=model,
        history=history,
        best_epoch=best_epoch,
        train_config=tc,
        scaler=scaler,
        scaler_digest=train_batch.scaler_digest,
    )


def predict(
    trained: TrainedModel,
    batch: SampleBatch,
    mode: Literal["metric", "report"] = "metric",
) -> np.ndarray:
    """Depths in meters, one per sample.

    ``metric`` returns the raw regression output; ``report`` clamps it at 0 m.
    """
    if batch.scaler_digest != trained.scaler_digest:
        raise ScalerMismatchError(
            "the batch was not scaled with the scaler of the model"
        )
    _check_batch(trained.config, batch, "prediction")
    depths = _predict_chunks(trained.model, batch)
    if mode == "report":
        return np.maximum(depths, 0.0)
    if mode != "metric":
        raise InvalidConfigError(f"unknown prediction mode {mode!r}")
    return depths
