"""MAE and RMSE of depth predictions, and their averaging over events and folds."""
import math
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from floodcast.errors import (
    EmptyInputError,
    InvalidConfigError,
    LengthMismatchError,
    MissingFoldModelError,
)
from floodcast.model import TrainedModel, predict
from floodcast.windowing import SampleBatch, SplitPlan

# Rounding slack on ``rmse >= mae``
_SLACK = 1e-12


def compute_metrics(pred: np.ndarray, target: np.ndarray) -> Tuple[float, float]:
    """``(mae_m, rmse_m)`` of aligned depth vectors."""
    pred = np.asarray(pred, dtype=float).reshape(-1)
    target = np.asarray(target, dtype=float).reshape(-1)
    if pred.size == 0:
        raise EmptyInputError("no predictions to score")
    if pred.shape != target.shape:
        raise LengthMismatchError(
            f"{pred.size} predictions for {target.size} targets"
        )
    err = pred - target
    mae = float(np.abs(err).mean())
    rmse = float(np.sqrt(np.mean(err * err)))
    return mae, max(rmse, mae)


class EventScore(BaseModel):
    model_config = ConfigDict(frozen=True)

    event_id: str
    mae_m: float = Field(ge=0)
    rmse_m: float = Field(ge=0)
    n_samples: int = Field(gt=0)

    @model_validator(mode="after")
    def _check(self) -> "EventScore":
        if self.rmse_m + _SLACK < self.mae_m:
            raise ValueError(f"rmse {self.rmse_m} below mae {self.mae_m}")
        return self


class FoldScores(BaseModel):
    """Test scores of the model trained with one validation event held out."""

    model_config = ConfigDict(frozen=True)

    fold: int
    validation_event_id: str
    events: List[EventScore]

    def aggregate(self, pooled: bool = False) -> Tuple[float, float]:
        if not self.events:
            raise EmptyInputError(f"fold {self.fold} has no test scores")
        if not pooled:
            return (
                float(np.mean([e.mae_m for e in self.events])),
                float(np.mean([e.rmse_m for e in self.events])),
            )
        n = np.array([e.n_samples for e in self.events], dtype=float)
        mae = np.array([e.mae_m for e in self.events])
        rmse = np.array([e.rmse_m for e in self.events])
        return (
            float((n * mae).sum() / n.sum()),
            float(math.sqrt((n * rmse**2).sum() / n.sum())),
        )


class MetricsReport(BaseModel):
    """Scores of one model variant over the whole rotation.

    The aggregate averages over test events inside each fold, then over folds.
    With ``pooled`` the events of a fold are pooled sample-wise instead.
    """

    model_config = ConfigDict(frozen=True)

    variant: str
    rnn_type: str = "n/a"
    include_max15: Optional[bool] = None
    look_back: int
    folds: List[FoldScores]
    pooled: bool = False

    @property
    def mae_m(self) -> float:
        return float(np.mean([f.aggregate(self.pooled)[0] for f in self.folds]))

    @property
    def rmse_m(self) -> float:
        return float(np.mean([f.aggregate(self.pooled)[1] for f in self.folds]))

    def event_means(self) -> Dict[str, Tuple[float, float]]:
        """Per test event ``(mae_m, rmse_m)`` averaged over folds."""
        scores: Dict[str, List[EventScore]] = {}
        for fold in self.folds:
            for event in fold.events:
                scores.setdefault(event.event_id, []).append(event)
        return {
            event_id: (
                float(np.mean([s.mae_m for s in items])),
                float(np.mean([s.rmse_m for s in items])),
            )
            for event_id, items in scores.items()
        }


def score_events(
    trained: TrainedModel, tests: Mapping[str, SampleBatch]
) -> List[EventScore]:
    """Unclamped predictions of ``trained`` scored event by event."""
    scores = []
    for event_id, batch in tests.items():
        mae, rmse = compute_metrics(
            predict(trained, batch, mode="metric"), batch.require_targets()
        )
        scores.append(
            EventScore(event_id=event_id, mae_m=mae, rmse_m=rmse, n_samples=len(batch))
        )
    return scores


def evaluate_protocol(
    plan: SplitPlan,
    models: Mapping[str, TrainedModel],
    tests: Mapping[str, Mapping[str, SampleBatch]],
    variant: Optional[str] = None,
    pooled: bool = False,
) -> MetricsReport:
    """Score the fold models of one variant on the test events.

    ``models`` and ``tests`` are keyed by the validation event of each fold;
    the test batches of a fold must have been scaled with that fold's scaler.
    """
    missing = [f.name for f in plan.folds if f.validation_event_id not in models]
    if missing:
        raise MissingFoldModelError(f"no trained model for folds {missing}")
    configs = {models[f.validation_event_id].config for f in plan.folds}
    if len(configs) != 1:
        raise InvalidConfigError("the fold models do not share one architecture")
    config = configs.pop()
    folds = []
    for fold in plan.folds:
        batches = tests[fold.validation_event_id]
        batches = {e: batches[e] for e in plan.test_event_ids if e in batches}
        if not batches:
            raise EmptyInputError(f"{fold.name}: no test samples")
        folds.append(
            FoldScores(
                fold=fold.index,
                validation_event_id=fold.validation_event_id,
                events=score_events(models[fold.validation_event_id], batches),
            )
        )
    label = variant_name(config.rnn_type, config.include_max15, config.look_back)
    return MetricsReport(
        variant=variant or label,
        rnn_type=config.rnn_type,
        include_max15=config.include_max15,
        look_back=config.look_back,
        folds=folds,
        pooled=pooled,
    )


def variant_name(rnn_type: str, include_max15: bool, look_back: int) -> str:
    """``GRU-max15-L4`` style label."""
    return f"{rnn_type}-{'max15' if include_max15 else 'nomax15'}-L{look_back}"
