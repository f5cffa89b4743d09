import hashlib
import json
from typing import Dict, Iterable, List, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from floodcast.errors import (
    DegenerateFeatureError,
    EmptyInputError,
    IncompleteFeaturesError,
    ScalerMismatchError,
)

from .feature_table import EventFeatureTable, Feature

DEGENERATE_STD = 1e-12


class Scaler(BaseModel):
    """Standard scaling fitted on training rows only.

    The target column is never scaled.
    """

    model_config = ConfigDict(frozen=True)

    features: List[Feature]
    mean: Dict[Feature, float]
    std: Dict[Feature, float]

    @model_validator(mode="after")
    def _check(self) -> "Scaler":
        for feature in self.features:
            if feature not in self.mean or feature not in self.std:
                raise ValueError(f"no statistics for {feature.value}")
            if not self.std[feature] > 0:
                raise ValueError(f"std of {feature.value} must be > 0")
        return self

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()[:16]

    def to_json(self) -> str:
        """``{feature: {mean, std}}``, the persisted layout."""
        return json.dumps(
            {
                f.value: {"mean": self.mean[f], "std": self.std[f]}
                for f in self.features
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "Scaler":
        raw = json.loads(text)
        features = [Feature(name) for name in raw]
        return cls(
            features=features,
            mean={f: float(raw[f.value]["mean"]) for f in features},
            std={f: float(raw[f.value]["std"]) for f in features},
        )

    def transform(self, feature: Feature, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        return (values - self.mean[feature]) / self.std[feature]

    def inverse_transform(
        self, feature: Feature, values: np.ndarray
    ) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        return values * self.std[feature] + self.mean[feature]


def fit_scaler(
    tables: Iterable[EventFeatureTable], feature_set: Sequence[Feature]
) -> Scaler:
    """Fit mean and (population) standard deviation of ``feature_set``."""
    tables = list(tables)
    features = [Feature(f) for f in feature_set]
    if not tables or sum(len(t.frame) for t in tables) == 0:
        raise EmptyInputError("cannot fit a scaler without training rows")
    mean: Dict[Feature, float] = {}
    std: Dict[Feature, float] = {}
    for feature in features:
        for table in tables:
            if table.is_scaled:
                raise ScalerMismatchError(
                    f"event {table.event_id} is already scaled"
                )
            table.require([feature.column])
        values = np.concatenate(
            [t.frame[feature.column].to_numpy(dtype=float) for t in tables]
        )
        mu = float(values.mean())
        sigma = float(values.std())
        if sigma <= DEGENERATE_STD * max(1.0, abs(mu)):
            raise DegenerateFeatureError(
                f"{feature.value} is constant over the training rows"
            )
        mean[feature] = mu
        std[feature] = sigma
    return Scaler(features=features, mean=mean, std=std)


def apply_scaler(scaler: Scaler, table: EventFeatureTable) -> EventFeatureTable:
    """Scale the fitted features of ``table``; other columns are unchanged."""
    if table.is_scaled:
        raise ScalerMismatchError(f"event {table.event_id} is already scaled")
    missing = [f.value for f in scaler.features if not table.has(f)]
    if missing:
        raise IncompleteFeaturesError(
            f"event {table.event_id}: missing features {missing}"
        )
    frame = table.frame.copy()
    for feature in scaler.features:
        frame[feature.column] = scaler.transform(feature, frame[feature.column])
    return table.with_frame(frame, scaler_digest=scaler.digest)


def invert_scaler(scaler: Scaler, table: EventFeatureTable) -> EventFeatureTable:
    if table.scaler_digest != scaler.digest:
        raise ScalerMismatchError(
            f"event {table.event_id} was not scaled by this scaler"
        )
    frame = table.frame.copy()
    for feature in scaler.features:
        frame[feature.column] = scaler.inverse_transform(
            feature, frame[feature.column]
        )
    return table.with_frame(frame, scaler_digest=None)
