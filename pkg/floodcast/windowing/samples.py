"""Look-back windows over event tables.

The sample of hour ``t`` sees the temporal features of hours ``t - L`` to
``t - 1`` and predicts the depth at ``t``: the first ``L`` hours of an event
yield no sample, and no window ever reaches into another event.
"""
import logging
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from floodcast.errors import (
    EmptyBatchError,
    EventTooShortError,
    InvalidConfigError,
    ScalerMismatchError,
    ShapeMismatchError,
)
from floodcast.features import (
    SPATIAL_FEATURES,
    TARGET_COLUMN,
    EventFeatureTable,
    Feature,
    temporal_features,
)

logger = logging.getLogger(__name__)

INDEX_COLUMNS = ["event_id", "segment_id", "hour", "timestamp"]


@dataclass(frozen=True)
class SampleBatch:
    """Aligned model inputs and targets.

    temporal  ``[samples, look_back, n_temporal]``
    spatial   ``[samples, 3]`` (ELV, TWI, DTW)
    targets   ``[samples]`` in meters, ``None`` when the depths are unknown
    index     one ``(event_id, segment_id, hour, timestamp)`` row per sample
    """

    temporal: np.ndarray
    spatial: np.ndarray
    targets: Optional[np.ndarray]
    index: pd.DataFrame
    look_back: int
    features: List[Feature]
    scaler_digest: Optional[str] = None

    def __post_init__(self) -> None:
        n = self.temporal.shape[0]
        if self.temporal.ndim != 3 or self.temporal.shape[1] != self.look_back:
            raise ShapeMismatchError(
                f"temporal must be [n, {self.look_back}, f], "
                f"got {self.temporal.shape}"
            )
        if self.temporal.shape[2] != len(self.features):
            raise ShapeMismatchError(
                f"{len(self.features)} features for a temporal width of "
                f"{self.temporal.shape[2]}"
            )
        if self.spatial.shape != (n, len(SPATIAL_FEATURES)):
            raise ShapeMismatchError(
                f"spatial must be [{n}, 3], got {self.spatial.shape}"
            )
        if self.targets is not None and self.targets.shape != (n,):
            raise ShapeMismatchError(f"targets must be [{n}], got {self.targets.shape}")
        if len(self.index) != n:
            raise ShapeMismatchError(f"index has {len(self.index)} rows, expected {n}")

    def __len__(self) -> int:
        return self.temporal.shape[0]

    @property
    def include_max15(self) -> bool:
        return Feature.MAX15 in self.features

    @property
    def event_ids(self) -> List[str]:
        return list(dict.fromkeys(self.index["event_id"]))

    def require_targets(self) -> np.ndarray:
        if self.targets is None:
            raise ShapeMismatchError("the batch carries no target depths")
        return self.targets

    def take(self, rows: np.ndarray) -> "SampleBatch":
        """The samples at ``rows``, every array reordered identically."""
        return replace(
            self,
            temporal=self.temporal[rows],
            spatial=self.spatial[rows],
            targets=None if self.targets is None else self.targets[rows],
            index=self.index.iloc[rows].reset_index(drop=True),
        )

    def shuffled(self, rng: np.random.Generator) -> "SampleBatch":
        return self.take(rng.permutation(len(self)))

    def for_event(self, event_id: str) -> "SampleBatch":
        return self.take(np.flatnonzero(self.index["event_id"].to_numpy() == event_id))

    @classmethod
    def concat(cls, batches: Sequence["SampleBatch"]) -> "SampleBatch":
        if not batches:
            raise EmptyBatchError("nothing to concatenate")
        first = batches[0]
        for batch in batches[1:]:
            if (batch.look_back, batch.features) != (first.look_back, first.features):
                raise ShapeMismatchError(
                    "batches differ in look-back or temporal features"
                )
            if batch.scaler_digest != first.scaler_digest:
                raise ScalerMismatchError("batches were scaled differently")
        with_targets = [b.targets is not None for b in batches]
        return cls(
            temporal=np.concatenate([b.temporal for b in batches]),
            spatial=np.concatenate([b.spatial for b in batches]),
            targets=(
                np.concatenate([b.targets for b in batches])  # type: ignore[misc]
                if all(with_targets)
                else None
            ),
            index=pd.concat([b.index for b in batches], ignore_index=True),
            look_back=first.look_back,
            features=list(first.features),
            scaler_digest=first.scaler_digest,
        )


def build_samples(
    table: EventFeatureTable, look_back: int, include_max15: bool
) -> SampleBatch:
    """Every look-back window of one event, segment by segment."""
    if look_back < 1:
        raise InvalidConfigError(f"look_back must be >= 1, got {look_back}")
    n_hours = table.n_hours
    if n_hours <= look_back:
        raise EventTooShortError(
            f"event {table.event_id} lasts {n_hours} h, look-back is {look_back} h"
        )
    features = temporal_features(include_max15)
    columns = [f.column for f in features + SPATIAL_FEATURES]
    table.require(columns)

    # [segments, hours, features]
    series = np.stack([table.grid(f.column) for f in features], axis=-1)
    # [segments, windows, features, look_back]
    windows = np.lib.stride_tricks.sliding_window_view(series, look_back, axis=1)
    windows = windows[:, : n_hours - look_back]
    n_segments, n_windows = windows.shape[:2]
    temporal = np.ascontiguousarray(
        windows.transpose(0, 1, 3, 2).reshape(n_segments * n_windows, look_back, -1)
    )

    static = np.stack([table.grid(f.column)[:, 0] for f in SPATIAL_FEATURES], axis=-1)
    spatial = np.repeat(static, n_windows, axis=0)
    targets = None
    if table.has_target:
        table.require([TARGET_COLUMN])
        targets = table.grid(TARGET_COLUMN)[:, look_back:].reshape(-1)

    hours = np.arange(look_back, n_hours)
    stamps = table.timestamps[look_back:]
    index = pd.DataFrame(
        {
            "event_id": table.event_id,
            "segment_id": np.repeat(table.segment_ids, n_windows),
            "hour": np.tile(hours, n_segments),
            "timestamp": np.tile(stamps.to_numpy(), n_segments),
        },
        columns=INDEX_COLUMNS,
    )
    return SampleBatch(
        temporal=temporal,
        spatial=spatial,
        targets=targets,
        index=index,
        look_back=look_back,
        features=features,
        scaler_digest=table.scaler_digest,
    )


def build_batches(
    tables: Iterable[EventFeatureTable], look_back: int, include_max15: bool
) -> Dict[str, SampleBatch]:
    """Samples of each event; events too short for ``look_back`` are skipped."""
    batches = {}
    for table in tables:
        try:
            batches[table.event_id] = build_samples(table, look_back, include_max15)
        except EventTooShortError as e:
            logger.warning("Skipping event %s: %s", table.event_id, e)
    return batches


def merge_batches(
    batches: Mapping[str, SampleBatch], event_ids: Sequence[str]
) -> SampleBatch:
    """One batch holding the samples of ``event_ids``, in that order."""
    missing = [e for e in event_ids if e not in batches]
    if missing:
        raise EmptyBatchError(f"no samples for events {missing}")
    return SampleBatch.concat([batches[e] for e in event_ids])
