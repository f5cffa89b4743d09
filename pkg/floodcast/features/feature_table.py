from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from floodcast.errors import IncompleteFeaturesError


class Feature(str, Enum):
    """The eight model inputs."""

    RH = "RH"
    MAX15 = "MAX15"
    HR_2 = "HR_2"
    HR_72 = "HR_72"
    TD_HR = "TD_HR"
    ELV = "ELV"
    TWI = "TWI"
    DTW = "DTW"

    @property
    def column(self) -> str:
        return FEATURE_COLUMNS[self]


FEATURE_COLUMNS: Dict[Feature, str] = {
    Feature.RH: "rh_mm",
    Feature.MAX15: "max15_mm",
    Feature.HR_2: "hr2_mm",
    Feature.HR_72: "hr72_mm",
    Feature.TD_HR: "td_hr_m",
    Feature.ELV: "elv_m",
    Feature.TWI: "twi",
    Feature.DTW: "dtw_cm",
}
RAINFALL_FEATURES = [Feature.RH, Feature.MAX15, Feature.HR_2, Feature.HR_72]
SPATIAL_FEATURES = [Feature.ELV, Feature.TWI, Feature.DTW]
ALL_FEATURES = list(Feature)
TARGET_COLUMN = "depth_m"
KEY_COLUMNS = ["segment_id", "timestamp", "hour"]


def temporal_features(include_max15: bool) -> List[Feature]:
    """Inputs of the recurrent branch, MAX15 only when requested."""
    if include_max15:
        return [Feature.RH, Feature.MAX15, Feature.HR_2, Feature.HR_72, Feature.TD_HR]
    return [Feature.RH, Feature.HR_2, Feature.HR_72, Feature.TD_HR]


@dataclass(frozen=True)
class EventFeatureTable:
    """Per (segment, hour) features of one event.

    ``frame`` is sorted by ``segment_id`` then ``timestamp`` and holds the
    complete segment x hour grid, so every column reshapes to
    ``[n_segments, n_hours]``.
    """

    event_id: str
    frame: pd.DataFrame
    scaler_digest: Optional[str] = None

    @property
    def segment_ids(self) -> np.ndarray:
        return np.unique(self.frame["segment_id"].to_numpy())

    @property
    def timestamps(self) -> pd.DatetimeIndex:
        return pd.DatetimeIndex(np.unique(self.frame["timestamp"].to_numpy()))

    @property
    def n_hours(self) -> int:
        return len(self.timestamps)

    @property
    def has_target(self) -> bool:
        return TARGET_COLUMN in self.frame.columns

    @property
    def is_scaled(self) -> bool:
        return self.scaler_digest is not None

    def has(self, feature: Feature) -> bool:
        return feature.column in self.frame.columns

    def grid(self, column: str) -> np.ndarray:
        """Values of ``column`` as a ``[n_segments, n_hours]`` array."""
        if column not in self.frame.columns:
            raise IncompleteFeaturesError(
                f"event {self.event_id}: column {column!r} is missing"
            )
        n_segments = len(self.segment_ids)
        n_hours = self.n_hours
        if n_segments * n_hours != len(self.frame):
            raise IncompleteFeaturesError(
                f"event {self.event_id}: {len(self.frame)} rows do not form a "
                f"{n_segments} x {n_hours} grid"
            )
        return self.frame[column].to_numpy(dtype=float).reshape(n_segments, n_hours)

    def require(self, columns: List[str]) -> None:
        missing = [c for c in columns if c not in self.frame.columns]
        if missing:
            raise IncompleteFeaturesError(
                f"event {self.event_id}: missing columns {missing}"
            )
        if self.frame[columns].isna().to_numpy().any():
            raise IncompleteFeaturesError(
                f"event {self.event_id}: empty cells in {columns}"
            )

    def chain_violations(self) -> int:
        """Rows breaking 0 <= MAX15 <= RH <= HR_2 <= HR_72."""
        f = self.frame
        ok = (
            (f["max15_mm"] >= 0)
            & (f["max15_mm"] <= f["rh_mm"])
            & (f["rh_mm"] <= f["hr2_mm"])
            & (f["hr2_mm"] <= f["hr72_mm"])
        )
        return int((~ok).sum())

    def restrict(self, segment_ids: List[int]) -> "EventFeatureTable":
        mask = self.frame["segment_id"].isin(segment_ids)
        return replace(self, frame=self.frame.loc[mask].reset_index(drop=True))

    def with_frame(self, frame: pd.DataFrame, **changes: object) -> "EventFeatureTable":
        return replace(self, frame=frame, **changes)  # type: ignore[arg-type]
