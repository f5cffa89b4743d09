"""Leave-one-event-out rotation over the training events."""
from typing import Iterable, List, Sequence

from pydantic import BaseModel, ConfigDict, model_validator

from floodcast.data_store import RainfallEvent
from floodcast.errors import OverlappingSplitsError, SplitTooSmallError


class Fold(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    train_event_ids: List[str]
    validation_event_id: str

    @property
    def name(self) -> str:
        return f"fold{self.index:02d}-{self.validation_event_id}"


class SplitPlan(BaseModel):
    """Every training event is the validation event of exactly one fold."""

    model_config = ConfigDict(frozen=True)

    folds: List[Fold]
    test_event_ids: List[str]

    @model_validator(mode="after")
    def _check(self) -> "SplitPlan":
        validation = [f.validation_event_id for f in self.folds]
        if len(set(validation)) != len(validation):
            raise ValueError("an event validates more than one fold")
        test = set(self.test_event_ids)
        for fold in self.folds:
            used = set(fold.train_event_ids) | {fold.validation_event_id}
            if used & test:
                raise ValueError(f"fold {fold.index} uses test events {used & test}")
            if fold.validation_event_id in fold.train_event_ids:
                raise ValueError(f"fold {fold.index} trains on its validation event")
        return self

    @property
    def train_event_ids(self) -> List[str]:
        return [f.validation_event_id for f in self.folds]

    def fold(self, validation_event_id: str) -> Fold:
        for fold in self.folds:
            if fold.validation_event_id == validation_event_id:
                return fold
        raise KeyError(validation_event_id)


def loeo_splits(
    train_events: Sequence[str], test_events: Sequence[str]
) -> SplitPlan:
    """One fold per training event, validated on it and trained on the others."""
    train = list(dict.fromkeys(train_events))
    test = list(dict.fromkeys(test_events))
    overlap = sorted(set(train) & set(test))
    if overlap:
        raise OverlappingSplitsError(f"events {overlap} are both train and test")
    if len(train) < 2:
        raise SplitTooSmallError(
            f"at least two training events are needed, got {len(train)}"
        )
    folds = [
        Fold(
            index=k,
            train_event_ids=[e for e in train if e != held_out],
            validation_event_id=held_out,
        )
        for k, held_out in enumerate(train)
    ]
    return SplitPlan(folds=folds, test_event_ids=test)


def plan_for_events(events: Iterable[RainfallEvent], look_back: int) -> SplitPlan:
    """The rotation over the events long enough for ``look_back``."""
    usable = [e for e in events if e.usable_for(look_back)]
    return loeo_splits(
        [e.event_id for e in usable if e.split == "train"],
        [e.event_id for e in usable if e.split == "test"],
    )
