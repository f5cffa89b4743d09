"""Lazy transformations of event feature tables.

A step receives event tables one at a time and yields them transformed, so a
long roster flows through a pipeline without every intermediate table being
held in memory. Steps chain with :class:`EventTransformerPipeline`:

.. code-block:: python

    pipeline = EventTransformerPipeline(
        [AttachDepths(depths), RestrictSegments(ids), ApplyScaler(scaler)]
    )
    tables = pipeline.transform_events(raw_tables)
"""
from abc import ABC, abstractmethod
from typing import (
    AsyncIterator,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    TypeVar,
    Union,
)

import pandas as pd

from floodcast.data_store import StreetSegment
from floodcast.errors import CoverageGapError

from .feature_table import TARGET_COLUMN, EventFeatureTable
from .rainfall import attach_static_and_tide
from .scaler import Scaler, apply_scaler

T = TypeVar("T")

Input = Union[
    AsyncIterator[EventFeatureTable],
    Iterator[EventFeatureTable],
    Sequence[EventFeatureTable],
]


async def to_async_iterator(iterator: Iterable[T]) -> AsyncIterator[T]:
    """Convert an iterable to an async iterator."""
    for item in iterator:
        yield item


class EventTransformer(ABC):
    """One step over event tables, usable eagerly, lazily or asynchronously."""

    @abstractmethod
    def transform_event(self, table: EventFeatureTable) -> EventFeatureTable:
        """Transform a single event."""

    def lazy_transform_events(
        self, tables: Iterable[EventFeatureTable]
    ) -> Iterator[EventFeatureTable]:
        for table in tables:
            yield self.transform_event(table)

    def transform_events(
        self, tables: Sequence[EventFeatureTable]
    ) -> List[EventFeatureTable]:
        # Convert lazy to classical transformation
        return list(self.lazy_transform_events(iter(tables)))

    @staticmethod
    def _to_async_iterator(tables: Input) -> AsyncIterator[EventFeatureTable]:
        if isinstance(tables, AsyncIterator):
            return tables
        if isinstance(tables, (Sequence, Iterator)):
            return to_async_iterator(tables)
        raise ValueError("Invalid input type")

    async def alazy_transform_events(
        self, tables: Input
    ) -> AsyncIterator[EventFeatureTable]:
        async for table in self._to_async_iterator(tables):
            yield self.transform_event(table)

    async def atransform_events(
        self, tables: Sequence[EventFeatureTable]
    ) -> List[EventFeatureTable]:
        return [table async for table in self.alazy_transform_events(tables)]


class EventTransformerPipeline(EventTransformer):
    """Event transformers chained together and run in sequence."""

    def __init__(self, transformers: Sequence[EventTransformer]):
        self.transformers = list(transformers)

    def transform_event(self, table: EventFeatureTable) -> EventFeatureTable:
        for transformer in self.transformers:
            table = transformer.transform_event(table)
        return table

    def lazy_transform_events(
        self, tables: Iterable[EventFeatureTable]
    ) -> Iterator[EventFeatureTable]:
        stream: Iterable[EventFeatureTable] = tables
        for transformer in self.transformers:
            stream = transformer.lazy_transform_events(stream)
        return iter(stream)

    async def alazy_transform_events(
        self, tables: Input
    ) -> AsyncIterator[EventFeatureTable]:
        stream = self._to_async_iterator(tables)
        for transformer in self.transformers:
            stream = transformer.alazy_transform_events(stream)
        async for table in stream:
            yield table


class AttachStaticAndTide(EventTransformer):
    """Add TD_HR and the static segment descriptors."""

    def __init__(
        self, segments: Sequence[StreetSegment], tides: Mapping[str, pd.Series]
    ):
        self.segments = list(segments)
        self.tides = tides

    def transform_event(self, table: EventFeatureTable) -> EventFeatureTable:
        if table.event_id not in self.tides:
            raise CoverageGapError(f"no tide series for event {table.event_id}")
        return attach_static_and_tide(
            table, self.segments, self.tides[table.event_id]
        )


class AttachDepths(EventTransformer):
    """Join target depths (``segment_id,timestamp,depth_m`` rows)."""

    def __init__(self, depths: pd.DataFrame):
        self.depths = depths[["segment_id", "timestamp", TARGET_COLUMN]]

    def transform_event(self, table: EventFeatureTable) -> EventFeatureTable:
        frame = table.frame.drop(columns=[TARGET_COLUMN], errors="ignore")
        frame = frame.merge(
            self.depths,
            on=["segment_id", "timestamp"],
            how="left",
            validate="one_to_one",
        )
        missing = int(frame[TARGET_COLUMN].isna().sum())
        if missing:
            raise CoverageGapError(
                f"event {table.event_id}: {missing} rows have no depth"
            )
        return table.with_frame(frame)


class RestrictSegments(EventTransformer):
    """Keep only the given segments (e.g. the flood-prone mini area)."""

    def __init__(self, segment_ids: Optional[Sequence[int]]):
        self.segment_ids = None if segment_ids is None else list(segment_ids)

    def transform_event(self, table: EventFeatureTable) -> EventFeatureTable:
        if self.segment_ids is None:
            return table
        return table.restrict(self.segment_ids)


class ApplyScaler(EventTransformer):
    def __init__(self, scaler: Scaler):
        self.scaler = scaler

    def transform_event(self, table: EventFeatureTable) -> EventFeatureTable:
        return apply_scaler(self.scaler, table)
