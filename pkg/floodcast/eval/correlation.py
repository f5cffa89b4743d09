import logging
from typing import Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from floodcast.data_store import RainfallEvent
from floodcast.errors import InsufficientRowsError
from floodcast.features import ALL_FEATURES, TARGET_COLUMN, EventFeatureTable

logger = logging.getLogger(__name__)

CORRELATION_LABELS = ["depth"] + [f.value for f in ALL_FEATURES]
_COLUMNS = [TARGET_COLUMN] + [f.column for f in ALL_FEATURES]


def correlation_matrix(
    tables: Union[EventFeatureTable, Iterable[EventFeatureTable]],
) -> pd.DataFrame:
    """Pearson correlation of depth and the eight features over all rows.

    A column without variance is undefined: its whole row and column are NaN.
    """
    if isinstance(tables, EventFeatureTable):
        tables = [tables]
    frames = []
    for table in tables:
        table.require(_COLUMNS)
        frames.append(table.frame[_COLUMNS])
    if not frames or sum(len(f) for f in frames) < 2:
        raise InsufficientRowsError("a correlation needs at least two rows")
    data = pd.concat(frames, ignore_index=True).astype(float)
    data.columns = CORRELATION_LABELS
    constant = [c for c in CORRELATION_LABELS if data[c].std(ddof=0) == 0]
    if constant:
        logger.warning("Correlation undefined for constant columns %s", constant)
    corr = data.corr(method="pearson").clip(-1.0, 1.0)
    for label in CORRELATION_LABELS:
        corr.loc[label, label] = np.nan if label in constant else 1.0
    corr.loc[constant, :] = np.nan
    corr.loc[:, constant] = np.nan
    return corr


def split_correlations(
    tables: Mapping[str, EventFeatureTable],
    events: Sequence[RainfallEvent],
    split: Optional[str] = None,
) -> pd.DataFrame:
    """Correlations over the usable events of ``split`` (all splits if None)."""
    selected: List[EventFeatureTable] = [
        tables[e.event_id]
        for e in events
        if e.usable and e.event_id in tables and split in (None, e.split)
    ]
    return correlation_matrix(selected)


def correlation_shift(train: pd.DataFrame, test: pd.DataFrame) -> pd.DataFrame:
    """Test minus train correlations; a sign flip shows as a large entry."""
    return test.loc[CORRELATION_LABELS, CORRELATION_LABELS] - train.loc[
        CORRELATION_LABELS, CORRELATION_LABELS
    ]
