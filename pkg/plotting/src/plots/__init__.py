"""Batch figure rendering for rewarddesign sweep and learning-curve CSVs."""
from .render import (
    LEARNING_KIND,
    SWEEP_KIND,
    PlotJob,
    render,
    render_learning,
    render_sweep,
)
from .schema import (
    LEARNING_COLUMNS,
    SWEEP_COLUMNS,
    LearningRow,
    NoData,
    PlotDataError,
    SchemaMismatch,
    SweepRow,
    read_learning,
    read_sweep,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
