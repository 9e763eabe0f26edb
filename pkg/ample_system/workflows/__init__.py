"""
Batch pipelines built from the core operations.
"""

from .experiments import (
    CharsumAuditWorkflow,
    ExperimentChain,
    FillBatchWorkflow,
    MedialBatchWorkflow,
    SolveBatchWorkflow,
)

__all__ = [
    "CharsumAuditWorkflow",
    "ExperimentChain",
    "FillBatchWorkflow",
    "MedialBatchWorkflow",
    "SolveBatchWorkflow",
]
