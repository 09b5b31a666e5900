"""tablefew: web tables in, few-shot learning task datasets out."""

from .model import (
    AnnotationRecord,
    DatasetManifest,
    Example,
    FilterReport,
    RawTable,
    SamplePlan,
    Task,
    decode_task,
    encode_task,
    task_id,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationRecord",
    "DatasetManifest",
    "Example",
    "FilterReport",
    "RawTable",
    "SamplePlan",
    "Task",
    "decode_task",
    "encode_task",
    "task_id",
    "__version__",
]
