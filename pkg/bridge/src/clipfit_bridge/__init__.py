"""clipfit-bridge: real-model embedding exports for the clipfit engine."""

from .export import ExportJob, ExportSummary, export_embeddings
from .ofce import read_embeddings, write_embeddings

__version__ = "0.1.0"

__all__ = [
    "ExportJob",
    "ExportSummary",
    "export_embeddings",
    "read_embeddings",
    "write_embeddings",
    "__version__",
]
