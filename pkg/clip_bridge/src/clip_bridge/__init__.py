"""Export illuminant-vocabulary embeddings from CLIP text encoders.

Writes the lumikit embedding interchange format (JSON manifest plus raw
float32 binary); the two packages share that file format and nothing else.
"""

from .encoders import EncoderUnavailable, available_encoders, register_encoder
from .export import export_embeddings
from .vocabulary import CARRIER, CATEGORIES, TERMS

__version__ = "0.1.0"

__all__ = [
    "CARRIER",
    "CATEGORIES",
    "TERMS",
    "EncoderUnavailable",
    "available_encoders",
    "export_embeddings",
    "register_encoder",
    "__version__",
]
