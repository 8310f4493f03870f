"""Writer for the embedding interchange format.

One JSON manifest describes one or more embedding sets; each set's vectors
live in a sibling binary file of row-major little-endian float32, guarded
by a sha256 checksum. A single set is written as a JSON object, several
as an array, and readers accept both.
"""

from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path

import numpy as np

_SAFE = re.compile(r"[^A-Za-z0-9._-]+")


def data_file_name(encoder_id: str, level: str) -> str:
    return f"{_SAFE.sub('_', encoder_id)}_{_SAFE.sub('_', level)}.f32"


def set_entry(encoder_id: str, level: str, vectors: np.ndarray, items) -> dict:
    """Manifest entry plus payload for one embedding set.

    items: (label, category) pairs aligned with vector rows.
    """
    vectors = np.ascontiguousarray(vectors, dtype="<f4")
    if vectors.ndim != 2:
        raise ValueError(f"vectors must be 2-D, got shape {vectors.shape}")
    if len(items) != vectors.shape[0]:
        raise ValueError(f"{len(items)} items for {vectors.shape[0]} rows")
    payload = vectors.tobytes()
    return {
        "encoder_id": encoder_id,
        "level": level,
        "dim": int(vectors.shape[1]),
        "count": int(vectors.shape[0]),
        "dtype": "f32le",
        "data_file": data_file_name(encoder_id, level),
        "checksum": hashlib.sha256(payload).hexdigest(),
        "items": [
            {"label": label, "category": category, "row_index": row}
            for row, (label, category) in enumerate(items)
        ],
        "_payload": payload,
    }


def write_manifest(entries, manifest_path) -> Path:
    manifest_path = Path(manifest_path)
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    names = [e["data_file"] for e in entries]
    if len(set(names)) != len(names):
        raise ValueError(f"data files collide: {names}")
    doc = []
    for entry in entries:
        (manifest_path.parent / entry["data_file"]).write_bytes(entry["_payload"])
        doc.append({k: v for k, v in entry.items() if k != "_payload"})
    body = doc[0] if len(doc) == 1 else doc
    manifest_path.write_text(json.dumps(body, indent=2) + "\n", encoding="utf-8")
    return manifest_path
