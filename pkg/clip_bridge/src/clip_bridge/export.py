"""Drive encoders over the vocabulary and write interchange files."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import encoders as enc
from . import interchange, vocabulary


def embed_set(encoder, encoder_id: str, level: str) -> dict:
    items = vocabulary.all_items()
    rows = []
    for label, _ in items:
        if level == "token":
            vec = encoder.embed_token(label)
        elif level == "sentence":
            vec = encoder.embed_sentence(vocabulary.sentence_for(label))
        else:
            raise ValueError(f"unknown level {level!r}")
        rows.append(np.asarray(vec, dtype=np.float32))
    dims = {r.shape for r in rows}
    if len(dims) != 1 or rows[0].ndim != 1:
        raise ValueError(f"encoder returned inconsistent shapes: {sorted(dims)}")
    return interchange.set_entry(encoder_id, level, np.stack(rows), items)


def export_embeddings(
    encoder_ids=None,
    out_dir="exports",
    levels=vocabulary.LEVELS,
) -> dict:
    """Export each requested encoder to ``<out_dir>/<encoder_id>.json``.

    Encoders that cannot load are skipped and recorded, not fatal.
    Returns a summary dict: exported (id -> manifest path str), skipped
    (id -> reason), warnings (list). The summary is also written to
    ``<out_dir>/export.log`` (JSON body) once anything was exported; only
    manifests get the .json suffix, so readers can glob for them.
    """
    if encoder_ids is None:
        encoder_ids = enc.available_encoders()
    out_dir = Path(out_dir)
    summary = {"exported": {}, "skipped": {}, "warnings": []}
    for encoder_id in encoder_ids:
        try:
            encoder = enc.load_encoder(encoder_id)
        except enc.EncoderUnavailable as err:
            summary["skipped"][encoder_id] = str(err)
            summary["warnings"].append(f"{encoder_id}: {err}")
            continue
        entries = [embed_set(encoder, encoder_id, level) for level in levels]
        path = interchange.write_manifest(entries, out_dir / f"{encoder_id}.json")
        summary["exported"][encoder_id] = str(path)
    if summary["exported"]:
        log = out_dir / "export.log"
        log.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return summary
