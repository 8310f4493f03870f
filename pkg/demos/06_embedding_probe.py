"""Probe a synthetic embedding space for illuminant-vocabulary structure.

Builds token embeddings where kelvin strings ("3800K") land on the same
anchor as bare numerals ("3800"), mimicking what sub-word tokenization does
to numeric temperature prompts, then measures cluster separations.
"""

from pathlib import Path

import numpy as np

from lumikit import (
    ClusterConfig,
    EmbeddingItem,
    EmbeddingSet,
    load_embeddings,
    pca_project,
    silhouette_score,
    write_embeddings,
)
from lumikit.probe import default_cluster_configs

OUT = Path(__file__).parent / "demo_out" / "probe"
OUT.mkdir(parents=True, exist_ok=True)

rng = np.random.default_rng(21)
DIM = 12

anchors = {
    "named_illuminant": rng.normal(0, 1, DIM),
    "general_lighting": rng.normal(0, 1, DIM) + 4.0,
}
# kelvin values and bare numerals share an anchor on purpose
shared = rng.normal(0, 1, DIM) - 4.0
anchors["kelvin_value"] = shared
anchors["generic_numeral"] = shared

labels = {
    "named_illuminant": ["tungsten", "fluorescent", "cloudy", "shade"],
    "kelvin_value": ["2850K", "3800K", "6500K", "7500K"],
    "generic_numeral": ["2850", "3800", "6500", "7500"],
    "general_lighting": ["bright", "dim", "soft", "harsh"],
}

items, vecs = [], []
for category, names in labels.items():
    for name in names:
        items.append(EmbeddingItem(name, category, len(items)))
        vecs.append(anchors[category] + rng.normal(0, 0.3, DIM))

es = EmbeddingSet("demo-encoder", "token", np.array(vecs, dtype=np.float32), items)

# round trip through the interchange files
manifest = write_embeddings([es], OUT / "demo.json")
(loaded,) = load_embeddings(manifest)
print(f"interchange round trip ok: {np.array_equal(loaded.vectors, es.vectors)}")

print("\nsilhouettes (cosine):")
for cfg in default_cluster_configs():
    print(f"  {cfg.name:32s} {silhouette_score(loaded, cfg):+.4f}")

# merging kelvin with numerals separates cleanly from everything else,
# which is the telltale of shared numeric token geometry
merged = ClusterConfig(
    name="kelvin_and_numerals_vs_rest",
    groups={
        "kelvin_and_numerals": ["category:kelvin_value", "category:generic_numeral"],
        "rest": ["category:named_illuminant", "category:general_lighting"],
    },
)
print(f"  {merged.name:32s} {silhouette_score(loaded, merged):+.4f}")

proj, explained = pca_project(loaded, out_dims=2)
print(f"\npca explained variance: {np.round(explained, 3)}")
for it in loaded.items[:4]:
    x, y = proj[it.row_index]
    print(f"  {it.label:12s} ({x:+.2f}, {y:+.2f})")
