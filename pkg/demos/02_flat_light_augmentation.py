"""Generate relit training variants for a toy object scene.

Writes PNGs, a shared edge map, and the manifest into demo_out/augment.
"""

from pathlib import Path

import numpy as np

from lumikit import PromptTemplate, canny_edges, generate_variants

OUT = Path(__file__).parent / "demo_out" / "augment"

# toy scene: bright disk (the "object") on a soft gradient background
h = w = 96
yy, xx = np.mgrid[0:h, 0:w]
bg = 0.18 + 0.10 * (xx / w)
disk = (yy - 46) ** 2 + (xx - 50) ** 2 < 24**2
img = np.stack([bg, bg * 0.95, bg * 1.08], axis=-1)
img[disk] = [0.62, 0.55, 0.40]
mask = disk.astype(float)

template = PromptTemplate(concept_token="[v]", class_noun="bowl")

manifest = generate_variants(
    img, mask, template,
    presets=["c1", "c4", "c7"],
    out_dir=OUT,
    source_name="bowl",
)

print(f"wrote {len(manifest.records)} variants under {OUT}")
print()
print("preset  clipped  prompt")
for rec in manifest.records:
    print(f"{rec.preset_id:6s}  {rec.clipped_pixel_count:7d}  {rec.prompt_text}")

# every record points at the same edge map: edges come from the source
# image once, since flat relighting does not move edges
edge_paths = {rec.edge_map_path for rec in manifest.records}
print(f"\nshared edge map: {edge_paths}")
edges = canny_edges(img)
print(f"edge pixels in the source scene: {int(edges.sum())}")
