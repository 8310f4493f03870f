"""Generate the committed test fixtures.

Run from the repository root:

    python3 tools/generate_fixtures.py

Outputs land in tests/fixtures/.  Everything is seeded, so reruns are
byte-identical; the script also verifies the properties the fixtures are
meant to exhibit (edge-map stability under relighting for the procedural
scenes, golden edge maps reproduced from the loop-based reference
implementation) and fails loudly if a regeneration would break them.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))
sys.path.insert(0, str(ROOT / "src"))

from lumikit import pngio, probe, relight  # noqa: E402
from lumikit.color import PRESET_IDS, preset_to_illuminant_rgb  # noqa: E402
from oracles import canny_reference  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"


def soft_disk(h, w, cy, cx, r, feather=1.5):
    yy, xx = np.mgrid[0:h, 0:w]
    d = np.sqrt((yy - cy) ** 2 + (xx - cx) ** 2)
    return np.clip((r - d) / feather + 0.5, 0.0, 1.0)


def procedural_scene(seed: int, h=128, w=128) -> np.ndarray:
    """Natural-ish linear image: smooth color fields, a few objects, texture.

    Values stay within [0.02, 0.42] so even the strongest preset gain leaves
    nearly every pixel unclipped.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:h, 0:w] / max(h, w)
    img = np.zeros((h, w, 3))
    # low-frequency illumination-ish gradients, per channel but correlated;
    # chroma is kept moderate: saturated fixtures shed edge stability because
    # the Rec.709 luminance reweights channels under a diagonal gain
    base = 0.45 + 0.25 * np.sin(2 * np.pi * (0.7 * xx + 0.4 * yy + rng.random()))
    for c in range(3):
        ripple = 0.04 * np.sin(2 * np.pi * (rng.uniform(0.5, 1.5) * xx + rng.random()))
        ripple += 0.04 * np.cos(2 * np.pi * (rng.uniform(0.5, 1.5) * yy + rng.random()))
        img[:, :, c] = base * rng.uniform(0.9, 1.0) + ripple

    # objects with distinct albedos and feathered boundaries
    palette = [
        np.array([0.9, 0.55, 0.35]),
        np.array([0.35, 0.6, 0.9]),
        np.array([0.55, 0.85, 0.45]),
    ]
    for k in range(3):
        m = soft_disk(
            h, w,
            cy=rng.uniform(0.25, 0.75) * h,
            cx=rng.uniform(0.25, 0.75) * w,
            r=rng.uniform(0.12, 0.22) * min(h, w),
        )
        color = palette[k]
        color = 0.5 * color + 0.5 * color.mean()  # partial desaturation
        img = img * (1 - m[:, :, None]) + m[:, :, None] * color * rng.uniform(0.6, 0.9)

    # fine correlated texture, mild enough not to seed near-threshold edges
    img *= 1.0 + 0.025 * rng.standard_normal((h, w, 1))
    img += 0.008 * rng.standard_normal((h, w, 3))

    lo, hi = img.min(), img.max()
    img = 0.02 + (img - lo) / (hi - lo) * 0.40
    return img


def check_invariance(img: np.ndarray, name: str) -> None:
    edges = relight.canny_edges(img)
    worst = 0.0
    for pid in PRESET_IDS:
        relit, _ = relight.apply_flat_light(img, preset_to_illuminant_rgb(pid))
        d = relight.edge_disagreement(edges, relight.canny_edges(relit))
        worst = max(worst, d)
        print(f"  {name} under {pid}: disagreement {d:.4%}")
    if worst >= 0.02:
        raise SystemExit(f"{name}: worst disagreement {worst:.4%} breaks the 2% budget")


def make_natural_scenes() -> None:
    for idx, seed in ((1, 20240811), (2, 20240813)):
        img = procedural_scene(seed)
        path = FIXTURES / f"natural{idx}.png"
        pngio.write_image(path, img, bit_depth=16)
        decoded = pngio.read_image(path)  # verify on what tests will actually load
        check_invariance(decoded, path.name)
    mask = (soft_disk(128, 128, 70, 58, 34) >= 0.5).astype(np.uint8)
    pngio.write_mask(FIXTURES / "natural1_mask.png", mask)
    print(f"  natural1_mask.png foreground fraction {mask.mean():.3f}")


def make_disk_golden() -> None:
    h = w = 32
    m = soft_disk(h, w, 15.5, 15.5, 9.0, feather=1.0)
    img = np.empty((h, w, 3))
    bg = np.array([0.12, 0.14, 0.18])
    fg = np.array([0.80, 0.66, 0.48])
    img = bg[None, None, :] * (1 - m[:, :, None]) + fg[None, None, :] * m[:, :, None]
    pngio.write_image(FIXTURES / "disk32.png", img, bit_depth=16)
    decoded = pngio.read_image(FIXTURES / "disk32.png")
    golden = canny_reference(decoded)
    if golden.sum() == 0:
        raise SystemExit("disk golden came out empty; fixture parameters are wrong")
    pngio.write_edge_map(FIXTURES / "disk32_edges_golden.png", golden)
    print(f"  disk32 golden edge pixels: {int(golden.sum())}")


PCA_5X4 = np.array([
    [0.21, 1.73, -0.44, 0.95],
    [-1.12, 0.08, 0.67, -0.31],
    [0.55, -0.92, 1.21, 0.14],
    [1.94, 0.36, -1.05, -0.77],
    [-0.63, 0.47, 0.29, 1.38],
])


def make_pca_fixture() -> None:
    np.savetxt(FIXTURES / "pca_5x4.txt", PCA_5X4, fmt="%.2f")
    print("  pca_5x4.txt written")


def synthetic_embedding_set(encoder_id: str, level: str, seed: int) -> probe.EmbeddingSet:
    """Embeddings built to encode the qualitative finding the probe reports:
    kelvin-value tokens sit with plain numerals, away from named illuminants."""
    rng = np.random.default_rng(seed)
    dim = 8
    anchor = {
        "named_illuminant": np.r_[3.0, np.zeros(dim - 1)],
        "numeric": np.r_[0.0, 3.0, np.zeros(dim - 2)],
        "general_lighting": np.r_[0.0, 0.0, 3.0, np.zeros(dim - 3)],
    }
    spread = 0.25 if level == "token" else 0.4
    items, vecs = [], []

    def add(label, category, center):
        items.append(probe.EmbeddingItem(label, category, len(items)))
        vecs.append(center + rng.normal(0.0, spread, dim))

    for name in ("tungsten", "fluorescent", "cloudy", "shade"):
        add(name, "named_illuminant", anchor["named_illuminant"])
    for name in ("2850K", "3800K", "6500K", "7500K"):
        add(name, "kelvin_value", anchor["numeric"])
    for name in ("2850", "3800", "6500", "7500"):
        add(name, "generic_numeral", anchor["numeric"])
    for name in ("bright", "dim", "soft", "harsh"):
        add(name, "general_lighting", anchor["general_lighting"])
    return probe.EmbeddingSet(
        encoder_id, level, np.array(vecs, dtype=np.float32), items
    )


def make_embedding_fixture() -> None:
    out = FIXTURES / "embeddings"
    out.mkdir(exist_ok=True)
    sets = [
        synthetic_embedding_set("synthetic-a", "token", 101),
        synthetic_embedding_set("synthetic-a", "sentence", 102),
    ]
    probe.write_embeddings(sets, out / "synthetic.json")
    print(f"  embeddings/synthetic.json: {len(sets)} sets")


def make_prefs_csv() -> None:
    text = (
        "winner,loser,count\n"
        "full_method,no_edge_guidance,41\n"
        "no_edge_guidance,full_method,9\n"
        "full_method,baseline_prompt,46\n"
        "baseline_prompt,full_method,4\n"
        "no_edge_guidance,baseline_prompt,33\n"
        "baseline_prompt,no_edge_guidance,17\n"
    )
    (FIXTURES / "prefs_3method.csv").write_text(text, encoding="utf-8")
    print("  prefs_3method.csv written")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    print("natural scenes:")
    make_natural_scenes()
    print("disk golden:")
    make_disk_golden()
    make_pca_fixture()
    make_embedding_fixture()
    make_prefs_csv()
    print("done")


if __name__ == "__main__":
    main()
