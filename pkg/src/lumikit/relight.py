"""Flat-light augmentation: relit variants, Canny edge maps, prompts, manifests.

The augmentation pipeline takes one linear source image plus a foreground
mask and produces, for each illuminant preset, a relit variant obtained by
von Kries channel scaling.  Structure is illuminant-independent, so a single
edge map (computed from the source) is shared by all variants.  Everything
written to disk is indexed by a line-oriented JSON manifest whose paths are
relative to the manifest's own directory, making the output tree relocatable.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from . import pngio
from .color import (
    IDENTITY_PRESET_ID,
    IlluminantPreset,
    IlluminantRgb,
    PRESET_IDS,
    PRESETS,
    preset_to_illuminant_rgb,
)
from .errors import ValidationError

__all__ = [
    "PromptTemplate",
    "ManifestRecord",
    "AugmentationManifest",
    "MANIFEST_NAME",
    "apply_flat_light",
    "count_clipped_pixels",
    "canny_edges",
    "edge_disagreement",
    "downsample_mask",
    "generate_variants",
]

# Rec. 709 luma weights, applied to linear RGB before edge detection.
_LUMA = np.array([0.2126, 0.7152, 0.0722])

# gaussian_filter(truncate=4.0) uses a kernel of 2*int(4*sigma + 0.5) + 1 taps
_BLUR_TRUNCATE = 4.0

MANIFEST_NAME = "manifest.jsonl"


def _check_linear_image(img) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValidationError(f"expected (H, W, 3) linear image, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValidationError(f"image dimensions must be positive, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise ValidationError("image contains non-finite values")
    if np.any(img < 0.0):
        raise ValidationError("linear image values must be >= 0")
    return img


def _check_mask(mask, shape=None) -> np.ndarray:
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ValidationError(f"expected (H, W) mask, got shape {mask.shape}")
    vals = np.unique(mask)
    if not np.all(np.isin(vals, (0, 1))):
        raise ValidationError("mask must be binary {0, 1}; binarize soft masks on ingest")
    if shape is not None and mask.shape != shape:
        raise ValidationError(f"mask shape {mask.shape} does not match image shape {shape}")
    return mask.astype(np.uint8)


def apply_flat_light(img, ill: IlluminantRgb):
    """Von Kries flat light adaptation: scale each channel by the illuminant gain.

    Returns ``(out, clipped_pixel_count)`` where the count is the number of
    pixels with any channel above 1 (those clamp at encode time; the linear
    result itself is *not* clamped so the operation stays invertible).
    """
    img = _check_linear_image(img)
    out = img * ill.as_array()
    return out, count_clipped_pixels(out)


def count_clipped_pixels(img, tol: float = 1e-9) -> int:
    """Pixels with at least one channel that sRGB encoding would clamp."""
    img = np.asarray(img, dtype=np.float64)
    return int(np.count_nonzero(np.any(img > 1.0 + tol, axis=-1)))


def _luminance(img) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:  # already single channel
        return img
    if img.ndim == 3 and img.shape[2] == 3:
        return img @ _LUMA
    raise ValidationError(f"expected (H, W, 3) or (H, W) input, got shape {img.shape}")


# neighbor offsets (drow, dcol) for gradient angles quantized to 45° sectors;
# index k corresponds to angle k*45° with rows growing downward
_SECTOR_OFFSETS = (
    (0, 1), (1, 1), (1, 0), (1, -1),
    (0, -1), (-1, -1), (-1, 0), (-1, 1),
)


def canny_edges(
    img,
    low_threshold: float = 0.1,
    high_threshold: float = 0.2,
    blur_sigma: float = 1.4,
    relative_thresholds: bool = True,
) -> np.ndarray:
    """Classic Canny on the Rec. 709 luminance of a linear image.

    Steps: Gaussian blur, Sobel gradients, non-maximum suppression with
    8-direction quantization, then double-threshold hysteresis linking with
    8-connectivity.  With ``relative_thresholds`` (the default) the two
    thresholds are fractions of the blurred gradient-magnitude maximum, which
    makes the edge set invariant under any positive diagonal illuminant.

    Returns a uint8 {0, 1} edge map of the same height and width.
    """
    if not 0.0 < low_threshold < high_threshold:
        raise ValidationError(
            f"need 0 < low < high, got low={low_threshold!r} high={high_threshold!r}"
        )
    if blur_sigma <= 0.0:
        raise ValidationError(f"blur_sigma must be positive, got {blur_sigma!r}")
    lum = _luminance(img)
    h, w = lum.shape
    radius = int(_BLUR_TRUNCATE * blur_sigma + 0.5)
    if min(h, w) < 2 * radius + 1:
        raise ValidationError(
            f"image {h}x{w} is smaller than the {2 * radius + 1}-tap blur kernel "
            f"for sigma={blur_sigma}"
        )

    blurred = ndimage.gaussian_filter(lum, blur_sigma, truncate=_BLUR_TRUNCATE)
    gy = ndimage.sobel(blurred, axis=0)
    gx = ndimage.sobel(blurred, axis=1)
    mag = np.hypot(gx, gy)
    peak = mag.max()
    if peak == 0.0:
        return np.zeros((h, w), dtype=np.uint8)

    # non-maximum suppression: survive if >= the forward neighbor and
    # strictly > the backward one, so a symmetric two-pixel ridge keeps
    # exactly one pixel instead of both or neither.  Comparisons carry a
    # relative tie tolerance: a symmetric ridge is an exact tie in real
    # arithmetic, and without the guard sub-ULP rounding noise (e.g. after
    # scaling all channels by a constant) would decide which pixel wins.
    sector = np.round(np.arctan2(gy, gx) / (np.pi / 4.0)).astype(int) % 8
    padded = np.pad(mag, 1, mode="constant")
    fwd = np.empty_like(mag)
    bwd = np.empty_like(mag)
    for k, (di, dj) in enumerate(_SECTOR_OFFSETS):
        sel = sector == k
        fwd[sel] = padded[1 + di : 1 + di + h, 1 + dj : 1 + dj + w][sel]
        bwd[sel] = padded[1 - di : 1 - di + h, 1 - dj : 1 - dj + w][sel]
    tol = 1e-9 * peak
    ridge = (mag >= fwd - tol) & (mag > bwd + tol)

    if relative_thresholds:
        low, high = low_threshold * peak, high_threshold * peak
    else:
        low, high = low_threshold, high_threshold
    weak = ridge & (mag >= low)
    strong = ridge & (mag >= high)

    # hysteresis: keep weak components that touch at least one strong pixel
    labels, _ = ndimage.label(weak, structure=np.ones((3, 3), dtype=int))
    keep = np.unique(labels[strong])
    keep = keep[keep > 0]
    return np.isin(labels, keep).astype(np.uint8)


def edge_disagreement(a, b) -> float:
    """Fraction of pixels on which two edge maps disagree."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValidationError(f"edge map shapes differ: {a.shape} vs {b.shape}")
    return float(np.mean(a != b))


def _interp_rows(grid: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Linear interpolation of a 2-D array along axis 0 at real coordinates."""
    i0 = np.clip(np.floor(coords).astype(int), 0, grid.shape[0] - 2)
    frac = coords - i0
    return grid[i0] * (1.0 - frac)[:, None] + grid[i0 + 1] * frac[:, None]


def downsample_mask(mask, target_w: int, target_h: int) -> np.ndarray:
    """Exact area-average pooling of a binary mask to (target_h, target_w).

    Each output cell is the mean of the mask over its source-pixel footprint,
    fractional cell boundaries included, so the result is independent of
    whether the size ratio is integral.  Computed via the integral image,
    which is piecewise bilinear for a per-pixel-constant field, so bilinear
    sampling at fractional edges is exact.
    """
    mask = _check_mask(mask)
    h, w = mask.shape
    if target_h < 1 or target_w < 1:
        raise ValidationError(f"target size must be positive, got {target_w}x{target_h}")
    if target_h > h or target_w > w:
        raise ValidationError(
            f"target {target_w}x{target_h} exceeds source {w}x{h}; this is a downsampler"
        )

    integral = np.zeros((h + 1, w + 1))
    np.cumsum(np.cumsum(mask, axis=0), axis=1, out=integral[1:, 1:])
    ys = np.clip(np.arange(target_h + 1) * (h / target_h), 0.0, float(h))
    xs = np.clip(np.arange(target_w + 1) * (w / target_w), 0.0, float(w))
    at_rows = _interp_rows(integral, ys)
    corner = _interp_rows(at_rows.T, xs).T  # integral sampled on the edge grid
    sums = corner[1:, 1:] - corner[:-1, 1:] - corner[1:, :-1] + corner[:-1, :-1]
    cell_area = (h / target_h) * (w / target_w)
    return np.clip(sums / cell_area, 0.0, 1.0)


_CARRIER = "a photo of {concept} {noun} in {illuminant} illuminant"


@dataclass(frozen=True)
class PromptTemplate:
    """Prompt pattern pairing a learned concept token with an illuminant token.

    ``render("c1")`` yields e.g. ``"a photo of [v] dog in [c1*] illuminant"``.
    """

    concept_token: str = "[v]"
    class_noun: str = "dog"
    illuminant_token_pattern: str = "[{}*]"
    carrier_text: str = _CARRIER

    def __post_init__(self):
        if not self.concept_token or not self.class_noun:
            raise ValidationError("concept_token and class_noun must be non-empty")
        if self.illuminant_token_pattern.count("{}") != 1:
            raise ValidationError(
                "illuminant_token_pattern needs exactly one {} placeholder, "
                f"got {self.illuminant_token_pattern!r}"
            )

    def illuminant_token(self, preset_id: str) -> str:
        return self.illuminant_token_pattern.format(preset_id)

    def render(self, preset_id: str) -> str:
        token = self.illuminant_token(preset_id)
        prompt = self.carrier_text.format(
            concept=self.concept_token, noun=self.class_noun, illuminant=token
        )
        if prompt.count(self.concept_token) != 1 or prompt.count(token) != 1:
            raise ValidationError(
                f"rendered prompt must contain the concept token and the illuminant "
                f"token exactly once each: {prompt!r}"
            )
        return prompt


@dataclass(frozen=True)
class ManifestRecord:
    """One (source, preset) augmentation entry; field names are the file format."""

    source_image_path: str
    preset_id: str
    variant_image_path: str
    mask_path: str
    edge_map_path: str
    prompt_text: str
    illuminant_gains: tuple
    clipped_pixel_count: int

    def to_json(self) -> str:
        payload = {
            "source_image_path": self.source_image_path,
            "preset_id": self.preset_id,
            "variant_image_path": self.variant_image_path,
            "mask_path": self.mask_path,
            "edge_map_path": self.edge_map_path,
            "prompt_text": self.prompt_text,
            "illuminant_gains": list(self.illuminant_gains),
            "clipped_pixel_count": self.clipped_pixel_count,
        }
        return json.dumps(payload, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "ManifestRecord":
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as err:
            raise ValidationError(f"invalid manifest record: {err}") from None
        if not isinstance(obj, dict):
            raise ValidationError(
                f"manifest record must be a JSON object, got {type(obj).__name__}"
            )
        try:
            gains = obj["illuminant_gains"]
            if len(gains) != 3:
                raise ValidationError(f"illuminant_gains must have 3 entries, got {gains!r}")
            return cls(
                source_image_path=obj["source_image_path"],
                preset_id=obj["preset_id"],
                variant_image_path=obj["variant_image_path"],
                mask_path=obj["mask_path"],
                edge_map_path=obj["edge_map_path"],
                prompt_text=obj["prompt_text"],
                illuminant_gains=tuple(float(g) for g in gains),
                clipped_pixel_count=int(obj["clipped_pixel_count"]),
            )
        except KeyError as missing:
            raise ValidationError(f"manifest record missing field {missing}") from None


@dataclass
class AugmentationManifest:
    """Ordered augmentation records plus the directory their paths resolve in."""

    records: list = field(default_factory=list)
    root: Path | None = None

    def __post_init__(self):
        self._check_unique()

    def _check_unique(self):
        seen = set()
        for rec in self.records:
            key = (rec.source_image_path, rec.preset_id)
            if key in seen:
                raise ValidationError(f"duplicate manifest record for {key}")
            seen.add(key)

    def resolve(self, rel_path: str) -> Path:
        if self.root is None:
            raise ValidationError("manifest has no root directory; write or load it first")
        return self.root / rel_path

    def referenced_paths(self):
        """Relative paths of every file the records mention, deduplicated in order."""
        out = []
        for rec in self.records:
            for p in (rec.source_image_path, rec.variant_image_path,
                      rec.mask_path, rec.edge_map_path):
                if p not in out:
                    out.append(p)
        return out

    def validate_files(self):
        """Check that every referenced file exists under the manifest root."""
        for rel in self.referenced_paths():
            if not self.resolve(rel).is_file():
                raise ValidationError(f"manifest references missing file: {self.resolve(rel)}")

    def write(self, path) -> Path:
        path = Path(path)
        self._check_unique()
        text = "".join(rec.to_json() + "\n" for rec in self.records)
        path.write_text(text, encoding="utf-8")
        self.root = path.parent
        self.validate_files()
        return path

    @classmethod
    def load(cls, path) -> "AugmentationManifest":
        path = Path(path)
        if not path.is_file():
            raise OSError(f"cannot read manifest: {path}")
        records = []
        for n, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                records.append(ManifestRecord.from_json(line))
            except ValidationError as err:
                raise ValidationError(f"{path} line {n}: {err}") from None
        return cls(records=records, root=path.parent)


def _resolve_presets(presets):
    if presets is None:
        presets = PRESET_IDS
    out = []
    for p in presets:
        if isinstance(p, IlluminantPreset):
            out.append(p.id)
        elif p == IDENTITY_PRESET_ID or p in PRESETS:
            out.append(p)
        else:
            raise ValidationError(
                f"unknown preset {p!r}; valid ids: {IDENTITY_PRESET_ID}, {', '.join(PRESET_IDS)}"
            )
    if len(set(out)) != len(out):
        raise ValidationError(f"duplicate presets in {out!r}")
    return out


def _preset_gains(preset_id: str) -> IlluminantRgb:
    if preset_id == IDENTITY_PRESET_ID:
        return IlluminantRgb((1.0, 1.0, 1.0))
    return preset_to_illuminant_rgb(preset_id)


def generate_variants(
    img,
    mask,
    template: PromptTemplate,
    presets=None,
    out_dir=".",
    *,
    source_name: str = "source",
    bit_depth: int = 16,
    low_threshold: float = 0.1,
    high_threshold: float = 0.2,
    blur_sigma: float = 1.4,
    threads: int = 1,
    soft_mask_source=None,
) -> AugmentationManifest:
    """Write relit variants, shared edge map, mask, and manifest into ``out_dir``.

    Output layout (paths in the manifest are relative to ``out_dir``)::

        <source_name>.png           sRGB-encoded copy of the source
        <source_name>_edges.png     one shared Canny map, computed on the source
        <source_name>_mask.png      binary mask as {0, 255}
        <source_name>_mask_soft.png original soft mask, byte-exact (optional)
        <source_name>_c1.png ...    one relit variant per preset
        manifest.jsonl              one JSON record per line

    Presets run as independent work items; ``threads > 1`` parallelizes them
    but the manifest is always assembled in preset order and each file's bytes
    depend only on its own inputs, so outputs are schedule-independent.
    """
    img = _check_linear_image(img)
    mask = _check_mask(mask, shape=img.shape[:2])
    preset_ids = _resolve_presets(presets)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    source_rel = f"{source_name}.png"
    edges_rel = f"{source_name}_edges.png"
    mask_rel = f"{source_name}_mask.png"
    pngio.write_image(out_dir / source_rel, img, bit_depth=bit_depth)
    pngio.write_mask(out_dir / mask_rel, mask)
    edges = canny_edges(
        img, low_threshold=low_threshold, high_threshold=high_threshold, blur_sigma=blur_sigma
    )
    pngio.write_edge_map(out_dir / edges_rel, edges)
    if soft_mask_source is not None:
        pngio.copy_bytes(soft_mask_source, out_dir / f"{source_name}_mask_soft.png")

    def build_one(preset_id: str) -> ManifestRecord:
        gains = _preset_gains(preset_id)
        relit, clipped = apply_flat_light(img, gains)
        variant_rel = f"{source_name}_{preset_id}.png"
        pngio.write_image(out_dir / variant_rel, relit, bit_depth=bit_depth)
        return ManifestRecord(
            source_image_path=source_rel,
            preset_id=preset_id,
            variant_image_path=variant_rel,
            mask_path=mask_rel,
            edge_map_path=edges_rel,
            prompt_text=template.render(preset_id),
            illuminant_gains=gains.gains,
            clipped_pixel_count=clipped,
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(build_one, preset_ids))
    else:
        records = [build_one(p) for p in preset_ids]

    manifest = AugmentationManifest(records=records)
    manifest.write(out_dir / MANIFEST_NAME)
    return manifest
