"""Relighting evaluation: white balance, illuminant estimation, metrics, reports.

The harness scores relit (or generated) images listed in an augmentation
manifest.  Each image is white balanced, the acting illuminant is recovered
as the per-channel ratio between the image and its balanced version
aggregated over the foreground mask, and three metrics are reported against
the preset's ground-truth gains: angular error (degrees), CIELAB MSE, and
masked SSIM between image and balanced image.

The learned white-balance model the original pipeline relies on cannot be
bundled, so classical estimators stand in (gray-world by default), and the
``external`` mode ingests balanced images produced by any outside tool.
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
    IlluminantRgb,
    angular_error,
    lab_mse,
    preset_to_illuminant_rgb,
)
from .errors import DegenerateImageError, ValidationError
from .relight import AugmentationManifest, _check_linear_image, _check_mask, _luminance

__all__ = [
    "WbMethod",
    "parse_wb_method",
    "MetricsRecord",
    "MetricsReport",
    "white_balance",
    "estimate_illuminant",
    "ssim",
    "evaluate_manifest",
]

RATIO_EPS = 1e-4  # denominator floor: balanced values at or below it are excluded

_WB_KINDS = ("gray_world", "shades_of_gray", "white_patch", "external")


@dataclass(frozen=True)
class WbMethod:
    """White-balance estimator selector.

    ``gray_world`` and ``white_patch`` need no parameters; ``shades_of_gray``
    carries the Minkowski exponent p >= 1; ``external`` carries a path to a
    pre-balanced image (a file for single-image use, a directory of
    identically named files when evaluating a manifest).
    """

    kind: str
    p: float = 6.0
    path: str | None = None

    def __post_init__(self):
        if self.kind not in _WB_KINDS:
            raise ValidationError(
                f"unknown white-balance method {self.kind!r}; valid: {', '.join(_WB_KINDS)}"
            )
        if self.kind == "shades_of_gray":
            if not np.isfinite(self.p) or self.p < 1.0:
                raise ValidationError(f"shades_of_gray exponent must be finite and >= 1, got {self.p!r}")
        if self.kind == "external" and not self.path:
            raise ValidationError("external white balance needs a path")

    @classmethod
    def gray_world(cls) -> "WbMethod":
        return cls("gray_world")

    @classmethod
    def shades_of_gray(cls, p: float = 6.0) -> "WbMethod":
        return cls("shades_of_gray", p=p)

    @classmethod
    def white_patch(cls) -> "WbMethod":
        return cls("white_patch")

    @classmethod
    def external(cls, path) -> "WbMethod":
        return cls("external", path=str(path))


def parse_wb_method(text: str) -> WbMethod:
    """Parse the CLI spelling: gray_world | sog:<p> | white_patch | external:<path>."""
    if text == "gray_world":
        return WbMethod.gray_world()
    if text == "white_patch":
        return WbMethod.white_patch()
    if text.startswith("sog"):
        if text == "sog":
            return WbMethod.shades_of_gray()
        try:
            return WbMethod.shades_of_gray(float(text.split(":", 1)[1]))
        except (IndexError, ValueError):
            raise ValidationError(f"cannot parse shades-of-gray exponent from {text!r}") from None
    if text.startswith("external:"):
        return WbMethod.external(text.split(":", 1)[1])
    raise ValidationError(
        f"unknown white-balance spec {text!r}; expected gray_world, sog:<p>, "
        "white_patch, or external:<path>"
    )


def _channel_statistic(img: np.ndarray, method: WbMethod) -> np.ndarray:
    flat = img.reshape(-1, 3)
    if method.kind == "gray_world":
        return flat.mean(axis=0)
    if method.kind == "white_patch":
        return flat.max(axis=0)
    # shades of gray: Minkowski p-norm mean, scaled by the max for stability
    # at large p (values**p underflows long before the estimate degrades)
    peak = flat.max(axis=0)
    stat = np.zeros(3)
    for c in range(3):
        if peak[c] > 0.0:
            stat[c] = peak[c] * np.mean((flat[:, c] / peak[c]) ** method.p) ** (1.0 / method.p)
    return stat


def white_balance(img, method: WbMethod = WbMethod.gray_world()):
    """Estimate a global illuminant and divide it out.

    Returns ``(balanced, estimated)`` where ``estimated`` is green-normalized
    and ``balanced = img / estimated.gains`` channelwise, so a scene that
    satisfies the estimator's assumption comes back neutral at the green
    channel's original exposure.
    """
    img = _check_linear_image(img)
    if method.kind == "external":
        balanced = pngio.read_image(method.path)
        if balanced.shape != img.shape:
            raise ValidationError(
                f"external balanced image {method.path} has shape {balanced.shape}, "
                f"expected {img.shape}"
            )
        full = np.ones(img.shape[:2], dtype=np.uint8)
        return balanced, estimate_illuminant(img, balanced, full)
    stat = _channel_statistic(img, method)
    if np.any(stat <= 0.0):
        dead = "RGB"[int(np.argmin(stat))]
        raise DegenerateImageError(
            f"{method.kind} statistic is zero in channel {dead}; cannot balance"
        )
    estimated = IlluminantRgb.from_vector(stat)
    return img / estimated.as_array(), estimated


def estimate_illuminant(
    original,
    balanced,
    mask,
    aggregate: str = "median",
    eps: float = RATIO_EPS,
) -> IlluminantRgb:
    """Recover the acting illuminant from an image and its balanced version.

    Per channel, takes the ratio original/balanced at foreground pixels whose
    balanced value exceeds ``eps`` (excluded, not clamped, so dark pixels do
    not bias the estimate), aggregates by the median (or mean), and
    normalizes green to 1.
    """
    original = _check_linear_image(original)
    balanced = _check_linear_image(balanced)
    if original.shape != balanced.shape:
        raise ValidationError(
            f"shape mismatch: original {original.shape} vs balanced {balanced.shape}"
        )
    mask = _check_mask(mask, shape=original.shape[:2])
    if aggregate not in ("median", "mean"):
        raise ValidationError(f"aggregate must be 'median' or 'mean', got {aggregate!r}")
    fg = mask.astype(bool)
    if not fg.any():
        raise ValidationError("mask has no foreground pixels")
    reducer = np.median if aggregate == "median" else np.mean
    gains = np.zeros(3)
    for c in range(3):
        num = original[:, :, c][fg]
        den = balanced[:, :, c][fg]
        valid = den > eps
        if not valid.any():
            raise DegenerateImageError(
                f"all foreground pixels excluded by the {eps} floor in channel {'RGB'[c]}"
            )
        gains[c] = reducer(num[valid] / den[valid])
    if np.any(gains <= 0.0):
        raise DegenerateImageError(f"non-positive illuminant estimate {gains.tolist()}")
    return IlluminantRgb.from_vector(gains)


_SSIM_K1 = 0.01
_SSIM_K2 = 0.03
_SSIM_SIGMA = 1.5
_SSIM_RADIUS = 5  # 11-tap Gaussian window


def _ssim_map(a: np.ndarray, b: np.ndarray, data_range: float):
    c1 = (_SSIM_K1 * data_range) ** 2
    c2 = (_SSIM_K2 * data_range) ** 2
    # truncate chosen so the kernel has exactly 2*radius + 1 taps
    truncate = (_SSIM_RADIUS + 0.49) / _SSIM_SIGMA
    blur = lambda x: ndimage.gaussian_filter(x, _SSIM_SIGMA, truncate=truncate)
    ua, ub = blur(a), blur(b)
    vaa = blur(a * a) - ua * ua
    vbb = blur(b * b) - ub * ub
    vab = blur(a * b) - ua * ub
    smap = ((2 * ua * ub + c1) * (2 * vab + c2)) / ((ua**2 + ub**2 + c1) * (vaa + vbb + c2))
    r = _SSIM_RADIUS
    return smap[r:-r, r:-r]


def ssim(a, b, mask=None, data_range: float = 1.0) -> float:
    """Structural similarity between the luminances of two linear images.

    11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03.  Border windows
    that stick out of the frame are dropped; with a mask, only windows whose
    center pixel is foreground are averaged.
    """
    la = _luminance(a)
    lb = _luminance(b)
    if la.shape != lb.shape:
        raise ValidationError(f"shape mismatch: {la.shape} vs {lb.shape}")
    h, w = la.shape
    win = 2 * _SSIM_RADIUS + 1
    if min(h, w) < win:
        raise ValidationError(f"image {h}x{w} is smaller than the {win}x{win} SSIM window")
    smap = _ssim_map(la, lb, data_range)
    if mask is None:
        return float(smap.mean())
    mask = _check_mask(mask, shape=(h, w))
    centers = mask[_SSIM_RADIUS:-_SSIM_RADIUS, _SSIM_RADIUS:-_SSIM_RADIUS].astype(bool)
    if not centers.any():
        raise ValidationError("no foreground window centers inside the evaluable region")
    return float(smap[centers].mean())


@dataclass(frozen=True)
class MetricsRecord:
    """Per-(image, preset) evaluation result; field names are the file format."""

    image_id: str
    preset_id: str
    estimated_illuminant: IlluminantRgb
    angular_error_deg: float
    lab_mse: float
    ssim: float
    clipped_ratio: float

    def __post_init__(self):
        for name in ("angular_error_deg", "lab_mse", "ssim", "clipped_ratio"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite, got {getattr(self, name)!r}")
        if not 0.0 <= self.angular_error_deg <= 180.0:
            raise ValidationError(f"angular_error_deg out of [0, 180]: {self.angular_error_deg!r}")
        if not -1.0 - 1e-9 <= self.ssim <= 1.0 + 1e-9:  # ulp slack on the bound
            raise ValidationError(f"ssim out of [-1, 1]: {self.ssim!r}")
        if not 0.0 <= self.clipped_ratio <= 1.0:
            raise ValidationError(f"clipped_ratio out of [0, 1]: {self.clipped_ratio!r}")

    def to_dict(self) -> dict:
        return {
            "image_id": self.image_id,
            "preset_id": self.preset_id,
            "estimated_illuminant": list(self.estimated_illuminant.gains),
            "angular_error_deg": self.angular_error_deg,
            "lab_mse": self.lab_mse,
            "ssim": self.ssim,
            "clipped_ratio": self.clipped_ratio,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "MetricsRecord":
        return cls(
            image_id=obj["image_id"],
            preset_id=obj["preset_id"],
            estimated_illuminant=IlluminantRgb(tuple(obj["estimated_illuminant"])),
            angular_error_deg=float(obj["angular_error_deg"]),
            lab_mse=float(obj["lab_mse"]),
            ssim=float(obj["ssim"]),
            clipped_ratio=float(obj["clipped_ratio"]),
        )


_METRIC_FIELDS = ("angular_error_deg", "lab_mse", "ssim", "clipped_ratio")


def _summarize(records) -> dict:
    out = {"count": len(records)}
    for name in _METRIC_FIELDS:
        vals = np.array([getattr(r, name) for r in records])
        out[name] = {"mean": float(vals.mean()), "std": float(vals.std())}
    return out


@dataclass
class MetricsReport:
    """Evaluation records plus notes for any that failed and were excluded."""

    records: list = field(default_factory=list)
    excluded: list = field(default_factory=list)  # dicts: image_id, preset_id, error

    def aggregates(self) -> dict:
        """Per-preset and overall mean/std, recomputed from the records.

        Standard deviations are population (ddof = 0) so a single record
        reports 0 rather than NaN.
        """
        per_preset = {}
        for pid in sorted({r.preset_id for r in self.records}):
            per_preset[pid] = _summarize([r for r in self.records if r.preset_id == pid])
        out = {"per_preset": per_preset}
        if self.records:
            out["overall"] = _summarize(self.records)
        return out

    def to_dict(self) -> dict:
        return {
            "records": [r.to_dict() for r in self.records],
            "excluded": list(self.excluded),
            "excluded_count": len(self.excluded),
            "aggregates": self.aggregates(),
        }

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "MetricsReport":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            records=[MetricsRecord.from_dict(r) for r in obj["records"]],
            excluded=list(obj.get("excluded", [])),
        )


def _truth_gains(preset_id: str) -> IlluminantRgb:
    if preset_id == IDENTITY_PRESET_ID:
        return IlluminantRgb((1.0, 1.0, 1.0))
    return preset_to_illuminant_rgb(preset_id)


def evaluate_manifest(
    manifest: AugmentationManifest,
    method: WbMethod = WbMethod.gray_world(),
    *,
    aggregate: str = "median",
    masked_ssim: bool = True,
    threads: int = 1,
) -> MetricsReport:
    """Score every manifest record against its preset's ground truth.

    Per record: white balance the variant, estimate the acting illuminant
    over the foreground mask, then report angular error and CIELAB MSE
    against the preset gains plus SSIM between the record's source image and
    the balanced image (structural preservation).
    Records that fail are excluded from aggregates and listed with an error
    note.  Results are assembled in manifest order for any thread count.

    With ``external`` white balance, ``method.path`` names a directory
    holding a balanced image per variant under the same file name.
    """

    def score(rec):
        variant_path = manifest.resolve(rec.variant_image_path)
        img = pngio.read_image(variant_path)
        mask = pngio.read_mask(manifest.resolve(rec.mask_path))
        per_record = method
        if method.kind == "external":
            per_record = WbMethod.external(Path(method.path) / Path(rec.variant_image_path).name)
        balanced, _ = white_balance(img, per_record)
        est = estimate_illuminant(img, balanced, mask, aggregate=aggregate)
        truth = _truth_gains(rec.preset_id)
        # structural preservation is judged against the record's source image;
        # manifests for images with no separate source point both paths at the
        # same file, which makes this the variant-vs-balanced comparison
        source = (
            img
            if rec.source_image_path == rec.variant_image_path
            else pngio.read_image(manifest.resolve(rec.source_image_path))
        )
        return MetricsRecord(
            image_id=Path(rec.source_image_path).stem,
            preset_id=rec.preset_id,
            estimated_illuminant=est,
            angular_error_deg=angular_error(est.as_array(), truth.as_array()),
            lab_mse=lab_mse(est.as_array(), truth.as_array()),
            ssim=ssim(source, balanced, mask if masked_ssim else None),
            clipped_ratio=rec.clipped_pixel_count / (img.shape[0] * img.shape[1]),
        )

    def attempt(rec):
        try:
            return score(rec), None
        except Exception as err:  # noqa: BLE001 - per-record isolation is the contract
            note = {
                "image_id": Path(rec.source_image_path).stem,
                "preset_id": rec.preset_id,
                "error": f"{type(err).__name__}: {err}",
            }
            return None, note

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(attempt, manifest.records))
    else:
        outcomes = [attempt(rec) for rec in manifest.records]

    report = MetricsReport()
    for record, note in outcomes:
        if record is not None:
            report.records.append(record)
        else:
            report.excluded.append(note)
    return report
