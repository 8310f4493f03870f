"""Masked reconstruction loss: a framework-free numerical kernel.

The loss reweights a per-element squared-error map so that foreground pixels
(under a soft mask M) contribute with weight lambda and background pixels
with weight 1 - lambda, then reduces by the mean over every element.  The
kernel consumes plain numpy tensors at latent resolution so that an external
trainer can wrap it; nothing here knows about diffusion models.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError

__all__ = [
    "MrlParams",
    "RegionFixture",
    "residual_map",
    "mrl",
    "mrl_weights",
    "mrl_gradient",
    "lambda_sweep",
    "read_tensor",
    "write_tensor",
]

DEFAULT_LAMBDA = 0.2


@dataclass(frozen=True)
class MrlParams:
    """Foreground trade-off weight for the masked reconstruction loss."""

    lam: float = DEFAULT_LAMBDA

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValidationError(f"lambda must lie in [0, 1], got {self.lam!r}")


def _check_tensor(t, name: str) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if t.ndim != 3:
        raise ValidationError(f"{name} must be (H, W, C), got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ValidationError(f"{name} contains non-finite values")
    return t


def _check_soft_mask(mask, spatial) -> np.ndarray:
    mask = np.asarray(mask, dtype=np.float64)
    if mask.ndim != 2:
        raise ValidationError(f"mask must be (H, W), got shape {mask.shape}")
    if mask.shape != spatial:
        raise ValidationError(f"mask shape {mask.shape} does not match spatial dims {spatial}")
    if np.any(mask < 0.0) or np.any(mask > 1.0) or not np.all(np.isfinite(mask)):
        raise ValidationError("mask values must lie in [0, 1]")
    return mask


def residual_map(pred, target) -> np.ndarray:
    """Per-element squared error (pred - target)**2, shape preserved."""
    pred = _check_tensor(pred, "pred")
    target = _check_tensor(target, "target")
    if pred.shape != target.shape:
        raise ValidationError(f"shape mismatch: pred {pred.shape} vs target {target.shape}")
    return np.square(pred - target)


def mrl_weights(mask, params: MrlParams) -> np.ndarray:
    """Per-pixel weight map w = (1 - lambda)(1 - M) + lambda * M."""
    lam = params.lam
    return (1.0 - lam) * (1.0 - mask) + lam * mask


def mrl(residual, mask, params: MrlParams = MrlParams()) -> float:
    """Masked reconstruction loss: mean over H*W*C of w * residual.

    The mask is broadcast across channels.  Reduction is the mean over all
    elements (matching the expectation form of the underlying objective),
    not a per-region normalization; with the latter, lambda would trade off
    region *means* rather than region *masses*.
    """
    residual = _check_tensor(residual, "residual")
    if np.any(residual < 0.0):
        raise ValidationError("residual map entries must be >= 0")
    mask = _check_soft_mask(mask, residual.shape[:2])
    w = mrl_weights(mask, params)
    return float(np.mean(w[:, :, None] * residual))


def mrl_gradient(pred, target, mask, params: MrlParams = MrlParams()) -> np.ndarray:
    """Analytic gradient of mrl(residual_map(pred, target), mask) w.r.t. pred.

    grad = 2 * w * (pred - target) / N with N = H*W*C.
    """
    pred = _check_tensor(pred, "pred")
    target = _check_tensor(target, "target")
    if pred.shape != target.shape:
        raise ValidationError(f"shape mismatch: pred {pred.shape} vs target {target.shape}")
    mask = _check_soft_mask(mask, pred.shape[:2])
    w = mrl_weights(mask, params)
    n = pred.size
    return 2.0 * w[:, :, None] * (pred - target) / n


@dataclass(frozen=True)
class RegionFixture:
    """Constant-residual two-region fixture for sweeping lambda.

    Materializes a residual map holding ``fg_residual`` on the first
    ``round(foreground_fraction * H * W)`` pixels (row-major) and
    ``bg_residual`` elsewhere, plus the matching binary mask.  Note that the
    sweep's closed forms quoted in the tests (slope proportional to
    fg - bg; flat when fg == bg) hold at foreground fraction 1/2, where the
    two region masses coincide.
    """

    fg_residual: float = 1.0
    bg_residual: float = 0.0
    foreground_fraction: float = 0.5
    height: int = 16
    width: int = 16
    channels: int = 4

    def __post_init__(self):
        if not 0.0 <= self.foreground_fraction <= 1.0:
            raise ValidationError(
                f"foreground_fraction must lie in [0, 1], got {self.foreground_fraction!r}"
            )
        if min(self.fg_residual, self.bg_residual) < 0.0:
            raise ValidationError("residual levels must be >= 0")
        if min(self.height, self.width, self.channels) < 1:
            raise ValidationError("fixture dimensions must be positive")

    def materialize(self):
        """Return (residual, mask) arrays realizing the fixture."""
        h, w, c = self.height, self.width, self.channels
        n_fg = int(round(self.foreground_fraction * h * w))
        mask = np.zeros(h * w)
        mask[:n_fg] = 1.0
        mask = mask.reshape(h, w)
        residual = np.where(mask[:, :, None] > 0, self.fg_residual, self.bg_residual)
        residual = np.broadcast_to(residual, (h, w, c)).copy()
        return residual, mask


def lambda_sweep(fixture: RegionFixture, lambdas) -> list:
    """Evaluate the loss on a two-region fixture for each lambda, in order.

    Returns a list of (lambda, loss) pairs.
    """
    lambdas = list(lambdas)
    if not lambdas:
        raise ValidationError("lambda_sweep needs at least one lambda value")
    residual, mask = fixture.materialize()
    return [(lam, mrl(residual, mask, MrlParams(lam))) for lam in lambdas]


# Tensor files: one JSON header line {"dtype": "f32le", "shape": [H, W, C]}
# followed by the raw little-endian float32 data, row-major.

def write_tensor(path, data) -> None:
    data = np.asarray(data, dtype=np.float64)
    header = json.dumps({"dtype": "f32le", "shape": list(data.shape)})
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii") + b"\n")
        fh.write(np.ascontiguousarray(data, dtype="<f4").tobytes())


def read_tensor(path) -> np.ndarray:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as err:
        raise OSError(f"cannot read tensor file {path}: {err}") from None
    newline = blob.find(b"\n")
    if newline < 0:
        raise ValidationError(f"{path}: missing tensor header line")
    try:
        header = json.loads(blob[:newline].decode("ascii"))
        shape = tuple(int(s) for s in header["shape"])
        dtype = header["dtype"]
    except (ValueError, KeyError, UnicodeDecodeError) as err:
        raise ValidationError(f"{path}: bad tensor header: {err}") from None
    if dtype != "f32le":
        raise ValidationError(f"{path}: unsupported tensor dtype {dtype!r}")
    body = blob[newline + 1:]
    expected = int(np.prod(shape)) * 4
    if len(body) != expected:
        raise ValidationError(
            f"{path}: payload holds {len(body)} bytes, header shape {shape} needs {expected}"
        )
    return np.frombuffer(body, dtype="<f4").astype(np.float64).reshape(shape)
