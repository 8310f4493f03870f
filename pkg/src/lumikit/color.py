"""Colorimetric foundation: Planckian radiators, illuminant presets, color spaces.

Illuminant gain vectors are derived from first principles: Planck's radiation
law is integrated against the CIE 1931 2-degree standard observer (committed
as a 1nm data asset, see ``CMF_SHA256``), the resulting chromaticity is mapped
to linear sRGB (IEC 61966-2-1 primaries, D65 white), and the gain vector is
normalized so the green channel equals exactly 1.  That normalization keeps
gain vectors comparable across temperatures and means a von Kries transform
built from them preserves green-channel exposure.

CIELAB conversions use the D65 white point implied by the sRGB matrix, so the
linear RGB white (1,1,1) maps exactly to L=100, a=b=0.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import ValidationError

__all__ = [
    "ColorTemperature",
    "IlluminantPreset",
    "IlluminantRgb",
    "Chromaticity",
    "LabColor",
    "PRESETS",
    "PRESET_IDS",
    "CMF_SHA256",
    "cmf_table",
    "planck_spectral_radiance",
    "kelvin_to_chromaticity",
    "chromaticity_to_illuminant_rgb",
    "preset_to_illuminant_rgb",
    "srgb_encode",
    "srgb_decode",
    "count_encode_clipped",
    "linear_srgb_to_lab",
    "angular_error",
    "lab_mse",
]

# Physical constants (exact SI definitions), giving the radiation constants
# c1 = 2*h*c^2 and c2 = h*c/k used by Planck's law.
_H = 6.62607015e-34
_C = 2.99792458e8
_K = 1.380649e-23
_C1 = 2.0 * _H * _C**2
_C2 = _H * _C / _K

KELVIN_MIN = 1000.0
KELVIN_MAX = 20000.0
WAVELENGTH_MIN_NM = 360.0
WAVELENGTH_MAX_NM = 830.0

# sRGB <-> XYZ matrices for the IEC 61966-2-1 primaries with D65 white,
# 7-decimal derivation (Lindbloom).  The Lab reference white is taken as the
# image of linear RGB (1,1,1) under this exact matrix so the round trip is
# self-consistent to machine precision.
_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ_TO_SRGB = np.array(
    [
        [3.2404542, -1.5371385, -0.4985314],
        [-0.9692660, 1.8760108, 0.0415560],
        [0.0556434, -0.2040259, 1.0572252],
    ]
)
_LAB_WHITE = _SRGB_TO_XYZ @ np.ones(3)

# sha256 of the committed 1nm observer table; verified on first load.
CMF_SHA256 = "801f9b1805354ca5a3fe285749e3294a0d10ddefaf06f1a2278303c25a9bcdde"

_CMF_CACHE: np.ndarray | None = None


def cmf_table() -> np.ndarray:
    """Return the CIE 1931 2-degree observer as a (471, 3) array, 360-830nm at 1nm.

    The committed asset is checksum-verified once and cached; the returned
    array is read-only.
    """
    global _CMF_CACHE
    if _CMF_CACHE is None:
        raw = resources.files("lumikit.data").joinpath("cie_1931_2deg_cmf.txt").read_bytes()
        digest = hashlib.sha256(raw).hexdigest()
        if digest != CMF_SHA256:
            raise ValidationError(
                f"color matching function asset checksum mismatch: {digest} != {CMF_SHA256}"
            )
        rows = [line.split() for line in raw.decode("ascii").splitlines() if not line.startswith("#")]
        table = np.array(rows, dtype=np.float64)
        if table.shape != (471, 3):
            raise ValidationError(f"color matching function asset has shape {table.shape}, expected (471, 3)")
        table.setflags(write=False)
        _CMF_CACHE = table
    return _CMF_CACHE


_CMF_WAVELENGTHS = np.arange(360.0, 831.0)


@dataclass(frozen=True)
class ColorTemperature:
    """Correlated color temperature in kelvin, restricted to [1000, 20000]."""

    kelvin: float

    def __post_init__(self):
        k = float(self.kelvin)
        if not math.isfinite(k) or not (KELVIN_MIN <= k <= KELVIN_MAX):
            raise ValidationError(
                f"color temperature must lie in [{KELVIN_MIN:.0f}, {KELVIN_MAX:.0f}] K, got {self.kelvin!r}"
            )
        object.__setattr__(self, "kelvin", k)


@dataclass(frozen=True)
class IlluminantPreset:
    """One of the seven canonical presets c1..c7 (see ``PRESETS``)."""

    id: str
    temperature: ColorTemperature
    name: str | None = None


PRESETS: dict[str, IlluminantPreset] = {
    "c1": IlluminantPreset("c1", ColorTemperature(2850.0), "Tungsten"),
    "c2": IlluminantPreset("c2", ColorTemperature(3300.0)),
    "c3": IlluminantPreset("c3", ColorTemperature(3800.0), "Fluorescent"),
    "c4": IlluminantPreset("c4", ColorTemperature(4500.0)),
    "c5": IlluminantPreset("c5", ColorTemperature(6500.0), "Cloudy"),
    "c6": IlluminantPreset("c6", ColorTemperature(7000.0)),
    "c7": IlluminantPreset("c7", ColorTemperature(7500.0), "Shade"),
}
PRESET_IDS = tuple(PRESETS)

# identity preset for the optional unmodified-image record in augmentation runs
IDENTITY_PRESET_ID = "c0"


@dataclass(frozen=True)
class Chromaticity:
    """CIE 1931 xy chromaticity coordinates."""

    x: float
    y: float

    def __post_init__(self):
        if not (0.0 < self.x < 1.0 and 0.0 < self.y < 1.0 and self.x + self.y < 1.0):
            raise ValidationError(f"chromaticity ({self.x!r}, {self.y!r}) outside the xy triangle")


@dataclass(frozen=True)
class IlluminantRgb:
    """Linear sRGB illuminant gains, canonically normalized to green = 1."""

    gains: tuple[float, float, float]

    def __post_init__(self):
        g = tuple(float(v) for v in self.gains)
        if len(g) != 3 or not all(math.isfinite(v) and v > 0.0 for v in g):
            raise ValidationError(f"illuminant gains must be three positive finite values, got {self.gains!r}")
        object.__setattr__(self, "gains", g)

    @classmethod
    def from_vector(cls, vec) -> "IlluminantRgb":
        """Build from any positive 3-vector, renormalizing so green = 1."""
        v = np.asarray(vec, dtype=np.float64)
        if v.shape != (3,):
            raise ValidationError(f"expected a 3-vector of gains, got shape {v.shape}")
        if not np.all(np.isfinite(v)) or np.any(v <= 0.0):
            raise ValidationError(f"illuminant gains must be three positive finite values, got {vec!r}")
        v = v / v[1]
        return cls((float(v[0]), 1.0, float(v[2])))

    def as_array(self) -> np.ndarray:
        return np.array(self.gains, dtype=np.float64)

    @property
    def red(self) -> float:
        return self.gains[0]

    @property
    def green(self) -> float:
        return self.gains[1]

    @property
    def blue(self) -> float:
        return self.gains[2]


@dataclass(frozen=True)
class LabColor:
    """CIELAB coordinates (D65 reference white)."""

    L: float
    a: float
    b: float

    def as_array(self) -> np.ndarray:
        return np.array([self.L, self.a, self.b], dtype=np.float64)


def _as_kelvin(t: ColorTemperature | float) -> float:
    if isinstance(t, ColorTemperature):
        return t.kelvin
    return ColorTemperature(float(t)).kelvin


def planck_spectral_radiance(t: ColorTemperature | float, wavelength_nm) -> float | np.ndarray:
    """Blackbody spectral radiance B(lambda, T) on a relative scale.

    B = c1 / (lambda^5 * (exp(c2 / (lambda T)) - 1)) with lambda in meters;
    any fixed rescaling of the output cancels in the downstream chromaticity
    normalization.  ``wavelength_nm`` may be a scalar or array and must lie in
    [360, 830] nm.
    """
    kelvin = _as_kelvin(t)
    lam_nm = np.asarray(wavelength_nm, dtype=np.float64)
    if np.any(lam_nm < WAVELENGTH_MIN_NM) or np.any(lam_nm > WAVELENGTH_MAX_NM):
        raise ValidationError(
            f"wavelength must lie in [{WAVELENGTH_MIN_NM:.0f}, {WAVELENGTH_MAX_NM:.0f}] nm"
        )
    lam = lam_nm * 1e-9
    out = _C1 / (lam**5 * np.expm1(_C2 / (lam * kelvin)))
    if np.ndim(wavelength_nm) == 0:
        return float(out)
    return out


def kelvin_to_chromaticity(t: ColorTemperature | float) -> Chromaticity:
    """CIE 1931 xy chromaticity of a Planckian radiator at temperature ``t``.

    The radiator spectrum is integrated against the committed 1nm observer
    table over 360-830nm; X, Y, Z are then normalized to x, y.
    """
    kelvin = _as_kelvin(t)
    spd = planck_spectral_radiance(kelvin, _CMF_WAVELENGTHS)
    xyz = spd @ cmf_table()
    total = float(xyz.sum())
    return Chromaticity(float(xyz[0] / total), float(xyz[1] / total))


def chromaticity_to_illuminant_rgb(c: Chromaticity) -> IlluminantRgb:
    """Convert an xy chromaticity to green-normalized linear sRGB gains.

    xy is lifted to XYZ at Y=1, mapped through the sRGB matrix, and
    renormalized so green = 1.  Chromaticities outside the sRGB gamut (any
    channel <= 0) are rejected.
    """
    xyz = np.array([c.x / c.y, 1.0, (1.0 - c.x - c.y) / c.y])
    rgb = _XYZ_TO_SRGB @ xyz
    for channel, value in zip(("red", "green", "blue"), rgb):
        if value <= 0.0:
            raise ValidationError(
                f"chromaticity ({c.x:.4f}, {c.y:.4f}) is outside the sRGB gamut: "
                f"{channel} channel is {value:.6f}"
            )
    return IlluminantRgb.from_vector(rgb)


_PRESET_RGB_CACHE: dict[str, IlluminantRgb] = {}


def preset_to_illuminant_rgb(p: IlluminantPreset | str) -> IlluminantRgb:
    """Gain vector for a preset (accepts the preset or its id, e.g. ``"c1"``).

    Results are computed once and cached, so repeated calls are bit-identical.
    """
    if isinstance(p, str):
        if p not in PRESETS:
            raise ValidationError(f"unknown preset {p!r}; valid ids: {', '.join(PRESET_IDS)}")
        p = PRESETS[p]
    cached = _PRESET_RGB_CACHE.get(p.id)
    if cached is None:
        cached = chromaticity_to_illuminant_rgb(kelvin_to_chromaticity(p.temperature))
        _PRESET_RGB_CACHE[p.id] = cached
    return cached


_SRGB_LINEAR_KNEE = 0.0031308
_SRGB_ENCODED_KNEE = 0.04045


def srgb_encode(linear):
    """Linear -> sRGB-encoded transfer function (IEC 61966-2-1).

    Inputs are clamped to [0, 1]; use :func:`count_encode_clipped` to audit
    how many values a clamp would affect.
    """
    v = np.clip(np.asarray(linear, dtype=np.float64), 0.0, 1.0)
    out = np.where(v <= _SRGB_LINEAR_KNEE, 12.92 * v, 1.055 * np.power(v, 1.0 / 2.4) - 0.055)
    if np.ndim(linear) == 0:
        return float(out)
    return out


def srgb_decode(encoded):
    """sRGB-encoded -> linear transfer function (inverse of :func:`srgb_encode`)."""
    v = np.clip(np.asarray(encoded, dtype=np.float64), 0.0, 1.0)
    out = np.where(v <= _SRGB_ENCODED_KNEE, v / 12.92, np.power((v + 0.055) / 1.055, 2.4))
    if np.ndim(encoded) == 0:
        return float(out)
    return out


def count_encode_clipped(linear, tol: float = 1e-9) -> int:
    """Number of values outside [0, 1] that encoding would clamp."""
    v = np.asarray(linear, dtype=np.float64)
    return int(np.count_nonzero((v < -tol) | (v > 1.0 + tol)))


def _lab_f(t: np.ndarray) -> np.ndarray:
    delta = 6.0 / 29.0
    return np.where(t > delta**3, np.cbrt(t), t / (3.0 * delta**2) + 4.0 / 29.0)


def linear_srgb_to_lab(rgb) -> LabColor:
    """Convert a linear sRGB 3-vector to CIELAB (D65 reference white)."""
    v = np.asarray(rgb, dtype=np.float64)
    if v.shape != (3,):
        raise ValidationError(f"expected a linear RGB 3-vector, got shape {v.shape}")
    if np.any(v < 0.0) or not np.all(np.isfinite(v)):
        raise ValidationError(f"linear RGB components must be finite and >= 0, got {rgb!r}")
    xyz = _SRGB_TO_XYZ @ v
    fx, fy, fz = _lab_f(xyz / _LAB_WHITE)
    return LabColor(float(116.0 * fy - 16.0), float(500.0 * (fx - fy)), float(200.0 * (fy - fz)))


def angular_error(a, b) -> float:
    """Angle between two nonzero RGB vectors, in degrees.

    Scale-invariant chromaticity error: arccos of the normalized dot product,
    with the cosine clamped against floating point overshoot.
    """
    va = np.asarray(a, dtype=np.float64).reshape(-1)
    vb = np.asarray(b, dtype=np.float64).reshape(-1)
    if va.shape != (3,) or vb.shape != (3,):
        raise ValidationError("angular_error expects two 3-vectors")
    if np.any(va < 0.0) or np.any(vb < 0.0):
        raise ValidationError("angular_error expects nonnegative components")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise ValidationError("angular_error is undefined for a zero vector")
    cosine = float(np.dot(va, vb) / (na * nb))
    cosine = min(1.0, max(-1.0, cosine))
    return math.degrees(math.acos(cosine))


def lab_mse(a, b) -> float:
    """Mean squared CIELAB difference between two linear sRGB 3-vectors.

    The mean runs over the three Lab components, so two full-white vs
    full-black vectors score 100^2 / 3.
    """
    la = linear_srgb_to_lab(a).as_array()
    lb = linear_srgb_to_lab(b).as_array()
    return float(np.mean((la - lb) ** 2))
