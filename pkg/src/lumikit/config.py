"""Tool defaults and the config-file override layer.

Precedence is: built-in defaults < config file (``--config``) < explicit CLI
flags.  The effective config is echoed into every JSON report so results
stay attributable to the parameters that produced them.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .color import IDENTITY_PRESET_ID, PRESET_IDS
from .errors import ValidationError

__all__ = ["ToolConfig"]


@dataclass(frozen=True)
class ToolConfig:
    """Defaults shared by the CLI subcommands; keys match config-file names."""

    canny_low: float = 0.1
    canny_high: float = 0.2
    canny_sigma: float = 1.4
    wb_method: str = "gray_world"
    lam: float = 0.2
    presets: tuple = PRESET_IDS
    out_dir: str = "lumikit_out"
    plots: bool = False

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValidationError(f"lam must lie in [0, 1], got {self.lam!r}")
        if not 0.0 < self.canny_low < self.canny_high:
            raise ValidationError(
                f"need 0 < canny_low < canny_high, got {self.canny_low!r}, {self.canny_high!r}"
            )
        if self.canny_sigma <= 0.0:
            raise ValidationError(f"canny_sigma must be positive, got {self.canny_sigma!r}")
        object.__setattr__(self, "presets", tuple(self.presets))
        allowed = set(PRESET_IDS) | {IDENTITY_PRESET_ID}
        bad = [p for p in self.presets if p not in allowed]
        if bad:
            raise ValidationError(f"unknown presets in config: {bad}")

    @classmethod
    def load(cls, path) -> "ToolConfig":
        """Read overrides from a JSON file; unknown keys are rejected."""
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as err:
            raise OSError(f"cannot read config file {path}: {err}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as err:
            raise ValidationError(f"{path}: invalid config file: {err}") from None
        if not isinstance(doc, dict):
            raise ValidationError(f"{path}: config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ValidationError(
                f"{path}: unknown config keys {unknown}; valid: {sorted(known)}"
            )
        return cls(**doc)

    def override(self, **kwargs) -> "ToolConfig":
        """New config with the non-None entries of kwargs applied."""
        updates = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **updates) if updates else self

    def to_dict(self) -> dict:
        out = asdict(self)
        out["presets"] = list(out["presets"])
        return out
