"""Walk the blackbody locus and print the bundled illuminant presets."""

import numpy as np

from lumikit import (
    PRESET_IDS,
    PRESETS,
    chromaticity_to_illuminant_rgb,
    kelvin_to_chromaticity,
    preset_to_illuminant_rgb,
)

#
# The seven presets, coolest gains first
#

print("preset  kelvin   name          x       y       r_gain  b_gain")
for pid in PRESET_IDS:
    preset = PRESETS[pid]
    c = kelvin_to_chromaticity(preset.temperature)
    g = preset_to_illuminant_rgb(pid)
    name = preset.name or "-"
    print(f"{pid:6s}  {preset.temperature.kelvin:6.0f}   {name:12s}"
          f"  {c.x:.4f}  {c.y:.4f}  {g.red:.4f}  {g.blue:.4f}")

#
# Sanity anchor: 2856 K is the incandescent standard, tabulated at
# roughly (0.4476, 0.4074)
#

c = kelvin_to_chromaticity(2856.0)
print(f"\n2856 K chromaticity: ({c.x:.4f}, {c.y:.4f})")

#
# Red falls and blue rises monotonically with temperature, which is what
# makes a scalar "warmth" axis meaningful
#

kelvins = np.arange(2000.0, 10001.0, 500.0)
gains = np.array(
    [chromaticity_to_illuminant_rgb(kelvin_to_chromaticity(k)).as_array() for k in kelvins]
)
print("\nkelvin  r_gain  b_gain")
for k, (r, _, b) in zip(kelvins, gains):
    print(f"{k:6.0f}  {r:.4f}  {b:.4f}")
print("red monotone non-increasing:", bool(np.all(np.diff(gains[:, 0]) <= 0)))
print("blue monotone non-decreasing:", bool(np.all(np.diff(gains[:, 2]) >= 0)))
