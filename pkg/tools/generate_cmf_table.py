#!/usr/bin/env python3
"""Generate the committed CIE 1931 2-degree color matching function asset.

The base data is the standard observer table at 5nm intervals as published in
CIE 15 (and reproduced in Wyszecki & Stiles, "Color Science", Table I(3.3.1)),
extended over 360-830nm with the published short/long wavelength tails.  The
1nm asset is produced by cubic-spline interpolation, which is the CIE 167:2005
recommended practice for resampling the standard observer.

The script validates the result against two colorimetric anchors before
writing anything:

  * equal-energy spectrum integrates to x = y = 1/3 (the observer was
    normalized this way by construction), and
  * a 2856K Planckian radiator lands on the published CIE Illuminant A
    chromaticity (0.44758, 0.40745).

Output: src/lumikit/data/cie_1931_2deg_cmf.txt, three whitespace-separated
columns (xbar ybar zbar), one row per nanometer from 360 to 830 inclusive.
The sha256 of the file is printed and must match CMF_SHA256 in lumikit.color.
"""

import hashlib
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

# CIE 1931 2-degree standard observer, 5nm steps.  Columns: nm, xbar, ybar, zbar.
CMF_5NM = [
    (360, 0.000130, 0.0000039, 0.000606),
    (365, 0.000232, 0.0000070, 0.001086),
    (370, 0.000415, 0.0000120, 0.001946),
    (375, 0.000742, 0.0000220, 0.003486),
    (380, 0.001368, 0.000039, 0.006450),
    (385, 0.002236, 0.000064, 0.010550),
    (390, 0.004243, 0.000120, 0.020050),
    (395, 0.007650, 0.000217, 0.036210),
    (400, 0.014310, 0.000396, 0.067850),
    (405, 0.023190, 0.000640, 0.110200),
    (410, 0.043510, 0.001210, 0.207400),
    (415, 0.077630, 0.002180, 0.371300),
    (420, 0.134380, 0.004000, 0.645600),
    (425, 0.214770, 0.007300, 1.039050),
    (430, 0.283900, 0.011600, 1.385600),
    (435, 0.328500, 0.016840, 1.622960),
    (440, 0.348280, 0.023000, 1.747060),
    (445, 0.348060, 0.029800, 1.782600),
    (450, 0.336200, 0.038000, 1.772110),
    (455, 0.318700, 0.048000, 1.744100),
    (460, 0.290800, 0.060000, 1.669200),
    (465, 0.251100, 0.073900, 1.528100),
    (470, 0.195360, 0.090980, 1.287640),
    (475, 0.142100, 0.112600, 1.041900),
    (480, 0.095640, 0.139020, 0.812950),
    (485, 0.057950, 0.169300, 0.616200),
    (490, 0.032010, 0.208020, 0.465180),
    (495, 0.014700, 0.258600, 0.353300),
    (500, 0.004900, 0.323000, 0.272000),
    (505, 0.002400, 0.407300, 0.212300),
    (510, 0.009300, 0.503000, 0.158200),
    (515, 0.029100, 0.608200, 0.111700),
    (520, 0.063270, 0.710000, 0.078250),
    (525, 0.109600, 0.793200, 0.057250),
    (530, 0.165500, 0.862000, 0.042160),
    (535, 0.225750, 0.914850, 0.029840),
    (540, 0.290400, 0.954000, 0.020300),
    (545, 0.359700, 0.980300, 0.013400),
    (550, 0.433450, 0.994950, 0.008750),
    (555, 0.512050, 1.000000, 0.005750),
    (560, 0.594500, 0.995000, 0.003900),
    (565, 0.678400, 0.978600, 0.002750),
    (570, 0.762100, 0.952000, 0.002100),
    (575, 0.842500, 0.915400, 0.001800),
    (580, 0.916300, 0.870000, 0.001650),
    (585, 0.978600, 0.816300, 0.001400),
    (590, 1.026300, 0.757000, 0.001100),
    (595, 1.056700, 0.694900, 0.001000),
    (600, 1.062200, 0.631000, 0.000800),
    (605, 1.045600, 0.566800, 0.000600),
    (610, 1.002600, 0.503000, 0.000340),
    (615, 0.938400, 0.441200, 0.000240),
    (620, 0.854450, 0.381000, 0.000190),
    (625, 0.751400, 0.321000, 0.000100),
    (630, 0.642400, 0.265000, 0.000050),
    (635, 0.541900, 0.217000, 0.000030),
    (640, 0.447900, 0.175000, 0.000020),
    (645, 0.360800, 0.138200, 0.000010),
    (650, 0.283500, 0.107000, 0.000000),
    (655, 0.218700, 0.081600, 0.000000),
    (660, 0.164900, 0.061000, 0.000000),
    (665, 0.121200, 0.044580, 0.000000),
    (670, 0.087400, 0.032000, 0.000000),
    (675, 0.063600, 0.023200, 0.000000),
    (680, 0.046770, 0.017000, 0.000000),
    (685, 0.032900, 0.011920, 0.000000),
    (690, 0.022700, 0.008210, 0.000000),
    (695, 0.015840, 0.005723, 0.000000),
    (700, 0.011359, 0.004102, 0.000000),
    (705, 0.008111, 0.002929, 0.000000),
    (710, 0.005790, 0.002091, 0.000000),
    (715, 0.004109, 0.001484, 0.000000),
    (720, 0.002899, 0.001047, 0.000000),
    (725, 0.002049, 0.000740, 0.000000),
    (730, 0.001440, 0.000520, 0.000000),
    (735, 0.001000, 0.000361, 0.000000),
    (740, 0.000690, 0.000249, 0.000000),
    (745, 0.000476, 0.000172, 0.000000),
    (750, 0.000332, 0.000120, 0.000000),
    (755, 0.000235, 0.000085, 0.000000),
    (760, 0.000166, 0.000060, 0.000000),
    (765, 0.000117, 0.000042, 0.000000),
    (770, 0.000083, 0.000030, 0.000000),
    (775, 0.000059, 0.000021, 0.000000),
    (780, 0.000042, 0.000015, 0.000000),
    (785, 0.0000294, 0.0000106, 0.000000),
    (790, 0.0000206, 0.0000074, 0.000000),
    (795, 0.0000144, 0.0000052, 0.000000),
    (800, 0.0000100, 0.0000036, 0.000000),
    (805, 0.0000070, 0.0000025, 0.000000),
    (810, 0.0000049, 0.0000018, 0.000000),
    (815, 0.0000034, 0.0000012, 0.000000),
    (820, 0.0000024, 0.0000009, 0.000000),
    (825, 0.0000017, 0.0000006, 0.000000),
    (830, 0.0000012, 0.0000004, 0.000000),
]

# Second radiation constant c2 = h*c/k from CODATA 2018 exact SI values.
H_PLANCK = 6.62607015e-34
C_LIGHT = 2.99792458e8
K_BOLTZMANN = 1.380649e-23
C1_RAD = 2.0 * H_PLANCK * C_LIGHT**2
C2_RAD = H_PLANCK * C_LIGHT / K_BOLTZMANN


def planck(wavelength_nm, temp_k):
    lam = wavelength_nm * 1e-9
    return C1_RAD / (lam**5 * np.expm1(C2_RAD / (lam * temp_k)))


def interpolate_1nm():
    base = np.array(CMF_5NM, dtype=np.float64)
    nm5 = base[:, 0]
    nm1 = np.arange(360, 831, dtype=np.float64)
    cols = []
    for k in (1, 2, 3):
        spline = CubicSpline(nm5, base[:, k])
        vals = spline(nm1)
        # spline overshoot near the zero plateaus must not go negative
        cols.append(np.clip(vals, 0.0, None))
    return nm1, np.stack(cols, axis=1)


def chromaticity_of(spd, cmf):
    xyz = (spd[:, None] * cmf).sum(axis=0)
    return xyz[:2] / xyz.sum()


def main():
    nm, cmf = interpolate_1nm()
    assert cmf.shape == (471, 3)

    # Anchor 1: equal-energy point E at (1/3, 1/3)
    xe, ye = chromaticity_of(np.ones_like(nm), cmf)
    print(f"equal-energy: x={xe:.5f} y={ye:.5f}  (target 0.33333, 0.33333)")
    assert abs(xe - 1 / 3) < 1.5e-3 and abs(ye - 1 / 3) < 1.5e-3

    # Anchor 2: CIE Illuminant A = Planckian radiator at 2856K
    xa, ya = chromaticity_of(planck(nm, 2856.0), cmf)
    print(f"illuminant A: x={xa:.5f} y={ya:.5f}  (target 0.44758, 0.40745)")
    assert abs(xa - 0.44758) < 1e-3 and abs(ya - 0.40745) < 1e-3

    out = Path(__file__).resolve().parents[1] / "src" / "lumikit" / "data" / "cie_1931_2deg_cmf.txt"
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = ["# CIE 1931 2-degree standard observer, 360-830nm at 1nm, columns: xbar ybar zbar\n"]
    for row in cmf:
        lines.append(f"{row[0]:.8f} {row[1]:.8f} {row[2]:.8f}\n")
    out.write_text("".join(lines), encoding="ascii")
    digest = hashlib.sha256(out.read_bytes()).hexdigest()
    print(f"wrote {out} ({out.stat().st_size} bytes)")
    print(f"sha256: {digest}")


if __name__ == "__main__":
    main()
