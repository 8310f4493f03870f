"""Region-weighted reconstruction loss: closed forms, gradient, tensor files."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lumikit import (
    DEFAULT_LAMBDA,
    MrlParams,
    RegionFixture,
    ValidationError,
    lambda_sweep,
    mrl,
    mrl_gradient,
    read_tensor,
    residual_map,
    write_tensor,
)
from lumikit.loss import mrl_weights


def two_region(fg=1.0, bg=0.0, fraction=0.5, h=16, w=16, c=4):
    return RegionFixture(
        fg_residual=fg,
        bg_residual=bg,
        foreground_fraction=fraction,
        height=h,
        width=w,
        channels=c,
    ).materialize()


def closed_form(lam, fg, bg, fraction):
    # mean over all elements of w * residual on a binary two-region map
    return fraction * lam * fg + (1.0 - fraction) * (1.0 - lam) * bg


class TestWeights:
    def test_extremes_select_one_region(self):
        mask = np.array([[1.0, 0.0]])
        assert np.array_equal(mrl_weights(mask, MrlParams(0.0)), [[0.0, 1.0]])
        assert np.array_equal(mrl_weights(mask, MrlParams(1.0)), [[1.0, 0.0]])

    def test_midpoint_is_uniform(self):
        mask = np.array([[1.0, 0.0, 0.3]])
        assert np.allclose(mrl_weights(mask, MrlParams(0.5)), 0.5)

    def test_default_lambda_is_point_two(self):
        assert DEFAULT_LAMBDA == 0.2
        assert MrlParams().lam == 0.2

    def test_lambda_bounds_enforced(self):
        with pytest.raises(ValidationError):
            MrlParams(-0.1)
        with pytest.raises(ValidationError):
            MrlParams(1.1)


class TestLossValue:
    @pytest.mark.parametrize("lam", [0.0, 0.5, 1.0, 0.2, 0.77])
    @pytest.mark.parametrize("fraction", [0.5, 0.25])
    def test_matches_closed_form_on_two_region_maps(self, lam, fraction):
        residual, mask = two_region(fg=0.8, bg=0.3, fraction=fraction)
        got = mrl(residual, mask, MrlParams(lam))
        assert got == pytest.approx(closed_form(lam, 0.8, 0.3, fraction), abs=1e-12)

    def test_single_element_hand_value(self):
        residual = np.full((1, 1, 1), 0.64)
        assert mrl(residual, np.ones((1, 1)), MrlParams(0.3)) == pytest.approx(
            0.3 * 0.64, abs=1e-15
        )

    def test_zero_residual_gives_zero_loss(self):
        assert mrl(np.zeros((4, 4, 3)), np.ones((4, 4))) == 0.0

    def test_negative_residual_rejected(self):
        residual = np.full((2, 2, 1), -0.1)
        with pytest.raises(ValidationError):
            mrl(residual, np.ones((2, 2)))

    def test_mask_outside_unit_interval_rejected(self):
        with pytest.raises(ValidationError):
            mrl(np.ones((2, 2, 1)), np.full((2, 2), 1.5))

    def test_residual_map_is_squared_error(self):
        pred = np.array([[[1.0, 2.0]]])
        target = np.array([[[0.5, 4.0]]])
        assert np.array_equal(residual_map(pred, target), [[[0.25, 4.0]]])

    @given(
        st.integers(min_value=0, max_value=2**32 - 1),
        st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    )
    @settings(max_examples=50)
    def test_affine_in_lambda_for_any_inputs(self, seed, lam):
        rng = np.random.default_rng(seed)
        residual = rng.uniform(0.0, 2.0, (6, 5, 3))
        mask = rng.uniform(0.0, 1.0, (6, 5))
        at0 = mrl(residual, mask, MrlParams(0.0))
        at1 = mrl(residual, mask, MrlParams(1.0))
        got = mrl(residual, mask, MrlParams(lam))
        assert got == pytest.approx((1.0 - lam) * at0 + lam * at1, abs=1e-12)


class TestGradient:
    def test_hand_formula(self):
        pred = np.array([[[0.9]]])
        target = np.array([[[0.4]]])
        mask = np.array([[1.0]])
        got = mrl_gradient(pred, target, mask, MrlParams(0.3))
        assert got[0, 0, 0] == pytest.approx(2 * 0.3 * 0.5, abs=1e-15)

    def test_zero_at_perfect_prediction(self):
        pred = np.random.default_rng(0).uniform(size=(4, 4, 2))
        assert np.array_equal(
            mrl_gradient(pred, pred, np.ones((4, 4))), np.zeros((4, 4, 2))
        )

    def test_matches_central_differences(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            pred = rng.uniform(0.0, 1.0, (8, 8, 4))
            target = pred - np.sign(rng.normal(size=pred.shape)) * rng.uniform(
                0.1, 1.0, pred.shape
            )
            mask = (rng.uniform(size=(8, 8)) > 0.5).astype(float)
            params = MrlParams(rng.uniform())
            analytic = mrl_gradient(pred, target, mask, params)
            h = 1e-6
            fd = np.zeros_like(pred)
            it = np.nditer(pred, flags=["multi_index"])
            for _v in it:
                idx = it.multi_index
                hi = pred.copy()
                lo = pred.copy()
                hi[idx] += h
                lo[idx] -= h
                fd[idx] = (
                    mrl(residual_map(hi, target), mask, params)
                    - mrl(residual_map(lo, target), mask, params)
                ) / (2 * h)
            rel = np.linalg.norm(analytic - fd) / np.linalg.norm(analytic)
            assert rel < 1e-5


class TestSweep:
    def test_returns_pairs_in_input_order(self):
        fixture = RegionFixture(fg_residual=0.9, bg_residual=0.1)
        lams = [0.8, 0.0, 0.4]
        out = lambda_sweep(fixture, lams)
        assert [lam for lam, _ in out] == lams

    def test_affine_across_the_grid(self):
        fixture = RegionFixture(fg_residual=0.9, bg_residual=0.1)
        grid = np.linspace(0.0, 1.0, 21)
        out = dict(lambda_sweep(fixture, grid))
        l0, l1 = out[0.0], out[1.0]
        for lam in grid:
            assert out[lam] == pytest.approx((1 - lam) * l0 + lam * l1, abs=1e-10)

    def test_flat_for_equal_residuals_at_half_fraction(self):
        # equal region masses make the two terms trade off exactly
        fixture = RegionFixture(fg_residual=0.6, bg_residual=0.6, foreground_fraction=0.5)
        losses = [loss for _, loss in lambda_sweep(fixture, np.linspace(0, 1, 11))]
        assert max(losses) - min(losses) < 1e-12

    def test_slope_reappears_off_half_fraction(self):
        # same residual level but 3:1 masses: slope is (2f - 1) * r
        fixture = RegionFixture(
            fg_residual=0.6, bg_residual=0.6, foreground_fraction=0.75, height=16, width=16
        )
        out = dict(lambda_sweep(fixture, [0.0, 1.0]))
        assert out[1.0] - out[0.0] == pytest.approx((2 * 0.75 - 1) * 0.6, abs=1e-12)

    def test_empty_grid_rejected(self):
        with pytest.raises(ValidationError):
            lambda_sweep(RegionFixture(), [])


class TestRegionFixture:
    def test_materialized_fraction_is_exact(self):
        residual, mask = two_region(fraction=0.25, h=8, w=8)
        assert mask.sum() == 16
        assert residual.shape == (8, 8, 4)

    def test_regions_hold_their_levels(self):
        residual, mask = two_region(fg=0.9, bg=0.2)
        assert np.all(residual[mask.astype(bool)] == 0.9)
        assert np.all(residual[~mask.astype(bool)] == 0.2)

    def test_validation(self):
        with pytest.raises(ValidationError):
            RegionFixture(foreground_fraction=1.5)
        with pytest.raises(ValidationError):
            RegionFixture(fg_residual=-1.0)
        with pytest.raises(ValidationError):
            RegionFixture(height=0)


class TestTensorFiles:
    def test_round_trip_preserves_f32_values(self, tmp_path):
        rng = np.random.default_rng(5)
        data = rng.normal(size=(6, 7, 3))
        path = tmp_path / "t.f32"
        write_tensor(path, data)
        again = read_tensor(path)
        assert again.shape == (6, 7, 3)
        assert np.array_equal(again, data.astype(np.float32).astype(np.float64))

    def test_header_is_one_json_line(self, tmp_path):
        path = tmp_path / "t.f32"
        write_tensor(path, np.zeros((2, 2, 1)))
        header = path.read_bytes().split(b"\n", 1)[0]
        import json

        assert json.loads(header) == {"dtype": "f32le", "shape": [2, 2, 1]}

    def test_truncated_payload_rejected(self, tmp_path):
        path = tmp_path / "t.f32"
        write_tensor(path, np.zeros((4, 4, 2)))
        blob = path.read_bytes()
        path.write_bytes(blob[:-4])
        with pytest.raises(ValidationError, match="bytes"):
            read_tensor(path)

    def test_unknown_dtype_rejected(self, tmp_path):
        path = tmp_path / "t.f32"
        path.write_bytes(b'{"dtype": "f64le", "shape": [1]}\n' + b"\x00" * 8)
        with pytest.raises(ValidationError, match="dtype"):
            read_tensor(path)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "t.f32"
        path.write_bytes(b"\x00\x00\x80\x3f")
        with pytest.raises(ValidationError):
            read_tensor(path)

    def test_missing_file_raises_oserror(self, tmp_path):
        with pytest.raises(OSError):
            read_tensor(tmp_path / "absent.f32")
