"""Normal quantiles, preference matrices, and Case V scaling."""

from __future__ import annotations

import numpy as np
import pytest
from scipy import stats

from lumikit import (
    PreferenceMatrix,
    StudyResult,
    ValidationError,
    bootstrap_scales,
    norm_cdf,
    norm_ppf,
    run_study,
    thurstone_case_v,
)


def pair_matrix(wins: int, trials: int) -> PreferenceMatrix:
    return PreferenceMatrix(
        methods=("a", "b"),
        counts=[[0, wins], [trials - wins, 0]],
        trials=trials,
    )


class TestNormalQuantiles:
    def test_cdf_known_values(self):
        assert norm_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
        assert norm_cdf(1.0) == pytest.approx(0.8413447460685429, abs=1e-12)
        assert norm_cdf(-1.0) == pytest.approx(1.0 - 0.8413447460685429, abs=1e-12)

    def test_ppf_center(self):
        assert norm_ppf(0.5) == 0.0

    def test_ppf_cdf_round_trip_grid(self):
        # 1000-point grid across (0.001, 0.999)
        for p in np.linspace(0.001, 0.999, 1000):
            assert abs(norm_cdf(norm_ppf(float(p))) - p) < 1e-8

    def test_ppf_matches_scipy(self):
        for p in np.linspace(1e-6, 1.0 - 1e-6, 2001):
            assert abs(norm_ppf(float(p)) - stats.norm.ppf(p)) < 1e-9

    def test_ppf_tails(self):
        assert norm_ppf(1e-10) == pytest.approx(stats.norm.ppf(1e-10), abs=1e-7)
        assert norm_ppf(1.0 - 1e-12) > 6.0

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.5, 1.5])
    def test_ppf_domain_enforced(self, p):
        with pytest.raises(ValidationError):
            norm_ppf(p)

    def test_ppf_antisymmetric(self):
        for p in (0.01, 0.2, 0.45):
            assert norm_ppf(p) == pytest.approx(-norm_ppf(1.0 - p), abs=1e-12)


class TestPreferenceMatrix:
    def test_accepts_consistent_counts(self):
        m = pair_matrix(30, 50)
        assert m.n == 2
        assert m.proportions()[0, 1] == pytest.approx(0.6)

    def test_asymmetric_totals_rejected_naming_the_pair(self):
        with pytest.raises(ValidationError, match=r"\(a, b\)"):
            PreferenceMatrix(("a", "b"), [[0, 30], [10, 0]], trials=50)

    def test_nonzero_diagonal_rejected(self):
        with pytest.raises(ValidationError):
            PreferenceMatrix(("a", "b"), [[1, 25], [25, 0]], trials=50)

    def test_negative_counts_rejected(self):
        with pytest.raises(ValidationError):
            PreferenceMatrix(("a", "b"), [[0, -1], [51, 0]], trials=50)

    def test_single_method_rejected(self):
        with pytest.raises(ValidationError):
            PreferenceMatrix(("a",), [[0]], trials=10)

    def test_duplicate_names_rejected(self):
        with pytest.raises(ValidationError):
            PreferenceMatrix(("a", "a"), [[0, 25], [25, 0]], trials=50)

    def test_proportions_clipped_away_from_the_poles(self):
        m = pair_matrix(50, 50)  # a sweep: p would be 1.0
        p = m.proportions()
        assert p[0, 1] == pytest.approx(1.0 - 1.0 / 100.0)
        assert p[1, 0] == pytest.approx(1.0 / 100.0)

    def test_from_csv_keeps_first_appearance_order(self, fixtures_dir):
        m = PreferenceMatrix.from_csv(fixtures_dir / "prefs_3method.csv")
        assert m.methods == ("full_method", "no_edge_guidance", "baseline_prompt")
        assert m.trials == 50
        assert m.counts[0, 1] == 41  # full_method over no_edge_guidance
        assert m.counts[2, 0] == 4

    def test_from_csv_rejects_bad_header(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("a,b,c\nx,y,1\n")
        with pytest.raises(ValidationError):
            PreferenceMatrix.from_csv(path)

    def test_from_csv_accepts_a_single_consistent_pair(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("winner,loser,count\nx,y,30\ny,x,10\n")
        prefs = PreferenceMatrix.from_csv(path)
        assert prefs.trials == 40

    def test_from_csv_rejects_inconsistent_totals(self, tmp_path):
        # pair (y, z) totals 30 while the others total 40
        path = tmp_path / "p.csv"
        path.write_text(
            "winner,loser,count\n"
            "x,y,30\ny,x,10\n"
            "x,z,25\nz,x,15\n"
            "y,z,20\nz,y,10\n"
        )
        with pytest.raises(ValidationError, match=r"\(y, z\)"):
            PreferenceMatrix.from_csv(path)

    def test_from_csv_missing_file_is_io_error(self, tmp_path):
        with pytest.raises(OSError):
            PreferenceMatrix.from_csv(tmp_path / "absent.csv")


class TestCaseV:
    def test_even_split_gives_zero_difference(self):
        scales = thurstone_case_v(pair_matrix(25, 50))
        assert abs(scales[0] - scales[1]) < 1e-3
        assert scales.min() == 0.0

    def test_one_sigma_preference_gives_unit_difference(self):
        # 8413 of 10000 wins: the win proportion is exactly Phi(1)
        scales = thurstone_case_v(pair_matrix(8413, 10000))
        assert scales[0] - scales[1] == pytest.approx(1.0, abs=1e-3)

    def test_transitive_three_method_ladder(self):
        # pairwise proportions Phi(1), Phi(1), Phi(2) -> scales (2, 1, 0)
        t = 10000
        counts = np.zeros((3, 3), dtype=int)
        counts[0, 1] = 8413
        counts[1, 0] = t - 8413
        counts[1, 2] = 8413
        counts[2, 1] = t - 8413
        counts[0, 2] = 9772
        counts[2, 0] = t - 9772
        scales = thurstone_case_v(PreferenceMatrix(("a", "b", "c"), counts, t))
        assert scales == pytest.approx([2.0, 1.0, 0.0], abs=0.01)

    def test_minimum_is_shifted_to_zero(self, fixtures_dir):
        m = PreferenceMatrix.from_csv(fixtures_dir / "prefs_3method.csv")
        scales = thurstone_case_v(m)
        assert scales.min() == 0.0
        # the strongest method on this fixture is the first column
        assert int(np.argmax(scales)) == 0

    def test_pairwise_differences_survive_relabeling(self, fixtures_dir):
        m = PreferenceMatrix.from_csv(fixtures_dir / "prefs_3method.csv")
        scales = thurstone_case_v(m)
        perm = [2, 0, 1]
        m2 = PreferenceMatrix(
            tuple(m.methods[i] for i in perm),
            m.counts[np.ix_(perm, perm)],
            m.trials,
        )
        scales2 = thurstone_case_v(m2)
        for a in range(3):
            for b in range(3):
                assert scales[perm[a]] - scales[perm[b]] == pytest.approx(
                    scales2[a] - scales2[b], abs=1e-12
                )


class TestBootstrap:
    def test_same_seed_reproduces_the_band(self, fixtures_dir):
        m = PreferenceMatrix.from_csv(fixtures_dir / "prefs_3method.csv")
        lo1, hi1 = bootstrap_scales(m, n_resamples=200, seed=7)
        lo2, hi2 = bootstrap_scales(m, n_resamples=200, seed=7)
        assert np.array_equal(lo1, lo2) and np.array_equal(hi1, hi2)

    def test_different_seed_moves_the_band(self, fixtures_dir):
        m = PreferenceMatrix.from_csv(fixtures_dir / "prefs_3method.csv")
        lo1, _ = bootstrap_scales(m, n_resamples=200, seed=7)
        lo2, _ = bootstrap_scales(m, n_resamples=200, seed=8)
        assert not np.array_equal(lo1, lo2)

    def test_band_brackets_the_point_estimate(self, fixtures_dir):
        m = PreferenceMatrix.from_csv(fixtures_dir / "prefs_3method.csv")
        scales = thurstone_case_v(m)
        lo, hi = bootstrap_scales(m, n_resamples=400, seed=42)
        assert np.all(lo <= scales + 1e-9)
        assert np.all(hi >= scales - 1e-9)

    def test_rejects_bad_parameters(self, fixtures_dir):
        m = PreferenceMatrix.from_csv(fixtures_dir / "prefs_3method.csv")
        with pytest.raises(ValidationError):
            bootstrap_scales(m, n_resamples=0)
        with pytest.raises(ValidationError):
            bootstrap_scales(m, ci_level=1.0)


class TestRunStudy:
    def test_result_document_shape(self, fixtures_dir, tmp_path):
        m = PreferenceMatrix.from_csv(fixtures_dir / "prefs_3method.csv")
        result = run_study(m, n_resamples=100)
        doc = result.to_dict()
        assert doc["methods"] == list(m.methods)
        assert len(doc["scales"]) == 3
        assert doc["bootstrap"]["n_resamples"] == 100
        out = tmp_path / "scales.json"
        result.write(out)
        assert out.exists()

    def test_bootstrap_can_be_skipped(self, fixtures_dir):
        m = PreferenceMatrix.from_csv(fixtures_dir / "prefs_3method.csv")
        result = run_study(m, with_bootstrap=False)
        assert result.bootstrap == {}
        assert "bootstrap" not in result.to_dict()

    def test_study_result_is_constructible_directly(self):
        r = StudyResult(methods=("a", "b"), scales=np.array([1.0, 0.0]), trials=10)
        assert r.to_dict()["scales"] == [1.0, 0.0]
