"""Diagonal relighting, the edge detector, mask pooling, and the manifest."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lumikit import (
    AugmentationManifest,
    IlluminantRgb,
    ManifestRecord,
    PromptTemplate,
    ValidationError,
    apply_flat_light,
    canny_edges,
    downsample_mask,
    edge_disagreement,
    generate_variants,
    pngio,
    preset_to_illuminant_rgb,
)
from lumikit.relight import count_clipped_pixels

from oracles import canny_reference


def checker(h=48, w=48, seed=3):
    rng = np.random.default_rng(seed)
    img = rng.uniform(0.05, 0.6, (h, w, 3))
    img[h // 4 : 3 * h // 4, w // 4 : 3 * w // 4] += 0.3
    return img


class TestApplyFlatLight:
    def test_is_exact_per_channel_multiplication(self):
        img = checker()
        g = IlluminantRgb.from_vector([1.8, 1.0, 0.4])
        out, _ = apply_flat_light(img, g)
        assert np.array_equal(out, img * np.array([1.8, 1.0, 0.4]))

    def test_does_not_clamp(self):
        img = np.full((4, 4, 3), 0.9)
        out, clipped = apply_flat_light(img, IlluminantRgb.from_vector([2.0, 1.0, 1.0]))
        assert out[..., 0].max() == pytest.approx(1.8)
        assert clipped == 16

    def test_clip_count_is_per_pixel_not_per_value(self):
        img = np.zeros((2, 2, 3))
        img[0, 0] = [0.9, 0.9, 0.9]  # both red and blue will exceed 1
        img[0, 1] = [0.9, 0.1, 0.1]  # only red exceeds 1
        out, clipped = apply_flat_light(img, IlluminantRgb.from_vector([1.5, 1.0, 1.5]))
        assert clipped == 2
        assert count_clipped_pixels(out) == 2

    def test_rejects_nonfinite_input(self):
        img = checker(8, 8)
        img[0, 0, 0] = np.nan
        with pytest.raises(ValidationError):
            apply_flat_light(img, IlluminantRgb.from_vector([1.0, 1.0, 1.0]))


def vertical_step(h=64, w=64, lo=0.15, hi=0.7):
    img = np.full((h, w, 3), lo)
    img[:, w // 2 :] = hi
    return img


class TestCannyEdges:
    def test_matches_committed_golden_on_disk(self, disk32, fixtures_dir):
        golden = pngio.read_edge_map(fixtures_dir / "disk32_edges_golden.png")
        assert np.array_equal(canny_edges(disk32), golden)

    def test_matches_loop_oracle_on_disk(self, disk32):
        assert np.array_equal(canny_edges(disk32), canny_reference(disk32))

    def test_matches_loop_oracle_on_natural_scene(self, natural1):
        assert np.array_equal(canny_edges(natural1), canny_reference(natural1))

    def test_output_is_binary_uint8(self, disk32):
        edges = canny_edges(disk32)
        assert edges.dtype == np.uint8
        assert edges.shape == disk32.shape[:2]
        assert set(np.unique(edges)) <= {0, 1}

    def test_blank_image_has_no_edges(self):
        assert canny_edges(np.full((32, 32, 3), 0.4)).sum() == 0

    def test_relative_thresholds_are_scale_invariant(self, disk32):
        before = canny_edges(disk32)
        after = canny_edges(disk32 * 0.37)
        assert np.array_equal(before, after)

    def test_absolute_thresholds_are_not(self, disk32):
        # same scaling, absolute mode: the dimmed image falls under threshold
        before = canny_edges(disk32, relative_thresholds=False)
        after = canny_edges(disk32 * 0.05, relative_thresholds=False)
        assert before.sum() > 0
        assert after.sum() < before.sum()

    def test_step_edge_survives_every_preset_exactly(self):
        img = vertical_step()
        base = canny_edges(img)
        assert base.sum() > 0
        for pid in ("c1", "c5", "c7"):
            relit, _ = apply_flat_light(img, preset_to_illuminant_rgb(pid))
            assert edge_disagreement(base, canny_edges(relit)) == 0.0

    def test_threshold_ordering_enforced(self, disk32):
        with pytest.raises(ValidationError):
            canny_edges(disk32, low_threshold=0.3, high_threshold=0.2)


class TestEdgeDisagreement:
    def test_identical_maps_agree(self, disk32):
        e = canny_edges(disk32)
        assert edge_disagreement(e, e) == 0.0

    def test_complement_disagrees_everywhere(self):
        a = np.zeros((8, 8), dtype=np.uint8)
        b = np.ones((8, 8), dtype=np.uint8)
        assert edge_disagreement(a, b) == 1.0

    def test_counts_differing_fraction(self):
        a = np.zeros((4, 4), dtype=np.uint8)
        b = a.copy()
        b[0, :2] = 1
        assert edge_disagreement(a, b) == pytest.approx(2 / 16)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            edge_disagreement(np.zeros((4, 4)), np.zeros((4, 5)))


class TestDownsampleMask:
    def test_integral_ratio_equals_block_mean(self):
        rng = np.random.default_rng(11)
        mask = (rng.uniform(size=(64, 48)) > 0.5).astype(float)
        got = downsample_mask(mask, 12, 16)
        want = mask.reshape(16, 4, 12, 4).mean(axis=(1, 3))
        assert np.max(np.abs(got - want)) < 1e-12

    def test_fractional_boundary_is_exact(self):
        # 96 rows pooled to 8 cells of 12; a transition at row 54 splits
        # cell 4 ([48, 60)) into 6 foreground rows -> exactly 0.5
        mask = np.zeros((96, 24))
        mask[:54] = 1.0
        got = downsample_mask(mask, 4, 8)
        expected_col = np.array([1, 1, 1, 1, 0.5, 0, 0, 0])
        assert np.max(np.abs(got - expected_col[:, None])) < 1e-12

    def test_values_stay_in_unit_interval(self):
        rng = np.random.default_rng(12)
        mask = (rng.uniform(size=(50, 50)) > 0.3).astype(float)
        got = downsample_mask(mask, 7, 9)
        assert got.min() >= 0.0 and got.max() <= 1.0

    @given(
        st.integers(min_value=1, max_value=173),
        st.integers(min_value=1, max_value=10),
        st.integers(min_value=1, max_value=10),
    )
    @settings(max_examples=40)
    def test_global_mean_is_preserved(self, seed, th, tw):
        # equal-area cells mean the pooled average must equal the source mean
        rng = np.random.default_rng(seed)
        h, w = rng.integers(max(th, 10), 80), rng.integers(max(tw, 10), 80)
        mask = (rng.uniform(size=(h, w)) > rng.uniform()).astype(float)
        got = downsample_mask(mask, tw, th)
        assert abs(got.mean() - mask.mean()) < 1e-12

    def test_upsampling_rejected(self):
        with pytest.raises(ValidationError):
            downsample_mask(np.zeros((8, 8)), 16, 4)


class TestPromptTemplate:
    def test_default_render(self):
        t = PromptTemplate()
        assert t.render("c1") == "a photo of [v] dog in [c1*] illuminant"

    def test_custom_fields(self):
        t = PromptTemplate(
            concept_token="<sks>",
            class_noun="backpack",
            illuminant_token_pattern="<{}>",
            carrier_text="{concept} {noun} lit by {illuminant}",
        )
        assert t.render("c4") == "<sks> backpack lit by <c4>"

    def test_pattern_needs_exactly_one_slot(self):
        with pytest.raises(ValidationError):
            PromptTemplate(illuminant_token_pattern="[*]")
        with pytest.raises(ValidationError):
            PromptTemplate(illuminant_token_pattern="[{}{}]")

    def test_carrier_missing_placeholder_rejected_at_render(self):
        t = PromptTemplate(carrier_text="a photo of {concept} {noun}")
        with pytest.raises(ValidationError):
            t.render("c1")

    def test_duplicated_token_rejected(self):
        t = PromptTemplate(carrier_text="{concept} {concept} {noun} {illuminant}")
        with pytest.raises(ValidationError):
            t.render("c1")


class TestManifest:
    def record(self, pid="c1"):
        return ManifestRecord(
            source_image_path="source.png",
            preset_id=pid,
            variant_image_path=f"source_{pid}.png",
            mask_path="source_mask.png",
            edge_map_path="source_edges.png",
            prompt_text=PromptTemplate().render(pid),
            illuminant_gains=tuple(preset_to_illuminant_rgb(pid).as_array()),
            clipped_pixel_count=0,
        )

    def test_record_json_round_trip(self):
        rec = self.record()
        again = ManifestRecord.from_json(rec.to_json())
        assert again == rec

    def test_record_rejects_malformed_line(self):
        with pytest.raises(ValidationError):
            ManifestRecord.from_json("not json at all")
        with pytest.raises(ValidationError):
            ManifestRecord.from_json('{"source_image_path": "x.png"}')

    def test_duplicate_source_preset_pair_rejected(self):
        with pytest.raises(ValidationError):
            AugmentationManifest(records=[self.record(), self.record()], root=".")

    def test_write_load_round_trip(self, tmp_path):
        manifest = AugmentationManifest(
            records=[self.record("c1"), self.record("c2")], root=tmp_path
        )
        for rel in manifest.referenced_paths():
            (tmp_path / rel).touch()  # write() checks the files exist
        path = manifest.write(tmp_path / "manifest.jsonl")
        again = AugmentationManifest.load(path)
        assert again.records == manifest.records

    def test_validate_files_names_missing_paths(self, tmp_path):
        manifest = AugmentationManifest(records=[self.record()], root=tmp_path)
        with pytest.raises(ValidationError, match="source.png"):
            manifest.validate_files()


class TestGenerateVariants:
    def run(self, tmp_path, presets=("c1", "c2"), **kw):
        img = checker()
        mask = np.zeros(img.shape[:2])
        mask[10:30, 14:40] = 1.0
        return (
            img,
            mask,
            generate_variants(
                img, mask, PromptTemplate(), presets=presets, out_dir=tmp_path, **kw
            ),
        )

    def test_file_layout_and_manifest(self, tmp_path):
        img, mask, manifest = self.run(tmp_path)
        for name in (
            "source.png",
            "source_edges.png",
            "source_mask.png",
            "source_c1.png",
            "source_c2.png",
            "manifest.jsonl",
        ):
            assert (tmp_path / name).exists(), name
        assert [r.preset_id for r in manifest.records] == ["c1", "c2"]
        manifest.validate_files()

    def test_records_carry_preset_gains_and_prompts(self, tmp_path):
        _, _, manifest = self.run(tmp_path)
        rec = manifest.records[0]
        assert rec.illuminant_gains == pytest.approx(
            tuple(preset_to_illuminant_rgb("c1").as_array())
        )
        assert rec.prompt_text == "a photo of [v] dog in [c1*] illuminant"
        assert rec.edge_map_path == "source_edges.png"

    def test_edge_map_is_shared_and_from_the_source(self, tmp_path):
        img, _, manifest = self.run(tmp_path)
        stored = pngio.read_edge_map(tmp_path / "source_edges.png")
        assert np.array_equal(stored, canny_edges(img))
        assert len({r.edge_map_path for r in manifest.records}) == 1

    def test_variant_file_round_trips_through_16bit(self, tmp_path):
        img, _, manifest = self.run(tmp_path, presets=("c2",))
        relit, _ = apply_flat_light(img, preset_to_illuminant_rgb("c2"))
        stored = pngio.read_image(tmp_path / "source_c2.png")
        assert np.max(np.abs(stored - np.clip(relit, 0.0, 1.0))) < 2e-4

    def test_identity_preset_writes_unmodified_variant(self, tmp_path):
        img, _, manifest = self.run(tmp_path, presets=("c0",))
        assert manifest.records[0].illuminant_gains == (1.0, 1.0, 1.0)
        stored = pngio.read_image(tmp_path / "source_c0.png")
        assert np.max(np.abs(stored - img)) < 2e-4

    def test_clipped_counts_recorded(self, tmp_path):
        img = np.full((32, 32, 3), 0.8)
        mask = np.ones((32, 32))
        manifest = generate_variants(
            img, mask, PromptTemplate(), presets=("c1",), out_dir=tmp_path
        )
        relit, clipped = apply_flat_light(img, preset_to_illuminant_rgb("c1"))
        assert manifest.records[0].clipped_pixel_count == clipped == 32 * 32

    def test_soft_mask_copied_byte_exact(self, tmp_path, fixtures_dir):
        soft_src = fixtures_dir / "natural1_mask.png"
        img = checker(128, 128)
        mask = pngio.read_mask(soft_src)
        generate_variants(
            img,
            mask,
            PromptTemplate(),
            presets=("c1",),
            out_dir=tmp_path,
            soft_mask_source=soft_src,
        )
        assert (tmp_path / "source_mask_soft.png").read_bytes() == soft_src.read_bytes()

    def test_mask_shape_mismatch_rejected(self, tmp_path):
        img = checker()
        with pytest.raises(ValidationError):
            generate_variants(img, np.ones((8, 8)), PromptTemplate(), out_dir=tmp_path)

    def test_unknown_preset_rejected(self, tmp_path):
        img = checker()
        with pytest.raises(ValidationError):
            generate_variants(
                img,
                np.ones(img.shape[:2]),
                PromptTemplate(),
                presets=("c1", "nope"),
                out_dir=tmp_path,
            )
