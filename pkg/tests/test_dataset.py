import numpy as np
import pytest
from PIL import Image

from seqvpr.dataset import (
    GroundTruth,
    aligned_ground_truth,
    generate_synthetic,
    load_ground_truth,
    load_image_set,
    write_ground_truth_csv,
)
from seqvpr.matcher import build_similarity_matrix


class TestLoadImageSet:
    def test_numeric_aware_ordering(self, image_dir):
        images = load_image_set(image_dir)
        names = [p.rsplit("/", 1)[-1] for p in images.source_paths]
        assert names == ["img1.png", "img2.png", "img10.png"]

    def test_empty_dir_errors(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        with pytest.raises(ValueError, match="no frames"):
            load_image_set(empty)

    def test_missing_dir_errors(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_image_set(tmp_path / "nope")

    def test_single_jpeg(self, tmp_path):
        d = tmp_path / "one"
        d.mkdir()
        arr = np.zeros((480, 640), dtype=np.uint8)
        Image.fromarray(arr, mode="L").save(d / "frame.jpg")
        images = load_image_set(d)
        assert len(images) == 1
        assert images.frames[0].shape == (480, 640)

    def test_undecodable_file_named_in_error(self, tmp_path):
        d = tmp_path / "bad"
        d.mkdir()
        (d / "broken.png").write_bytes(b"this is not a png")
        with pytest.raises(ValueError, match="broken.png"):
            load_image_set(d)

    def test_reload_is_identical(self, image_dir):
        a = load_image_set(image_dir)
        b = load_image_set(image_dir)
        assert a.source_paths == b.source_paths
        for fa, fb in zip(a.frames, b.frames):
            assert np.array_equal(fa, fb)

    def test_rgb_converted_with_bt601_luma(self, tmp_path):
        d = tmp_path / "rgb"
        d.mkdir()
        rgb = np.zeros((8, 8, 3), dtype=np.uint8)
        rgb[..., 0], rgb[..., 1], rgb[..., 2] = 200, 100, 50
        Image.fromarray(rgb, mode="RGB").save(d / "c.png")
        frame = load_image_set(d).frames[0]
        expected = 0.299 * 200 + 0.587 * 100 + 0.114 * 50
        assert abs(float(frame[0, 0]) - expected) <= 1.0
        assert frame.dtype == np.uint8

    def test_extension_filter(self, image_dir):
        (image_dir / "notes.txt").write_text("ignored")
        images = load_image_set(image_dir, extensions={"png"})
        assert len(images) == 3


class TestGroundTruthCsv:
    def write(self, tmp_path, text):
        p = tmp_path / "gt.csv"
        p.write_text(text)
        return p

    def test_basic_row(self, tmp_path):
        p = self.write(tmp_path, "0,0,2\n")
        gt = load_ground_truth(p, num_queries=1, num_refs=100)
        assert gt.entry(0) == (0, 2)

    def test_header_skipped(self, tmp_path):
        p = self.write(tmp_path, "query_index,ref_lo,ref_hi\n0,3,7\n")
        gt = load_ground_truth(p, num_queries=1, num_refs=10)
        assert gt.entry(0) == (3, 7)

    def test_out_of_range_ref(self, tmp_path):
        p = self.write(tmp_path, "0,0,1\n1,2,3\n2,4,5\n3,6,7\n4,8,9\n5,90,120\n")
        with pytest.raises(ValueError, match="out of range"):
            load_ground_truth(p, num_queries=6, num_refs=100)

    def test_missing_entry(self, tmp_path):
        p = self.write(tmp_path, "0,0,0\n1,1,1\n2,2,2\n")
        with pytest.raises(ValueError, match="missing entry for query index 3"):
            load_ground_truth(p, num_queries=4, num_refs=10)

    def test_duplicate_entry(self, tmp_path):
        p = self.write(tmp_path, "0,0,0\n0,1,1\n")
        with pytest.raises(ValueError, match="duplicate"):
            load_ground_truth(p, num_queries=1, num_refs=10)

    def test_hi_below_lo(self, tmp_path):
        p = self.write(tmp_path, "0,5,3\n")
        with pytest.raises(ValueError, match="hi 3 < lo 5"):
            load_ground_truth(p, num_queries=1, num_refs=10)

    def test_roundtrip_via_writer(self, tmp_path):
        gt = aligned_ground_truth(10, 12, tolerance=1)
        p = tmp_path / "gt.csv"
        write_ground_truth_csv(gt, p)
        loaded = load_ground_truth(p, num_queries=10, num_refs=12)
        assert np.array_equal(loaded.lo, gt.lo)
        assert np.array_equal(loaded.hi, gt.hi)


class TestAlignedGroundTruth:
    def test_zero_tolerance(self):
        gt = aligned_ground_truth(100, 100, tolerance=0)
        assert all(gt.entry(i) == (i, i) for i in range(100))

    def test_clipping_low(self):
        gt = aligned_ground_truth(100, 100, tolerance=2)
        assert gt.entry(0) == (0, 2)

    def test_clipping_high(self):
        gt = aligned_ground_truth(100, 100, tolerance=2)
        assert gt.entry(99) == (97, 99)

    def test_all_entries_within_ref_range(self):
        for t in (0, 1, 3, 10):
            gt = aligned_ground_truth(50, 60, tolerance=t)
            assert (gt.lo >= 0).all() and (gt.hi <= 59).all() and (gt.lo <= gt.hi).all()

    def test_more_queries_than_refs_rejected(self):
        with pytest.raises(ValueError):
            aligned_ground_truth(10, 5, tolerance=0)

    def test_invalid_range_rejected(self):
        with pytest.raises(ValueError):
            GroundTruth(lo=np.array([0]), hi=np.array([5]), num_refs=3)


class TestGenerateSynthetic:
    def test_zero_noise_queries_equal_refs(self):
        q, r, gt = generate_synthetic(10, 16, noise_sigma=0.0, seed=1)
        assert np.array_equal(q.matrix, r.matrix)
        assert gt.tolerance == 0

    def test_deterministic_under_seed(self):
        a = generate_synthetic(10, 16, noise_sigma=0.5, seed=7)
        b = generate_synthetic(10, 16, noise_sigma=0.5, seed=7)
        assert np.array_equal(a[0].matrix, b[0].matrix)
        assert np.array_equal(a[1].matrix, b[1].matrix)

    def test_different_seeds_differ(self):
        a = generate_synthetic(10, 16, noise_sigma=0.5, seed=7)
        b = generate_synthetic(10, 16, noise_sigma=0.5, seed=8)
        assert not np.array_equal(a[0].matrix, b[0].matrix)

    def test_dim_smaller_than_places_rejected(self):
        with pytest.raises(ValueError):
            generate_synthetic(10, 5, noise_sigma=0.0, seed=0)

    def test_zero_noise_diagonal_is_unique_maximum(self):
        q, r, _ = generate_synthetic(12, 20, noise_sigma=0.0, seed=3)
        sim = build_similarity_matrix(q, r).scores
        for i in range(12):
            row = sim[i].copy()
            assert row.argmax() == i
            row[i] = -np.inf
            assert sim[i, i] > row.max()

    def test_queries_unit_norm(self):
        q, _, _ = generate_synthetic(8, 12, noise_sigma=1.0, seed=5)
        np.testing.assert_allclose(q.norms, 1.0, atol=1e-6)
