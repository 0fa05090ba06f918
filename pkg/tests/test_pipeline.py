import cv2
import numpy as np
import pytest

from cnpfuse import (
    FusionConfig,
    NeuronParams,
    SpikeMatrix,
    decision_map,
    fuse_pair,
    run_fusion,
    spike_density,
)


def make_texture(rng, shape=(128, 128)):
    tex = cv2.GaussianBlur(rng.random(shape), (0, 0), 0.8)
    return (tex - tex.min()) / (tex.max() - tex.min())


def half_blur_pair(rng, shape=(128, 128), sigma=3.0):
    """Shared sharp texture; A blurred on the left half, B on the right.

    Ground truth: take A (mask 1) on the right half.
    """
    tex = make_texture(rng, shape)
    blurred = cv2.GaussianBlur(tex, (0, 0), sigma)
    split = shape[1] // 2
    a = tex.copy()
    a[:, :split] = blurred[:, :split]
    b = tex.copy()
    b[:, split:] = blurred[:, split:]
    gt = np.zeros(shape, dtype=np.uint8)
    gt[:, split:] = 1
    return a, b, gt, split


def seam_free_region(shape, split, band):
    keep = np.ones(shape, dtype=bool)
    keep[:, split - band : split + band] = False
    return keep


class TestSpikeDensity:
    def test_full_window_center(self):
        sm = SpikeMatrix(counts=np.ones((5, 5), dtype=np.int64), total_steps=1)
        assert spike_density(sm, 1)[2, 2] == 9

    def test_truncated_window_corner(self):
        sm = SpikeMatrix(counts=np.ones((5, 5), dtype=np.int64), total_steps=1)
        assert spike_density(sm, 1)[0, 0] == 4

    def test_matches_brute_force(self):
        rng = np.random.default_rng(21)
        counts = rng.integers(0, 110, size=(16, 16), dtype=np.int64)
        sm = SpikeMatrix(counts=counts, total_steps=110)
        for radius in (1, 3, 8):
            got = spike_density(sm, radius)
            want = np.zeros_like(counts)
            for i in range(16):
                for j in range(16):
                    want[i, j] = counts[
                        max(0, i - radius) : i + radius + 1,
                        max(0, j - radius) : j + radius + 1,
                    ].sum()
            np.testing.assert_array_equal(got, want)


class TestDecisionMap:
    def test_strict_winner(self):
        assert decision_map(np.array([[2.0]]), np.array([[1.0]]))[0, 0] == 1

    def test_tie_goes_to_b(self):
        assert decision_map(np.array([[2.0]]), np.array([[2.0]]))[0, 0] == 0

    def test_identical_densities_all_zero(self):
        f = np.arange(12.0).reshape(3, 4)
        assert not decision_map(f, f).any()

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            decision_map(np.zeros((2, 2)), np.zeros((3, 3)))


class TestFusePair:
    def test_all_ones_mask_returns_a(self):
        rng = np.random.default_rng(22)
        a = rng.integers(0, 256, (8, 8, 3), dtype=np.uint8)
        b = rng.integers(0, 256, (8, 8, 3), dtype=np.uint8)
        np.testing.assert_array_equal(fuse_pair(a, b, np.ones((8, 8), np.uint8)), a)

    def test_all_zero_mask_returns_b(self):
        rng = np.random.default_rng(23)
        a = rng.integers(0, 256, (8, 8), dtype=np.uint8)
        b = rng.integers(0, 256, (8, 8), dtype=np.uint8)
        np.testing.assert_array_equal(fuse_pair(a, b, np.zeros((8, 8), np.uint8)), b)

    def test_equal_sources_mask_irrelevant(self):
        rng = np.random.default_rng(24)
        a = rng.integers(0, 256, (6, 6), dtype=np.uint8)
        mask = rng.integers(0, 2, (6, 6)).astype(np.uint8)
        np.testing.assert_array_equal(fuse_pair(a, a.copy(), mask), a)

    def test_shape_and_mask_mismatch(self):
        with pytest.raises(ValueError):
            fuse_pair(np.zeros((4, 4)), np.zeros((5, 5)), np.zeros((4, 4)))
        with pytest.raises(ValueError):
            fuse_pair(np.zeros((4, 4)), np.zeros((4, 4)), np.zeros((5, 5)))


class TestRunFusion:
    def test_identical_pair_is_identity(self):
        rng = np.random.default_rng(25)
        img = (make_texture(rng, (40, 40)) * 255).astype(np.uint8)
        res = run_fusion([img, img.copy()], FusionConfig(radius=4, iterations=30))
        np.testing.assert_array_equal(res.fused, img)
        assert not res.decision.any()

    def test_rejects_degenerate_inputs(self):
        img = np.zeros((8, 8), dtype=np.uint8)
        with pytest.raises(ValueError):
            run_fusion([img])
        with pytest.raises(ValueError):
            run_fusion([img, np.zeros((9, 9), dtype=np.uint8)])

    def test_half_blur_pair_recovers_ground_truth(self):
        rng = np.random.default_rng(26)
        a, b, gt, split = half_blur_pair(rng)
        res = run_fusion([a, b], FusionConfig())
        keep = seam_free_region(gt.shape, split, band=16)
        accuracy = (res.decision[keep] == gt[keep]).mean()
        assert accuracy >= 0.95

    def test_selection_purity(self):
        rng = np.random.default_rng(27)
        a, b, _, _ = half_blur_pair(rng, shape=(64, 64))
        res = run_fusion([a, b], FusionConfig(radius=8))
        matches_one = (res.fused == a) | (res.fused == b)
        assert matches_one.all()

    def test_swap_symmetry(self):
        rng = np.random.default_rng(28)
        a, b, _, _ = half_blur_pair(rng, shape=(64, 64))
        cfg = FusionConfig(radius=8)
        fwd = run_fusion([a, b], cfg)
        rev = run_fusion([b, a], cfg)
        ties = fwd.densities[0] == fwd.densities[1]
        np.testing.assert_array_equal(fwd.decision[~ties], 1 - rev.decision[~ties])
        np.testing.assert_array_equal(fwd.fused[~ties], rev.fused[~ties])

    def test_focused_regions_spike_more(self):
        rng = np.random.default_rng(29)
        a, _, _, split = half_blur_pair(rng)
        res = run_fusion([a, make_texture(rng)], FusionConfig())
        counts = res.spike_matrices[0].counts
        # lattice A is sharp on the right half, blurred on the left
        assert counts[:, split + 16 :].mean() > counts[:, : split - 16].mean()

    def test_no_continuous_firing_with_autoconfig(self):
        rng = np.random.default_rng(30)
        a, b, _, _ = half_blur_pair(rng)
        res = run_fusion([a, b], FusionConfig())
        for sm in res.spike_matrices:
            assert sm.counts.max() < sm.total_steps

    def test_three_sources_argmax(self):
        rng = np.random.default_rng(31)
        tex = make_texture(rng, (96, 96))
        blurred = cv2.GaussianBlur(tex, (0, 0), 3.0)
        sources = []
        for k in range(3):
            img = tex.copy()
            img[:, 32 * k : 32 * (k + 1)] = blurred[:, 32 * k : 32 * (k + 1)]
            sources.append(img)
        # source k is blurred on stripe k, so the sharp composite needs
        # stripe k taken from any other source
        res = run_fusion(sources, FusionConfig(radius=8))
        keep = np.ones((96, 96), dtype=bool)
        for edge in (32, 64):
            keep[:, edge - 8 : edge + 8] = False
        wrong = np.zeros((96, 96), dtype=bool)
        for k in range(3):
            wrong[:, 32 * k : 32 * (k + 1)] = res.decision[:, 32 * k : 32 * (k + 1)] == k
        assert (~wrong[keep]).mean() >= 0.95
        matches = (res.fused == sources[0]) | (res.fused == sources[1]) | (
            res.fused == sources[2]
        )
        assert matches.all()
