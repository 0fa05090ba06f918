import json

import numpy as np
import pytest
from skimage.metrics import structural_similarity

from cnpfuse import MetricReport, evaluate_pair, psnr, qabf, ssim
from cnpfuse.metrics import PSNR_CAP_DB, _QA, _QG, _SOBEL_X, _SOBEL_Y


def brute_force_qabf(fused, a, b):
    """Per-pixel loop evaluation of the gradient-preservation formula."""

    def grads(img):
        m, n = img.shape
        padded = np.pad(img, 1, mode="edge")
        gx = np.zeros((m, n))
        gy = np.zeros((m, n))
        for i in range(m):
            for j in range(n):
                win = padded[i : i + 3, j : j + 3]
                gx[i, j] = (win * _SOBEL_X).sum()
                gy[i, j] = (win * _SOBEL_Y).sum()
        mag = np.sqrt(gx**2 + gy**2)
        ang = np.empty((m, n))
        for i in range(m):
            for j in range(n):
                ang[i, j] = np.pi / 2.0 if gx[i, j] == 0.0 else np.arctan(gy[i, j] / gx[i, j])
        return mag, ang

    def sig(value, consts):
        t, k, d = consts
        return (t / (1.0 + np.exp(k * (value - d)))) / (t / (1.0 + np.exp(k * (1.0 - d))))

    g_f, ang_f = grads(fused)
    num = 0.0
    den = 0.0
    for src in (a, b):
        g_s, ang_s = grads(src)
        m, n = fused.shape
        for i in range(m):
            for j in range(n):
                hi = max(g_s[i, j], g_f[i, j])
                ratio = min(g_s[i, j], g_f[i, j]) / hi if hi > 0 else 1.0
                align = 1.0 - abs(ang_s[i, j] - ang_f[i, j]) / (np.pi / 2.0)
                q = sig(ratio, _QG) * sig(align, _QA)
                num += q * g_s[i, j]
                den += g_s[i, j]
    return num / den if den > 0 else 0.0


class TestPsnr:
    def test_identical_inputs_hit_cap(self):
        img = np.random.default_rng(40).random((16, 16))
        assert psnr(img, (img.copy(), img.copy())) == PSNR_CAP_DB

    def test_uniform_offset(self):
        rng = np.random.default_rng(41)
        a = rng.random((32, 32)) * 0.5 + 0.2
        fused = a + 0.1
        assert psnr(fused, (a, a)) == pytest.approx(20.0, abs=1e-9)

    def test_fused_equals_one_source(self):
        rng = np.random.default_rng(42)
        a = rng.random((16, 16))
        b = rng.random((16, 16))
        want = 0.5 * (PSNR_CAP_DB + psnr(a, (b, b)))
        assert psnr(a, (a, b)) == pytest.approx(want)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            psnr(np.zeros((4, 4)), (np.zeros((4, 4)), np.zeros((5, 5))))


class TestSsim:
    def test_identity_is_one(self):
        img = np.random.default_rng(43).random((32, 32))
        assert ssim(img, (img.copy(), img.copy())) == pytest.approx(1.0)

    def test_inversion_scores_below_one(self):
        img = np.random.default_rng(44).random((32, 32))
        assert ssim(1.0 - img, (img, img)) < 1.0

    def test_matches_reference_implementation(self):
        rng = np.random.default_rng(45)
        for _ in range(5):
            x, y, f = rng.random((3, 32, 32))
            want = 0.5 * sum(
                structural_similarity(
                    f, s, gaussian_weights=True, sigma=1.5,
                    use_sample_covariance=False, data_range=1.0,
                )
                for s in (x, y)
            )
            assert ssim(f, (x, y)) == pytest.approx(want, abs=1e-6)

    def test_range(self):
        rng = np.random.default_rng(46)
        for _ in range(20):
            f, a, b = rng.random((3, 16, 16))
            assert -1.0 <= ssim(f, (a, b)) <= 1.0


class TestQabf:
    def test_identity_is_one(self):
        img = np.random.default_rng(47).random((24, 24))
        assert qabf(img, (img.copy(), img.copy())) == pytest.approx(1.0, abs=1e-3)

    def test_constant_fused_scores_zero(self):
        rng = np.random.default_rng(48)
        a, b = rng.random((2, 24, 24))
        assert qabf(np.full((24, 24), 0.5), (a, b)) == pytest.approx(0.0, abs=1e-3)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(49)
        for _ in range(3):
            f, a, b = rng.random((3, 16, 16))
            assert qabf(f, (a, b)) == pytest.approx(brute_force_qabf(f, a, b), abs=1e-4)

    def test_range(self):
        rng = np.random.default_rng(50)
        for _ in range(20):
            f, a, b = rng.random((3, 12, 12))
            assert 0.0 <= qabf(f, (a, b)) <= 1.0


class TestEvaluateAndReport:
    def test_symmetry_in_sources(self):
        rng = np.random.default_rng(51)
        f, a, b = rng.random((3, 24, 24))
        fwd = evaluate_pair(f, a, b)
        rev = evaluate_pair(f, b, a)
        for key in fwd:
            assert fwd[key] == pytest.approx(rev[key], rel=1e-9)

    def test_color_inputs_use_luminance(self):
        rng = np.random.default_rng(52)
        rgb = rng.integers(0, 256, (24, 24, 3), dtype=np.uint8)
        vals = evaluate_pair(rgb, rgb, rgb)
        assert vals["psnr"] == PSNR_CAP_DB
        assert vals["ssim"] == pytest.approx(1.0)

    def test_report_serialization(self):
        report = MetricReport()
        report.add("pair1", {"qabf": 0.7, "ssim": 0.8, "psnr": 25.0})
        report.add("pair2", {"qabf": 0.5, "ssim": 0.6, "psnr": 35.0})
        data = json.loads(report.to_json())
        assert data["means"]["psnr"] == pytest.approx(30.0)
        assert "constants" in data
        lines = report.to_csv().strip().splitlines()
        assert lines[0] == "image_id,qabf,ssim,psnr"
        assert len(lines) == 4
        assert lines[-1].startswith("mean,")
