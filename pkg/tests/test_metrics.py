import math

import numpy as np
import pytest

from pipeboot.errors import DimensionMismatch, EmptyInput, NegativeSigma, TooSmall
from pipeboot.metrics import (CSV_HEADER, MetricRow, SsimConfig, accuracy,
                              flops_report, gaussian_window, psnr,
                              rows_from_csv, rows_to_csv, ssim)
from pipeboot.rng import Rng

from oracles import naive_ssim


def random_image(shape, seed, scale=255.0):
    r = Rng(seed)
    return (r.uniform(int(np.prod(shape))) * scale).reshape(shape)


def reference_window(size=11, sigma=1.5):
    half = size // 2
    g = np.empty((size, size))
    for i in range(size):
        for j in range(size):
            g[i, j] = math.exp(-((i - half) ** 2 + (j - half) ** 2) / (2 * sigma ** 2))
    return g / g.sum()


class TestWindow:
    def test_matches_direct_construction(self):
        w = gaussian_window(SsimConfig())
        ref = reference_window()
        assert np.abs(w - ref).max() < 1e-15

    def test_normalized_and_peaked_at_center(self):
        w = gaussian_window(SsimConfig())
        assert abs(w.sum() - 1.0) < 1e-12
        assert w[5, 5] == w.max()
        assert np.array_equal(w, w.T)


class TestSsim:
    def test_identical_images_score_exactly_one(self):
        for seed in range(10):
            img = random_image((16, 16), seed)
            assert ssim(img, img) == 1.0

    def test_matches_naive_oracle(self):
        cfg = SsimConfig()
        w = reference_window()
        c1 = (cfg.k1 * cfg.data_range) ** 2
        c2 = (cfg.k2 * cfg.data_range) ** 2
        for seed in range(5):
            a = random_image((14, 15), seed + 100)
            b = random_image((14, 15), seed + 200)
            assert abs(ssim(a, b) - naive_ssim(a, b, w, c1, c2)) < 1e-9

    def test_constant_images_hand_value(self):
        # zero vs full-scale constants: structure and contrast terms cancel,
        # leaving c1 / (255^2 + c1)
        a = np.zeros((12, 12))
        b = np.full((12, 12), 255.0)
        c1 = (0.01 * 255.0) ** 2
        assert abs(ssim(a, b) - c1 / (255.0 ** 2 + c1)) < 1e-9

    def test_symmetric(self):
        a = random_image((13, 13), 7)
        b = random_image((13, 13), 8)
        assert ssim(a, b) == ssim(b, a)

    def test_noise_lowers_score(self):
        img = random_image((20, 20), 9)
        r = Rng(10)
        noisy = img + 25.0 * r.normal(400).reshape(20, 20)
        assert ssim(img, noisy) < 1.0

    def test_inverted_checkerboard_scores_negative(self):
        yy, xx = np.mgrid[0:16, 0:16]
        a = 255.0 * ((yy + xx) % 2)
        assert ssim(a, 255.0 - a) < 0.0

    def test_image_smaller_than_window(self):
        with pytest.raises(TooSmall):
            ssim(np.zeros((8, 8)), np.zeros((8, 8)))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ssim(np.zeros((12, 12)), np.zeros((12, 13)))

    def test_non_2d_rejected(self):
        with pytest.raises(DimensionMismatch):
            ssim(np.zeros((3, 12, 12)), np.zeros((3, 12, 12)))

    def test_config_validation(self):
        with pytest.raises(NegativeSigma):
            SsimConfig(sigma=-1.0)
        with pytest.raises(ValueError):
            SsimConfig(window_size=10)


class TestPsnr:
    def test_identical_is_infinite(self):
        img = random_image((6, 6), 11)
        assert psnr(img, img) == math.inf

    def test_unit_mse_hand_value(self):
        a = np.zeros((8, 8))
        b = np.ones((8, 8))
        assert abs(psnr(a, b) - 10.0 * math.log10(255.0 ** 2)) < 1e-12

    def test_more_noise_means_lower_psnr(self):
        img = random_image((10, 10), 12)
        assert psnr(img, img + 2.0) < psnr(img, img + 1.0)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            psnr(np.zeros((4, 4)), np.zeros((4, 5)))


class TestAccuracy:
    def test_hand_values(self):
        assert accuracy([0, 1, 2, 3], [0, 1, 2, 0]) == 0.75
        assert accuracy([1, 1], [1, 1]) == 1.0
        assert accuracy([0], [1]) == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            accuracy([0, 1], [0, 1, 2])

    def test_empty(self):
        with pytest.raises(EmptyInput):
            accuracy([], [])


def sample_rows():
    return [
        MetricRow("denoise", "surrogate", 0.1, "ssim", 0.625, 2662400),
        MetricRow("denoise", "pipeline", None, "ssim", 0.594, 91424),
        MetricRow("denoise", "surrogate", 0.001, "ssim", 0.601, 2662400),
        MetricRow("classify", "bootstrapped", 0.5, "accuracy", 0.798, 129519360),
    ]


class TestCsv:
    def test_header(self):
        assert rows_to_csv([]).splitlines()[0] == CSV_HEADER
        assert CSV_HEADER == "task,method,ratio_x,metric,value,flops"

    def test_rows_sorted_canonically(self):
        text = rows_to_csv(sample_rows())
        lines = text.splitlines()[1:]
        assert lines[0].startswith("classify,")
        # within a task+method, the blank-ratio row precedes numbered ratios,
        # and ratios ascend
        assert lines[1] == "denoise,pipeline,,ssim,0.594,91424"
        assert lines[2].split(",")[2] == "0.001"
        assert lines[3].split(",")[2] == "0.1"

    def test_round_trip_is_exact(self):
        rows = sample_rows() + [MetricRow("t", "m", 0.1 + 0.2, "v", 1.0 / 3.0, 7)]
        parsed = rows_from_csv(rows_to_csv(rows))
        assert sorted(parsed, key=repr) == sorted(rows, key=repr)

    def test_serialization_is_stable(self):
        assert rows_to_csv(sample_rows()) == rows_to_csv(list(reversed(sample_rows())))

    def test_rejects_wrong_header(self):
        with pytest.raises(ValueError, match="header"):
            rows_from_csv("a,b,c\n")

    def test_rejects_wrong_field_count(self):
        with pytest.raises(ValueError, match="fields"):
            rows_from_csv(CSV_HEADER + "\nx,y,z\n")


class TestFlopsReport:
    def test_is_the_canonical_csv(self):
        assert flops_report(sample_rows()) == rows_to_csv(sample_rows())
        assert flops_report([]) == CSV_HEADER + "\n"

    def test_deeper_networks_cost_more(self):
        from pipeboot.nn import build_skip_autoencoder, count_flops

        costs = [count_flops(build_skip_autoencoder(d, 8, seed=0), (1, 32, 32))
                 for d in (2, 4, 6)]
        rows = [MetricRow("denoise", f"depth{d}", None, "ssim", 0.5, c)
                for d, c in zip((2, 4, 6), costs)]
        assert costs[0] < costs[1] < costs[2]
        parsed = rows_from_csv(flops_report(rows))
        assert [r.flops for r in parsed] == costs
