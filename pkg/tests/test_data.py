import numpy as np
import pytest

from pipeboot.data import (CIFAR_RECORD_BYTES, Dataset, LabeledExample,
                           add_gaussian_noise, load_cifar10_batch, load_pgm,
                           sample_patches, save_cifar10_batch, save_pgm,
                           split_examples, synth_classification, synth_shapes)
from pipeboot.errors import (BadParams, EmptyDataset, LabelOutOfRange,
                             MalformedHeader, NegativeSigma, PatchTooLarge,
                             TruncatedFile, UnsupportedMaxval)
from pipeboot.metrics import ssim
from pipeboot.rng import Rng


class TestContainers:
    def test_label_source_default_and_tagging(self):
        ex = LabeledExample(np.zeros(2), 1)
        assert ex.label_source == "ground_truth"
        assert LabeledExample(np.zeros(2), 1, "imputed").label_source == "imputed"

    def test_label_source_rejects_unknown(self):
        with pytest.raises(ValueError):
            LabeledExample(np.zeros(2), 1, label_source="guessed")

    def test_role_checked(self):
        with pytest.raises(ValueError):
            Dataset([], role="bogus")

    def test_unlabeled_role_forbids_targets(self):
        with pytest.raises(ValueError):
            Dataset([LabeledExample(np.zeros(2), 1)], role="U_unlabeled")
        assert len(Dataset([LabeledExample(np.zeros(2), None)],
                           role="U_unlabeled")) == 1

    def test_source_roles_check_tags(self):
        gt = LabeledExample(np.zeros(2), 1)
        imp = LabeledExample(np.zeros(2), 1, "imputed")
        with pytest.raises(ValueError):
            Dataset([imp], role="L_groundtruth")
        with pytest.raises(ValueError):
            Dataset([gt], role="S_imputed")
        assert Dataset([gt, imp], role="mixed").role == "mixed"


class TestNoise:
    def test_zero_sigma_is_identity(self):
        img = np.full((4, 4), 100.0)
        assert np.array_equal(add_gaussian_noise(img, 0.0, Rng(0)), img)

    def test_negative_sigma(self):
        with pytest.raises(NegativeSigma):
            add_gaussian_noise(np.zeros((2, 2)), -1.0, Rng(0))

    def test_stays_in_range(self):
        img = np.full((50, 50), 250.0)
        noisy = add_gaussian_noise(img, 40.0, Rng(1))
        assert noisy.max() <= 255.0 and noisy.min() >= 0.0
        assert (noisy == 255.0).any()  # clamping actually engaged

    def test_observed_sigma(self):
        img = np.full((100, 100), 128.0)
        noisy = add_gaussian_noise(img, 20.0, Rng(2))
        assert abs((noisy - img).std() - 20.0) < 1.0

    def test_deterministic(self):
        img = np.full((8, 8), 128.0)
        assert np.array_equal(add_gaussian_noise(img, 20.0, Rng(3)),
                              add_gaussian_noise(img, 20.0, Rng(3)))


class TestPatches:
    def test_shapes_and_membership(self):
        img = np.arange(100, dtype=np.float64).reshape(10, 10)
        patches = sample_patches(img, 4, 7, Rng(4))
        assert len(patches) == 7
        for p in patches:
            assert p.shape == (4, 4)
            # a patch is a contiguous block, so its corner pins its content
            y, x = divmod(int(p[0, 0]), 10)
            assert np.array_equal(p, img[y:y + 4, x:x + 4])

    def test_too_large(self):
        with pytest.raises(PatchTooLarge):
            sample_patches(np.zeros((5, 5)), 6, 1, Rng(0))

    def test_full_size_patch(self):
        img = np.arange(9, dtype=np.float64).reshape(3, 3)
        (p,) = sample_patches(img, 3, 1, Rng(0))
        assert np.array_equal(p, img)


class TestSynthShapes:
    def test_values_come_from_palette(self):
        for img in synth_shapes(10, size=16, seed=0):
            assert img.shape == (16, 16)
            assert np.isin(img, (0.0, 85.0, 170.0, 255.0)).all()

    def test_two_levels(self):
        for img in synth_shapes(6, size=16, num_levels=2, seed=0):
            assert np.isin(img, (0.0, 255.0)).all()

    def test_level_and_size_validation(self):
        with pytest.raises(BadParams):
            synth_shapes(1, size=16, num_levels=1)
        with pytest.raises(BadParams):
            synth_shapes(1, size=7)

    def test_prefix_stability(self):
        few = synth_shapes(3, size=16, seed=1)
        many = synth_shapes(8, size=16, seed=1)
        for a, b in zip(few, many):
            assert np.array_equal(a, b)

    def test_seed_changes_content(self):
        a = synth_shapes(4, size=16, seed=2)
        b = synth_shapes(4, size=16, seed=3)
        assert any(not np.array_equal(x, y) for x, y in zip(a, b))

    def test_images_are_not_constant(self):
        imgs = synth_shapes(10, size=32, seed=4)
        assert sum(len(np.unique(im)) > 1 for im in imgs) >= 8

    def test_noise_is_material(self):
        # corpus-level check: sigma-20 noise costs real similarity
        imgs = synth_shapes(8, size=32, seed=5)
        scores = [ssim(add_gaussian_noise(im, 20.0, Rng(i)), im)
                  for i, im in enumerate(imgs)]
        assert np.mean(scores) < 0.9


class TestSynthClassification:
    def test_balanced_cycling_labels(self):
        ds = synth_classification(12, num_classes=4, seed=0)
        assert [ex.target for ex in ds] == [0, 1, 2, 3] * 3

    def test_input_shape_and_range(self):
        ds = synth_classification(4, size=16, seed=1)
        for ex in ds:
            assert ex.input.shape == (1, 16, 16)
            assert ex.input.min() >= 0.0 and ex.input.max() <= 255.0

    def test_needs_two_classes(self):
        with pytest.raises(BadParams):
            synth_classification(4, num_classes=1)

    def test_prefix_stability(self):
        a = synth_classification(3, seed=2)
        b = synth_classification(6, seed=2)
        for ea, eb in zip(a, b):
            assert np.array_equal(ea.input, eb.input) and ea.target == eb.target

    def test_classes_look_different(self):
        ds = synth_classification(4, size=16, num_classes=4, seed=3)
        imgs = [ex.input[0] for ex in ds]
        for i in range(4):
            for j in range(i + 1, 4):
                assert not np.array_equal(imgs[i], imgs[j])


class TestSplit:
    def make(self, n):
        return Dataset([LabeledExample(np.array([i]), i) for i in range(n)])

    def test_round_half_up(self):
        first, second = split_examples(self.make(5), 0.5)
        assert (len(first), len(second)) == (3, 2)  # 2.5 rounds up

    def test_plain_rounding(self):
        first, second = split_examples(self.make(10), 0.31)
        assert (len(first), len(second)) == (3, 7)

    def test_order_preserved_without_rng(self):
        first, second = split_examples(self.make(4), 0.5)
        assert [ex.target for ex in first] == [0, 1]
        assert [ex.target for ex in second] == [2, 3]

    def test_shuffled_split_is_a_partition(self):
        first, second = split_examples(self.make(9), 0.4, rng=Rng(5))
        seen = sorted(ex.target for ex in list(first) + list(second))
        assert seen == list(range(9))
        assert [ex.target for ex in first] != [0, 1, 2, 3]

    def test_extremes(self):
        first, second = split_examples(self.make(3), 0.0)
        assert (len(first), len(second)) == (0, 3)
        first, second = split_examples(self.make(3), 1.0)
        assert (len(first), len(second)) == (3, 0)

    def test_empty_dataset(self):
        with pytest.raises(EmptyDataset):
            split_examples(Dataset(), 0.5)

    def test_bad_fraction(self):
        with pytest.raises(ValueError):
            split_examples(self.make(3), 1.5)


class TestPgm:
    def test_round_trip_exact(self, tmp_path):
        r = Rng(6)
        img = r.randint(0, 256, 35).reshape(5, 7).astype(np.float64)
        path = tmp_path / "img.pgm"
        save_pgm(path, img)
        assert np.array_equal(load_pgm(path), img)

    def test_header_layout(self, tmp_path):
        path = tmp_path / "img.pgm"
        save_pgm(path, np.zeros((2, 3)))
        raw = path.read_bytes()
        assert raw.startswith(b"P5\n3 2\n255\n")
        assert len(raw) == len(b"P5\n3 2\n255\n") + 6

    def test_rounding_half_away_from_zero(self, tmp_path):
        path = tmp_path / "img.pgm"
        save_pgm(path, np.array([[0.5, 1.4, 1.5, -3.0, 300.0]]))
        assert load_pgm(path).tolist() == [[1.0, 1.0, 2.0, 0.0, 255.0]]

    def test_comments_in_header(self, tmp_path):
        path = tmp_path / "img.pgm"
        body = bytes([10, 20, 30, 40, 50, 60])
        path.write_bytes(b"P5 # comment\n# another line\n 3\n# mid\n2 255\n" + body)
        img = load_pgm(path)
        assert img.shape == (2, 3)
        assert img.ravel().tolist() == [10, 20, 30, 40, 50, 60]

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "img.pgm"
        path.write_bytes(b"P2\n2 2\n255\n....")
        with pytest.raises(MalformedHeader):
            load_pgm(path)

    def test_wrong_maxval(self, tmp_path):
        path = tmp_path / "img.pgm"
        path.write_bytes(b"P5\n2 2\n65535\n" + bytes(8))
        with pytest.raises(UnsupportedMaxval):
            load_pgm(path)

    def test_truncated_raster(self, tmp_path):
        path = tmp_path / "img.pgm"
        path.write_bytes(b"P5\n4 4\n255\n" + bytes(10))
        with pytest.raises(TruncatedFile):
            load_pgm(path)

    def test_garbage_header(self, tmp_path):
        path = tmp_path / "img.pgm"
        path.write_bytes(b"P5\nabc def\n255\n")
        with pytest.raises(MalformedHeader):
            load_pgm(path)

    def test_save_rejects_non_2d(self, tmp_path):
        with pytest.raises(ValueError):
            save_pgm(tmp_path / "x.pgm", np.zeros((2, 2, 2)))


class TestCifarBatch:
    def test_hand_built_records(self, tmp_path):
        # record = label byte, then 1024 red, 1024 green, 1024 blue bytes
        rec0 = bytes([3]) + bytes([10] * 1024) + bytes([20] * 1024) + bytes([30] * 1024)
        rec1 = bytes([9]) + bytes(range(256)) * 4 + bytes([0] * 2048)
        path = tmp_path / "batch.bin"
        path.write_bytes(rec0 + rec1)
        images, labels = load_cifar10_batch(path)
        assert labels.tolist() == [3, 9]
        assert images.shape == (2, 3, 32, 32)
        assert (images[0, 0] == 10).all() and (images[0, 1] == 20).all() \
            and (images[0, 2] == 30).all()
        assert images[1, 0, 0, :8].tolist() == [0, 1, 2, 3, 4, 5, 6, 7]

    def test_round_trip(self, tmp_path):
        r = Rng(7)
        images = r.randint(0, 256, 2 * 3072).reshape(2, 3, 32, 32).astype(np.float64)
        labels = np.array([0, 9])
        path = tmp_path / "batch.bin"
        save_cifar10_batch(path, images, labels)
        assert path.stat().st_size == 2 * CIFAR_RECORD_BYTES
        back_images, back_labels = load_cifar10_batch(path)
        assert np.array_equal(back_images, images)
        assert np.array_equal(back_labels, labels)

    def test_truncated_file(self, tmp_path):
        path = tmp_path / "batch.bin"
        path.write_bytes(bytes(CIFAR_RECORD_BYTES + 5))
        with pytest.raises(TruncatedFile):
            load_cifar10_batch(path)

    def test_label_out_of_range_on_load(self, tmp_path):
        path = tmp_path / "batch.bin"
        path.write_bytes(bytes([12]) + bytes(3072))
        with pytest.raises(LabelOutOfRange):
            load_cifar10_batch(path)

    def test_label_out_of_range_on_save(self, tmp_path):
        with pytest.raises(LabelOutOfRange):
            save_cifar10_batch(tmp_path / "x.bin", np.zeros((1, 3, 32, 32)), [10])
