import numpy as np
import pytest

from core.image_io import save_image
from input_adapter.input_facade import InputAdapter
from input_adapter.preprocess import CropSampler
from input_adapter.stream import ImageStream


@pytest.fixture
def folder(tmp_path, textured):
    save_image(textured(40, 40, seed=1, channels=3), tmp_path / "b.png")
    save_image(textured(36, 44, seed=2), tmp_path / "a.png")
    (tmp_path / "notes.md").write_text("ignored")
    return tmp_path


def test_stream_lists_images_in_name_order(folder):
    stream = ImageStream(folder)
    assert len(stream) == 2
    assert [name for name, _ in stream.get_images()] == ["a", "b"]


def test_stream_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        ImageStream(tmp_path / "absent")
    with pytest.raises(FileNotFoundError):
        ImageStream(tmp_path)


def test_crop_sampler_rounds_crop_to_scale_and_converts_channels(rng, textured):
    sampler = CropSampler(crop=33, scale=4, channels=1)
    assert sampler.crop == 32
    crop = sampler.random_crop(textured(40, 40, channels=3), rng)
    assert crop.shape == (1, 32, 32)
    rgb = CropSampler(crop=16, scale=2, channels=3).convert_channels(textured(20, 20))
    assert rgb.shape == (3, 20, 20)


def test_crop_sampler_rejects_small_images(rng):
    with pytest.raises(ValueError):
        CropSampler(crop=32, scale=2).random_crop(np.zeros((1, 20, 40)), rng)


def test_input_adapter_batches_are_seeded(folder):
    adapter = InputAdapter(folder, scale=2, crop=16, channels=1)
    assert all(img.shape[0] == 1 for img in adapter.images)
    first = adapter.get_batch(3, np.random.default_rng(0))
    second = adapter.get_batch(3, np.random.default_rng(0))
    assert len(first) == 3
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a, b)
