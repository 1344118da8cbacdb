import numpy as np
import pytest

from cli.comparison import LABEL_HEIGHT, build_comparison, emit_comparison
from core.errors import ShapeMismatchError
from core.image_io import load_image, quantize


def test_two_identical_images_double_width(textured, tmp_path):
    img = textured(16, 20, seed=0)
    canvas = emit_comparison([("a", img), ("b", img)], tmp_path / "grid.png", gutter=6)
    assert canvas.shape == (LABEL_HEIGHT + 16, 2 * 20 + 6, 3)
    assert load_image(tmp_path / "grid.png").shape == (3, LABEL_HEIGHT + 16, 46)


def test_panels_are_exact_pixel_copies(textured):
    gray = textured(16, 20, seed=1)
    rgb = textured(16, 20, seed=2, channels=3)
    canvas = build_comparison([("gray", gray), ("rgb", rgb)], gutter=5)
    panel0 = canvas[LABEL_HEIGHT:, :20]
    panel1 = canvas[LABEL_HEIGHT:, 25:45]
    codes = quantize(gray)[0]
    for c in range(3):
        np.testing.assert_array_equal(panel0[:, :, c], codes)
    np.testing.assert_array_equal(panel1, quantize(rgb).transpose(1, 2, 0))


def test_inset_zoom_strip(textured):
    img = textured(16, 16, seed=3)
    canvas = build_comparison([("a", img), ("b", img)], inset=(4, 4, 4, 4), gutter=2)
    assert canvas.shape[0] == LABEL_HEIGHT + 16 + 2 + 16
    zoom = canvas[LABEL_HEIGHT + 18:, :16, 0]
    crop = quantize(img)[0, 4:8, 4:8]
    np.testing.assert_array_equal(zoom, np.kron(crop, np.ones((4, 4), dtype=np.uint8)))


def test_inset_outside_bounds_names_bounds(textured):
    img = textured(16, 16, seed=4)
    with pytest.raises(ValueError, match="16x16"):
        build_comparison([("a", img), ("b", img)], inset=(10, 10, 8, 8))


def test_dims_mismatch_needs_alignment(textured):
    big = textured(16, 16, seed=5)
    small = textured(8, 8, seed=6)
    with pytest.raises(ShapeMismatchError):
        build_comparison([("hr", big), ("lr", small)])
    canvas = build_comparison([("hr", big), ("lr", small)], align=True, gutter=0)
    assert canvas.shape == (LABEL_HEIGHT + 16, 32, 3)


def test_needs_two_images(textured):
    with pytest.raises(ValueError):
        build_comparison([("only", textured(8, 8))])
