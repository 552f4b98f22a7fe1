import struct

import numpy as np
import pytest
from PIL import Image

from grf_toolkit.errors import FormatError, ShapeError
from grf_toolkit.tensorfuse import (
    export_raw_tensor,
    merge_rgb_grf,
    read_fused_png,
    read_raw_tensor,
    to_greyscale,
    write_fused_png,
)


def _random_pair(rng, h=48, w=64):
    rgb = rng.integers(0, 256, (h, w, 3), dtype=np.uint8)
    grf = rng.integers(0, 256, (h, w), dtype=np.uint8)
    return rgb, grf


def test_merge_shape_and_scaling(rng):
    rgb, grf = _random_pair(rng, 480, 640)
    t = merge_rgb_grf(rgb, grf)
    assert t.shape == (4, 480, 640) and t.dtype == np.float32
    for c in range(3):
        np.testing.assert_array_equal(t[c], rgb[..., c].astype(np.float32) / np.float32(255))
    np.testing.assert_array_equal(t[3], grf.astype(np.float32) / np.float32(255))
    assert t.min() >= 0 and t.max() <= 1


def test_merge_endpoint_and_channel_order():
    rgb = np.zeros((4, 5, 3), np.uint8)
    grf = np.full((4, 5), 255, np.uint8)
    t = merge_rgb_grf(rgb, grf)
    assert np.all(t[:3] == 0) and np.all(t[3] == 1.0)


def test_merge_shape_error():
    with pytest.raises(ShapeError, match="640x480.*320x240"):
        merge_rgb_grf(np.zeros((480, 640, 3), np.uint8), np.zeros((240, 320), np.uint8))


def test_to_greyscale():
    px = np.array([[[255, 255, 255], [255, 0, 0], [0, 255, 0], [0, 0, 255]]], np.uint8)
    assert to_greyscale(px).tolist() == [[255, 76, 150, 29]]
    grey = np.arange(256, dtype=np.uint8).reshape(16, 16)
    np.testing.assert_array_equal(to_greyscale(np.stack([grey] * 3, axis=-1)), grey)
    np.testing.assert_array_equal(to_greyscale(grey), grey)


def test_png_round_trip(tmp_path, rng):
    rgb, grf = _random_pair(rng)
    t = merge_rgb_grf(rgb, grf)
    path = tmp_path / "x.fused.png"
    write_fused_png(t, path)
    np.testing.assert_array_equal(read_fused_png(path), t)
    with Image.open(path) as im:
        assert im.mode == "RGBA"
        np.testing.assert_array_equal(np.asarray(im)[..., 3], grf)


def test_png_rejects_rgb(tmp_path):
    path = tmp_path / "rgb.png"
    Image.fromarray(np.zeros((4, 4, 3), np.uint8)).save(path)
    with pytest.raises(FormatError, match="expected 4 channels"):
        read_fused_png(path)


def test_raw_layout(tmp_path):
    t = np.zeros((4, 2, 2), np.float32)
    t[1, 0, 1] = 0.5
    path = tmp_path / "t.grf4"
    export_raw_tensor(t, path)
    data = path.read_bytes()
    assert len(data) == 80
    assert data[:4] == b"GRF4"
    assert struct.unpack("<HHII", data[4:16]) == (1, 0, 2, 2)
    offset = 16 + 4 * (1 * 4 + 0 * 2 + 1)
    assert data[offset:offset + 4] == bytes([0x00, 0x00, 0x00, 0x3F])
    np.testing.assert_array_equal(read_raw_tensor(path), t)


def test_raw_deterministic_and_validated(tmp_path, rng):
    t = merge_rgb_grf(*_random_pair(rng, 5, 7))
    export_raw_tensor(t, tmp_path / "a.grf4")
    export_raw_tensor(t.copy(), tmp_path / "b.grf4")
    assert (tmp_path / "a.grf4").read_bytes() == (tmp_path / "b.grf4").read_bytes()
    (tmp_path / "bad.grf4").write_bytes(b"NOPE" + bytes(12))
    with pytest.raises(FormatError):
        read_raw_tensor(tmp_path / "bad.grf4")
    with pytest.raises(ShapeError):
        export_raw_tensor(np.zeros((3, 2, 2), np.float32), tmp_path / "c.grf4")
