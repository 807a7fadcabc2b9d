import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsepaint import (
    BinaryMask,
    FormatError,
    GrayImage,
    ProbMask,
    ValidationError,
    load_image,
    load_mask,
    load_prob_mask,
    save_image,
    save_mask,
    save_prob_mask,
)


def test_load_p5_bytes(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64]))
    img = load_image(p)
    assert img.data.tolist() == [[0.0, 255.0], [128.0, 64.0]]


def test_load_rejects_large_maxval(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_bytes(b"P5\n2 2\n65535\n" + bytes(8))
    with pytest.raises(FormatError, match="unsupported maxval"):
        load_image(p)


def test_load_rejects_ascii_pgm(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_bytes(b"P2\n2 2\n255\n0 1 2 3\n")
    with pytest.raises(FormatError, match="unsupported magic"):
        load_image(p)


def test_load_rejects_truncated_payload(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_bytes(b"P5\n4 4\n255\n" + bytes(7))
    with pytest.raises(FormatError, match="truncated payload"):
        load_image(p)


def test_header_comments_allowed(tmp_path):
    p = tmp_path / "t.pgm"
    p.write_bytes(b"P5\n# a comment\n1 1\n255\n\x2a")
    assert load_image(p).data.tolist() == [[42.0]]


def test_save_rounds_half_up_and_clamps(tmp_path):
    p = tmp_path / "t.pgm"
    save_image(GrayImage(np.array([[127.5, -3.0, 300.0]])), p)
    assert load_image(p).data.tolist() == [[128.0, 0.0, 255.0]]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_image_roundtrip_equals_round_clamp(tmp_path_factory, seed):
    rng = np.random.default_rng(seed)
    data = rng.uniform(-20, 280, (5, 7))
    p = tmp_path_factory.mktemp("rt") / "t.pgm"
    save_image(GrayImage(data), p)
    back = load_image(p)
    expected = np.clip(np.floor(data + 0.5), 0, 255)
    assert np.array_equal(back.data, expected)


def test_mask_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    mask = BinaryMask(rng.random((9, 4)) < 0.3)
    p = tmp_path / "m.pgm"
    save_mask(mask, p)
    assert np.array_equal(load_mask(p).known, mask.known)


def test_mask_rejects_gray_values(tmp_path):
    p = tmp_path / "m.pgm"
    p.write_bytes(b"P5\n2 1\n255\n" + bytes([255, 7]))
    with pytest.raises(ValidationError, match="0 or 255"):
        load_mask(p)


def test_prob_mask_roundtrip_exact(tmp_path):
    p = tmp_path / "c.pfm"
    save_prob_mask(ProbMask(np.array([[0.5]])), p)
    assert load_prob_mask(p).prob.tolist() == [[0.5]]


def test_prob_mask_roundtrip_float32_lossless(tmp_path):
    rng = np.random.default_rng(2)
    vals = rng.random((6, 5)).astype(np.float32).astype(np.float64)
    p = tmp_path / "c.pfm"
    save_prob_mask(ProbMask(vals), p)
    assert np.array_equal(load_prob_mask(p).prob, vals)


def test_pfm_rejects_out_of_range(tmp_path):
    p = tmp_path / "c.pfm"
    payload = np.array([[1.5]], dtype="<f4").tobytes()
    p.write_bytes(b"Pf\n1 1\n-1.0\n" + payload)
    with pytest.raises(ValidationError, match="index 0"):
        load_prob_mask(p)


def test_pfm_rejects_big_endian_scale(tmp_path):
    p = tmp_path / "c.pfm"
    payload = np.array([[0.5]], dtype=">f4").tobytes()
    p.write_bytes(b"Pf\n1 1\n1.0\n" + payload)
    with pytest.raises(FormatError, match="unsupported byte order"):
        load_prob_mask(p)


def test_pfm_rejects_color_magic(tmp_path):
    p = tmp_path / "c.pfm"
    p.write_bytes(b"PF\n1 1\n-1.0\n" + bytes(12))
    with pytest.raises(FormatError, match="unsupported magic"):
        load_prob_mask(p)
