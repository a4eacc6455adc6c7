import hashlib

import numpy as np
import pytest

from superchat.errors import CapacityError
from superchat.glyphs import BACKGROUND, ProceduralGlyphSource
from superchat.layout import cell_origin, compute_layout
from superchat.render import export_png, load_png, png_bytes, render

PAPER = compute_layout(224, 16, 6, 6, 3, 3)
DESK = compute_layout(112, 8, 6, 6, 3, 1)
GLYPHS = ProceduralGlyphSource(7)

# Pixel-buffer hash of render(DESK, procedural seed 7, "你好吗", "很好").
# Recorded once from the implementation; guards against any drift in the
# procedural patterns or blit arithmetic.
GOLDEN_DESK_HASH = "ba833dde3b7305abf0aad93d55da46bbb7bd3430422cd0cd714bd5be9f9f75ef"


def test_blank_render_is_all_background():
    img = render(PAPER, GLYPHS, "", "")
    assert (img.pixels == BACKGROUND).all()
    assert img.pixels.shape == (224, 224, 3)


def test_single_char_lands_at_first_cell():
    img = render(PAPER, GLYPHS, "你", "")
    plane = img.plane()
    ink = np.argwhere(plane != BACKGROUND)
    assert len(ink) > 0
    ys, xs = ink[:, 0], ink[:, 1]
    assert ys.min() >= 16 and ys.max() < 48
    assert xs.min() >= 16 and xs.max() < 48


def test_response_portion_starts_at_row_three():
    img = render(PAPER, GLYPHS, "", "你")
    ink = np.argwhere(img.plane() != BACKGROUND)
    x, y = cell_origin(PAPER, 3, 0)
    assert ink[:, 0].min() >= y and ink[:, 0].max() < y + 32
    assert ink[:, 1].min() >= x and ink[:, 1].max() < x + 32


def test_row_major_fill_order():
    # 7th char of the input wraps to row 1, col 0
    img = render(PAPER, GLYPHS, "abcdefg", "")
    x, y = cell_origin(PAPER, 1, 0)
    cell = img.plane()[y : y + 32, x : x + 32]
    expected = GLYPHS.bitmap(ord("g"), 32)
    assert (cell == expected).all()


def test_channels_replicated():
    img = render(PAPER, GLYPHS, "你好", "在")
    assert (img.pixels[:, :, 0] == img.pixels[:, :, 1]).all()
    assert (img.pixels[:, :, 0] == img.pixels[:, :, 2]).all()


def test_capacity_overflow_names_portion():
    with pytest.raises(CapacityError, match="input"):
        render(PAPER, GLYPHS, "x" * 19, "")
    with pytest.raises(CapacityError, match="response"):
        render(PAPER, GLYPHS, "", "x" * 19)
    # exactly at capacity is fine
    render(PAPER, GLYPHS, "x" * 18, "y" * 18)


def test_render_deterministic_and_golden():
    a = render(DESK, GLYPHS, "你好吗", "很好")
    b = render(DESK, GLYPHS, "你好吗", "很好")
    assert (a.pixels == b.pixels).all()
    digest = hashlib.sha256(a.pixels.tobytes()).hexdigest()
    assert digest == GOLDEN_DESK_HASH


def test_locality_of_single_char_change():
    base = render(PAPER, GLYPHS, "你好吗", "很好")
    changed = render(PAPER, GLYPHS, "你坏吗", "很好")
    diff = np.argwhere(base.plane() != changed.plane())
    assert len(diff) > 0
    x, y = cell_origin(PAPER, 0, 1)  # second input char
    assert diff[:, 0].min() >= y and diff[:, 0].max() < y + 32
    assert diff[:, 1].min() >= x and diff[:, 1].max() < x + 32


def test_input_band_independent_of_response():
    band = PAPER.margin_px + PAPER.input_rows * PAPER.cell_px
    a = render(PAPER, GLYPHS, "你好", "")
    b = render(PAPER, GLYPHS, "你好", "完全不同的回答")
    assert (a.pixels[:band] == b.pixels[:band]).all()


def test_png_round_trip(tmp_path):
    img = render(PAPER, GLYPHS, "你好", "在")
    path = tmp_path / "img.png"
    export_png(img, path)
    decoded = load_png(path)
    assert decoded.shape == img.pixels.shape
    assert (decoded == img.pixels).all()


def test_png_round_trip_single_channel(tmp_path):
    img = render(DESK, GLYPHS, "你", "")
    path = tmp_path / "img.png"
    export_png(img, path)
    assert (load_png(path) == img.pixels).all()


def test_png_bytes_deterministic():
    img = render(DESK, GLYPHS, "同样", "内容")
    assert png_bytes(img) == png_bytes(img)


def test_blank_png_round_trip(tmp_path):
    img = render(PAPER, GLYPHS, "", "")
    path = tmp_path / "blank.png"
    export_png(img, path)
    assert (load_png(path) == BACKGROUND).all()
