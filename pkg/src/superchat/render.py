"""Render an (input sentence, partial response) pair into a chat image.

The input sentence fills the upper rows and the partial response the lower
rows, row-major within each portion. Rendering happens in a single grey
plane; for 3-channel layouts the plane is replicated at the boundary so
all channels are identical.
"""

from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import CapacityError
from .glyphs import BACKGROUND, GlyphSource
from .layout import LayoutConfig, cell_origin


@dataclass(frozen=True)
class SuperChatImage:
    pixels: np.ndarray  # (image_px, image_px, channels) uint8
    layout: LayoutConfig

    def plane(self) -> np.ndarray:
        """The single grey plane (all channels are identical)."""
        return self.pixels[:, :, 0]


def render(
    layout: LayoutConfig,
    glyphs: GlyphSource,
    input_text: str,
    partial_response: str,
) -> SuperChatImage:
    """Blit both texts onto a blank image per the layout grid."""
    if len(input_text) > layout.input_capacity:
        raise CapacityError(
            f"input portion overflow: {len(input_text)} chars > "
            f"capacity {layout.input_capacity}"
        )
    if len(partial_response) > layout.response_capacity:
        raise CapacityError(
            f"response portion overflow: {len(partial_response)} chars > "
            f"capacity {layout.response_capacity}"
        )
    plane = np.full((layout.image_px, layout.image_px), BACKGROUND, dtype=np.uint8)
    _blit_portion(plane, layout, glyphs, input_text, row_offset=0)
    _blit_portion(plane, layout, glyphs, partial_response, row_offset=layout.input_rows)
    pixels = np.repeat(plane[:, :, None], layout.channels, axis=2)
    pixels.flags.writeable = False
    return SuperChatImage(pixels=pixels, layout=layout)


def _blit_portion(
    plane: np.ndarray,
    layout: LayoutConfig,
    glyphs: GlyphSource,
    text: str,
    row_offset: int,
) -> None:
    cell = layout.cell_px
    for k, ch in enumerate(text):
        row = row_offset + k // layout.grid_cols
        col = k % layout.grid_cols
        x, y = cell_origin(layout, row, col)
        plane[y : y + cell, x : x + cell] = glyphs.bitmap(ord(ch), cell)


def export_png(image: SuperChatImage, path) -> None:
    """Write the image as a lossless 8-bit PNG."""
    arr = image.pixels
    if arr.shape[2] == 1:
        pil = Image.fromarray(arr[:, :, 0], mode="L")
    else:
        pil = Image.fromarray(arr, mode="RGB")
    pil.save(path, format="PNG")


def png_bytes(image: SuperChatImage) -> bytes:
    """PNG encoding of the image as bytes (same pixels as export_png)."""
    import io

    buf = io.BytesIO()
    export_png(image, buf)
    return buf.getvalue()


def load_png(path) -> np.ndarray:
    """Decode a PNG back to a (H, W, C) uint8 array."""
    arr = np.asarray(Image.open(path))
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return arr
