"""Glyph sources: per-codepoint cell bitmaps.

Two kinds:

* ``ProceduralGlyphSource`` — a pseudorandom 8x8 bit pattern per codepoint,
  derived from a keyed hash of (seed, codepoint) and upscaled to the cell
  size. Bit-exact across calls and processes; used for tests and for
  training without font assets.
* ``FontGlyphSource`` — rasterizes a TrueType/OpenType font with Pillow,
  anti-aliased, glyph scaled so its em box fits the cell. Codepoints the
  font does not map fall back to the procedural pattern with a warning;
  a corpus render never aborts on a missing glyph.

Both return uint8 arrays of exactly cell_px x cell_px with background 255
and dark ink. Whitespace codepoints render as blank cells in both sources.
"""

import hashlib
import logging
import struct

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from .errors import GlyphError

log = logging.getLogger(__name__)

BACKGROUND = 255

_PATTERN_SIDE = 8


def _is_whitespace(codepoint: int) -> bool:
    return chr(codepoint).isspace()


def _scale_indices(cell_px: int) -> np.ndarray:
    # Nearest-neighbour mapping from cell pixels to the 8x8 pattern grid.
    return (np.arange(cell_px) * _PATTERN_SIDE) // cell_px


class ProceduralGlyphSource:
    """Deterministic synthetic glyphs keyed by (seed, codepoint)."""

    kind = "procedural"

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self._key = struct.pack("<q", self.seed)

    def pattern(self, codepoint: int) -> np.ndarray:
        """The raw 8x8 boolean ink pattern for a codepoint."""
        digest = hashlib.blake2b(
            struct.pack("<I", codepoint), key=self._key, digest_size=8
        ).digest()
        bits = np.unpackbits(np.frombuffer(digest, dtype=np.uint8))
        return bits.reshape(_PATTERN_SIDE, _PATTERN_SIDE).astype(bool)

    def bitmap(self, codepoint: int, cell_px: int) -> np.ndarray:
        cell = np.full((cell_px, cell_px), BACKGROUND, dtype=np.uint8)
        if _is_whitespace(codepoint):
            return cell
        idx = _scale_indices(cell_px)
        ink = self.pattern(codepoint)[np.ix_(idx, idx)]
        cell[ink] = 0
        return cell

    def spec(self) -> str:
        return f"procedural:{self.seed}"


class FontGlyphSource:
    """Glyphs rasterized from a font file via Pillow/FreeType.

    pixel_size defaults to the cell size at draw time, which makes the em
    box fill the cell (one CJK character per 32px cell at the 224px
    profile). Missing codepoints use the procedural fallback.
    """

    kind = "font-file"

    def __init__(self, path: str, pixel_size: int | None = None, fallback_seed: int = 0):
        self.path = path
        self.pixel_size = pixel_size
        self._fonts: dict[int, ImageFont.FreeTypeFont] = {}
        self._fallback = ProceduralGlyphSource(fallback_seed)
        self._warned: set[int] = set()
        try:
            self._load(pixel_size or 16)
            self._cmap = self._read_cmap(path)
        except GlyphError:
            raise
        except Exception as exc:
            raise GlyphError(f"cannot load font {path!r}: {exc}") from exc

    @staticmethod
    def _read_cmap(path: str) -> frozenset[int] | None:
        # fontTools gives an exact character map; without it we fall back
        # to treating blank rasters of non-whitespace as missing.
        try:
            from fontTools.ttLib import TTFont
        except ImportError:
            return None
        cmap = TTFont(path, fontNumber=0).getBestCmap()
        return frozenset(cmap)

    def _load(self, size: int) -> ImageFont.FreeTypeFont:
        font = self._fonts.get(size)
        if font is None:
            font = ImageFont.truetype(self.path, size)
            self._fonts[size] = font
        return font

    def _has_glyph(self, codepoint: int) -> bool:
        if self._cmap is not None:
            return codepoint in self._cmap
        return True  # optimistically draw; blank non-whitespace triggers fallback

    def bitmap(self, codepoint: int, cell_px: int) -> np.ndarray:
        if _is_whitespace(codepoint):
            return np.full((cell_px, cell_px), BACKGROUND, dtype=np.uint8)
        if not self._has_glyph(codepoint):
            return self._fallback_bitmap(codepoint, cell_px)
        font = self._load(self.pixel_size or cell_px)
        img = Image.new("L", (cell_px, cell_px), BACKGROUND)
        draw = ImageDraw.Draw(img)
        draw.text(
            (cell_px // 2, cell_px // 2),
            chr(codepoint),
            fill=0,
            font=font,
            anchor="mm",
        )
        cell = np.asarray(img, dtype=np.uint8)
        if self._cmap is None and (cell == BACKGROUND).all():
            return self._fallback_bitmap(codepoint, cell_px)
        return cell

    def _fallback_bitmap(self, codepoint: int, cell_px: int) -> np.ndarray:
        if codepoint not in self._warned:
            self._warned.add(codepoint)
            log.warning(
                "font %s has no glyph for U+%04X; using procedural fallback",
                self.path,
                codepoint,
            )
        return self._fallback.bitmap(codepoint, cell_px)

    def spec(self) -> str:
        if self.pixel_size is not None:
            return f"font:{self.path}:{self.pixel_size}"
        return f"font:{self.path}"


GlyphSource = ProceduralGlyphSource | FontGlyphSource


def parse_glyph_spec(spec: str) -> GlyphSource:
    """Build a glyph source from its config-file string form.

    ``procedural:<seed>`` or ``font:<path>[:<pixel size>]``.
    """
    kind, _, rest = spec.partition(":")
    if kind == "procedural":
        try:
            seed = int(rest) if rest else 0
        except ValueError:
            raise GlyphError(f"bad procedural seed in glyph spec {spec!r}")
        return ProceduralGlyphSource(seed)
    if kind == "font":
        if not rest:
            raise GlyphError("font glyph spec needs a path: font:<path>[:<px>]")
        path, _, size = rest.rpartition(":")
        if path and size.isdigit():
            return FontGlyphSource(path, pixel_size=int(size))
        return FontGlyphSource(rest)
    raise GlyphError(f"unknown glyph source kind {kind!r} in {spec!r}")
