"""Grid geometry for a chat image.

The image is a square of ``image_px`` pixels with a margin of ``margin_px``
on all four edges. The remaining area is divided into ``grid_rows`` x
``grid_cols`` square cells of ``cell_px`` pixels; the upper ``input_rows``
rows hold the input sentence and the remaining rows hold the partial
response. Characters fill each portion row-major, left to right.
"""

from dataclasses import dataclass

from .errors import BoundsError, LayoutError


@dataclass(frozen=True)
class LayoutConfig:
    image_px: int
    channels: int
    margin_px: int
    grid_rows: int
    grid_cols: int
    input_rows: int
    response_rows: int
    cell_px: int

    @property
    def input_capacity(self) -> int:
        return self.input_rows * self.grid_cols

    @property
    def response_capacity(self) -> int:
        return self.response_rows * self.grid_cols


def compute_layout(
    image_px: int,
    margin_px: int,
    grid_rows: int,
    grid_cols: int,
    input_rows: int,
    channels: int,
) -> LayoutConfig:
    """Derive a LayoutConfig, validating the grid geometry.

    Raises LayoutError naming the violated constraint.
    """
    for name, value in (
        ("image_px", image_px),
        ("margin_px", margin_px),
        ("grid_rows", grid_rows),
        ("grid_cols", grid_cols),
        ("input_rows", input_rows),
    ):
        if value <= 0:
            raise LayoutError(f"{name} must be positive, got {value}")
    if channels not in (1, 3):
        raise LayoutError(f"channels must be 1 or 3, got {channels}")
    if input_rows >= grid_rows:
        raise LayoutError(
            f"input_rows ({input_rows}) must be < grid_rows ({grid_rows})"
        )
    usable = image_px - 2 * margin_px
    if usable <= 0:
        raise LayoutError(
            f"margin_px {margin_px} leaves no drawable area in {image_px}px"
        )
    if usable % grid_cols != 0:
        raise LayoutError(
            f"(image_px - 2*margin_px) = {usable} is not divisible by "
            f"grid_cols = {grid_cols}"
        )
    cell_px = usable // grid_cols
    if margin_px + grid_rows * cell_px > image_px:
        raise LayoutError(
            f"{grid_rows} rows of {cell_px}px cells overflow the image height"
        )
    return LayoutConfig(
        image_px=image_px,
        channels=channels,
        margin_px=margin_px,
        grid_rows=grid_rows,
        grid_cols=grid_cols,
        input_rows=input_rows,
        response_rows=grid_rows - input_rows,
        cell_px=cell_px,
    )


def cell_origin(layout: LayoutConfig, row: int, col: int) -> tuple[int, int]:
    """Top-left pixel (x, y) of the cell at (row, col)."""
    if not (0 <= row < layout.grid_rows):
        raise BoundsError(f"row {row} outside 0..{layout.grid_rows - 1}")
    if not (0 <= col < layout.grid_cols):
        raise BoundsError(f"col {col} outside 0..{layout.grid_cols - 1}")
    return (
        layout.margin_px + col * layout.cell_px,
        layout.margin_px + row * layout.cell_px,
    )
