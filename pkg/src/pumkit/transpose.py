"""Layout conversion between horizontal words and vertical bit-columns.

Vertical layout stores an n-bit value one bit per row down a single
column: bit i (LSB = bit 0) of value j sits at row base_row+i, column j.
That makes a bit shift a row renaming and lets one row-activation
sequence operate on every column in parallel.

Conversions touch only the addressed rows and columns; untouched cells
are preserved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapacityError
from .subarray import SubarrayState


@dataclass(frozen=True)
class HorizontalBlock:
    """Conventional layout: a list of n-bit unsigned words."""

    values: tuple[int, ...]
    bit_width: int

    def __post_init__(self):
        if not 1 <= self.bit_width <= 64:
            raise CapacityError(f"bit width {self.bit_width} outside 1..64")
        limit = 1 << self.bit_width
        for v in self.values:
            if not 0 <= v < limit:
                raise CapacityError(
                    f"value {v} does not fit in {self.bit_width} bits"
                )
        object.__setattr__(self, "values", tuple(self.values))


@dataclass(frozen=True)
class VerticalBlock:
    """A transposed operand: n consecutive data rows, one value per column."""

    base_row: int
    bit_width: int
    column_count: int


def _check_region(state: SubarrayState, base_row: int, width: int, count: int):
    cfg = state.cfg
    if base_row < 0 or base_row + width > cfg.data_row_count:
        raise CapacityError(
            f"rows {base_row}..{base_row + width - 1} overflow the data region "
            f"(0..{cfg.data_row_count - 1})"
        )
    if count > cfg.columns:
        raise CapacityError(
            f"{count} values exceed the {cfg.columns}-column subarray"
        )


def to_vertical(block: HorizontalBlock, state: SubarrayState, base_row: int) -> VerticalBlock:
    """Write `block` into the subarray in vertical layout, LSB at base_row."""
    count = len(block.values)
    _check_region(state, base_row, block.bit_width, count)
    keep_mask = ~((1 << count) - 1)
    for i in range(block.bit_width):
        word = 0
        for j, v in enumerate(block.values):
            if (v >> i) & 1:
                word |= 1 << j
        token = f"D{base_row + i}"
        old = state.load_row(token)
        state.store_row(token, (old & keep_mask) | word)
    return VerticalBlock(base_row, block.bit_width, count)


def to_horizontal(state: SubarrayState, base_row: int, width: int, count: int) -> HorizontalBlock:
    """Read back `count` vertical values of `width` bits from base_row."""
    _check_region(state, base_row, width, count)
    values = [0] * count
    for i in range(width):
        word = state.load_row(f"D{base_row + i}")
        for j in range(count):
            if (word >> j) & 1:
                values[j] |= 1 << i
    return HorizontalBlock(tuple(values), width)
