"""Fixed-width containers for order-10 Latin squares.

Two layouts:

* 256 bits: 76 retained cells (rows 0-3 cols 0-8, rows 4-8 cols 0-7). Digits are
  grouped in triples, each triple written as one 10-bit value ``d0*100 + d1*10 + d2``;
  the 76th digit takes 4 bits and 2 zero bits close the block. Not every square
  survives the trip, see :func:`is_recoverable256`.
* 324 bits: the 9x9 top-left subgrid, one nibble per cell, zero-padded to 48 bytes.

All fields are big-endian and packed MSB-first.
"""

from __future__ import annotations

from .errors import CorruptPacking, InvalidOrder, NotRecoverable
from .latin_core import LatinSquare, random_square, validate_square

ORDER = 10
PACKED256_BYTES = 32
PACKED324_BYTES = 48

# (row, col) of the cells kept by the 256-bit layout, in packing order
KEPT256 = [(r, c) for r in range(4) for c in range(9)] + [(r, c) for r in range(4, 9) for c in range(8)]
assert len(KEPT256) == 76


class _BitWriter:
    def __init__(self):
        self.value = 0
        self.nbits = 0

    def write(self, v: int, width: int) -> None:
        self.value = (self.value << width) | v
        self.nbits += width

    def to_bytes(self, size: int) -> bytes:
        pad = size * 8 - self.nbits
        return (self.value << pad).to_bytes(size, "big")


class _BitReader:
    def __init__(self, data: bytes):
        self.value = int.from_bytes(data, "big")
        self.remaining = len(data) * 8

    def read(self, width: int) -> int:
        self.remaining -= width
        return (self.value >> self.remaining) & ((1 << width) - 1)

    def rest(self) -> int:
        return self.value & ((1 << self.remaining) - 1)


def _check_order(square: LatinSquare) -> None:
    if square.order != ORDER:
        raise InvalidOrder(f"packing needs an order-10 square, got order {square.order}")


def pack256(square: LatinSquare) -> bytes:
    _check_order(square)
    digits = [square.grid[r][c] for r, c in KEPT256]
    w = _BitWriter()
    for i in range(0, 75, 3):
        d0, d1, d2 = digits[i:i + 3]
        w.write(d0 * 100 + d1 * 10 + d2, 10)
    w.write(digits[75], 4)
    w.write(0, 2)
    return w.to_bytes(PACKED256_BYTES)


def _missing(values) -> list[int]:
    return sorted(set(range(ORDER)) - set(values))


def _finish(grid: list[list[int]]) -> LatinSquare:
    try:
        ok = validate_square(grid)
    except Exception:
        ok = False
    if not ok:
        raise CorruptPacking("decoded grid is not a Latin square")
    return LatinSquare(grid)


def _distinct_or_corrupt(values, what: str) -> None:
    if len(set(values)) != len(values):
        raise CorruptPacking(f"repeated symbol in {what}")


def unpack256(data: bytes) -> LatinSquare:
    if len(data) != PACKED256_BYTES:
        raise CorruptPacking(f"expected {PACKED256_BYTES} bytes, got {len(data)}")
    rd = _BitReader(data)
    digits = []
    for _ in range(25):
        v = rd.read(10)
        if v > 999:
            raise CorruptPacking(f"10-bit group value {v} exceeds 999")
        digits += [v // 100, v // 10 % 10, v % 10]
    last = rd.read(4)
    if last > 9:
        raise CorruptPacking(f"final digit {last} exceeds 9")
    digits.append(last)
    if rd.rest():
        raise CorruptPacking("trailing bits are not zero")

    grid = [[-1] * ORDER for _ in range(ORDER)]
    for (r, c), d in zip(KEPT256, digits):
        grid[r][c] = d
    for r in range(9):
        _distinct_or_corrupt([v for v in grid[r] if v >= 0], f"row {r}")
    for c in range(9):
        _distinct_or_corrupt([grid[r][c] for r in range(9) if grid[r][c] >= 0], f"column {c}")

    for r in range(4):
        (grid[r][9],) = _missing(grid[r][:9])
    for r in range(4, 9):
        a, b = _missing(grid[r][:8])
        col8 = {grid[i][8] for i in range(r)}
        if a in col8 and b in col8:
            raise CorruptPacking(f"both missing symbols of row {r} already in column 8")
        if a in col8:
            grid[r][8], grid[r][9] = b, a
        elif b in col8:
            grid[r][8], grid[r][9] = a, b
        else:
            raise NotRecoverable(f"row {r}: neither {a} nor {b} appears in column 8")
    for c in range(ORDER):
        col = [grid[r][c] for r in range(9)]
        _distinct_or_corrupt(col, f"column {c}")
        (grid[9][c],) = _missing(col)
    return _finish(grid)


def is_recoverable256(square: LatinSquare) -> bool:
    """Whether the 256-bit layout round-trips ``square``."""
    _check_order(square)
    try:
        return unpack256(pack256(square)) == square
    except NotRecoverable:
        return False


def pack324(square: LatinSquare) -> bytes:
    _check_order(square)
    w = _BitWriter()
    for r in range(9):
        for c in range(9):
            w.write(square.grid[r][c], 4)
    return w.to_bytes(PACKED324_BYTES)


def unpack324(data: bytes) -> LatinSquare:
    if len(data) != PACKED324_BYTES:
        raise CorruptPacking(f"expected {PACKED324_BYTES} bytes, got {len(data)}")
    rd = _BitReader(data)
    grid = [[-1] * ORDER for _ in range(ORDER)]
    for r in range(9):
        for c in range(9):
            v = rd.read(4)
            if v > 9:
                raise CorruptPacking(f"nibble {v:#x} at ({r}, {c}) exceeds 9")
            grid[r][c] = v
    if rd.rest():
        raise CorruptPacking("padding bits are not zero")
    for r in range(9):
        _distinct_or_corrupt(grid[r][:9], f"row {r}")
        (grid[r][9],) = _missing(grid[r][:9])
    for c in range(ORDER):
        col = [grid[r][c] for r in range(9)]
        _distinct_or_corrupt(col, f"column {c}")
        (grid[9][c],) = _missing(col)
    return _finish(grid)


def first_recoverable_square(seed: int, attempts: int = 10_000) -> LatinSquare:
    """First generator output (seeds seed, seed+1, ...) that the 256-bit layout preserves."""
    for i in range(attempts):
        square = random_square(ORDER, seed + i)
        if is_recoverable256(square):
            return square
    raise NotRecoverable(f"no recoverable square in {attempts} attempts")
