"""Latin squares, partial Latin squares and critical sets.

Symbols are ``0..n-1`` and cells are addressed ``(row, col)`` from zero.
The search routines keep one used-symbol bitmask per row and per column,
which is plenty for the orders this package deals with (n <= 10).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import (
    Contradiction,
    InvalidGrid,
    InvalidOrder,
    InvalidPartial,
    InvalidRectangle,
    NoCompletion,
    OrderTooLarge,
)

MAX_ENUMERATE_ORDER = 5


class Triple(NamedTuple):
    row: int
    col: int
    sym: int


def _check_grid_shape(grid: Sequence[Sequence[int]]) -> int:
    n = len(grid)
    if n == 0:
        raise InvalidGrid("empty grid")
    for r, row in enumerate(grid):
        if len(row) != n:
            raise InvalidGrid(f"row {r} has {len(row)} entries, expected {n}")
        for c, v in enumerate(row):
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < n:
                raise InvalidGrid(f"symbol {v!r} at ({r}, {c}) outside 0..{n - 1}")
    return n


def validate_square(grid: Sequence[Sequence[int]]) -> bool:
    """True iff every row and every column of ``grid`` is a permutation of 0..n-1.

    Raises InvalidGrid when the grid is not square or holds out-of-range symbols.
    """
    n = _check_grid_shape(grid)
    want = set(range(n))
    if any(set(row) != want for row in grid):
        return False
    return all({grid[r][c] for r in range(n)} == want for c in range(n))


@dataclass(frozen=True)
class LatinSquare:
    grid: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        grid = tuple(tuple(row) for row in self.grid)
        object.__setattr__(self, "grid", grid)
        if not validate_square(grid):
            raise InvalidGrid("grid is not a Latin square")

    @property
    def order(self) -> int:
        return len(self.grid)

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.grid[r][c]

    def triples(self) -> list[Triple]:
        return [Triple(r, c, s) for r, row in enumerate(self.grid) for c, s in enumerate(row)]

    def to_partial(self) -> PartialLatinSquare:
        return PartialLatinSquare(self.order, frozenset(self.triples()))

    def contains(self, p: PartialLatinSquare) -> bool:
        return p.order == self.order and all(self.grid[t.row][t.col] == t.sym for t in p.cells)


@dataclass(frozen=True)
class PartialLatinSquare:
    order: int
    cells: frozenset[Triple] = field(default_factory=frozenset)

    def __post_init__(self):
        n = self.order
        if not isinstance(n, int) or n < 1:
            raise InvalidPartial(f"order must be >= 1, got {n!r}")
        cells = frozenset(Triple(*t) for t in self.cells)
        object.__setattr__(self, "cells", cells)
        seen_cell = set()
        seen_row = set()
        seen_col = set()
        for t in cells:
            if not all(0 <= v < n for v in t):
                raise InvalidPartial(f"triple {tuple(t)} outside 0..{n - 1}")
            if (t.row, t.col) in seen_cell:
                raise InvalidPartial(f"cell ({t.row}, {t.col}) filled twice")
            if (t.row, t.sym) in seen_row:
                raise InvalidPartial(f"symbol {t.sym} repeated in row {t.row}")
            if (t.col, t.sym) in seen_col:
                raise InvalidPartial(f"symbol {t.sym} repeated in column {t.col}")
            seen_cell.add((t.row, t.col))
            seen_row.add((t.row, t.sym))
            seen_col.add((t.col, t.sym))

    @classmethod
    def from_triples(cls, n: int, triples: Iterable[Sequence[int]]) -> PartialLatinSquare:
        return cls(n, frozenset(Triple(*t) for t in triples))

    @classmethod
    def from_grid(cls, grid: Sequence[Sequence[int | None]]) -> PartialLatinSquare:
        n = len(grid)
        if n == 0 or any(len(row) != n for row in grid):
            raise InvalidGrid("partial grid must be square and non-empty")
        return cls(n, frozenset(
            Triple(r, c, v) for r, row in enumerate(grid) for c, v in enumerate(row) if v is not None
        ))

    @classmethod
    def empty(cls, n: int) -> PartialLatinSquare:
        return cls(n)

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self.cells))

    def __contains__(self, t) -> bool:
        return Triple(*t) in self.cells

    def to_grid(self) -> list[list[int | None]]:
        grid: list[list[int | None]] = [[None] * self.order for _ in range(self.order)]
        for t in self.cells:
            grid[t.row][t.col] = t.sym
        return grid

    def is_full(self) -> bool:
        return len(self.cells) == self.order * self.order

    def to_square(self) -> LatinSquare:
        if not self.is_full():
            raise InvalidGrid("partial square has empty cells")
        return LatinSquare(self.to_grid())

    def without(self, t: Sequence[int]) -> PartialLatinSquare:
        return PartialLatinSquare(self.order, self.cells - {Triple(*t)})

    def with_triple(self, t: Sequence[int]) -> PartialLatinSquare:
        return PartialLatinSquare(self.order, self.cells | {Triple(*t)})


@dataclass(frozen=True)
class ForceOutTrace:
    start: PartialLatinSquare
    steps: tuple[Triple, ...]
    final: PartialLatinSquare


# --- search state ---------------------------------------------------------

class _Board:
    """Mutable working copy: flat grid plus per-row and per-column symbol masks."""

    __slots__ = ("n", "full", "grid", "rows", "cols")

    def __init__(self, p: PartialLatinSquare):
        n = p.order
        self.n = n
        self.full = (1 << n) - 1
        self.grid = [-1] * (n * n)
        self.rows = [0] * n
        self.cols = [0] * n
        for t in p.cells:
            self.place(t.row, t.col, t.sym)

    def place(self, r: int, c: int, s: int) -> None:
        bit = 1 << s
        self.grid[r * self.n + c] = s
        self.rows[r] |= bit
        self.cols[c] |= bit

    def clear(self, r: int, c: int, s: int) -> None:
        bit = 1 << s
        self.grid[r * self.n + c] = -1
        self.rows[r] &= ~bit
        self.cols[c] &= ~bit

    def candidates(self, r: int, c: int) -> int:
        return self.full & ~(self.rows[r] | self.cols[c])

    def empties(self) -> list[tuple[int, int]]:
        n = self.n
        return [(i // n, i % n) for i, v in enumerate(self.grid) if v < 0]

    def to_square(self) -> LatinSquare:
        n = self.n
        return LatinSquare(tuple(tuple(self.grid[r * n:(r + 1) * n]) for r in range(n)))


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _count(board: _Board, limit: int) -> int:
    """Count completions up to ``limit``, branching on the most constrained cell."""
    n = board.n
    grid = board.grid
    best = None
    best_mask = 0
    best_size = n + 1
    for i, v in enumerate(grid):
        if v >= 0:
            continue
        m = board.candidates(i // n, i % n)
        size = m.bit_count()
        if size < best_size:
            best, best_mask, best_size = i, m, size
            if size <= 1:
                break
    if best is None:
        return 1
    if best_size == 0:
        return 0
    r, c = divmod(best, n)
    total = 0
    for s in _bits(best_mask):
        board.place(r, c, s)
        total += _count(board, limit - total)
        board.clear(r, c, s)
        if total >= limit:
            break
    return total


def _first_completion(board: _Board) -> bool:
    """Row-major, ascending-symbol depth-first search; leaves the board filled on success.

    After each placement the other empty cells of the touched row and column must
    keep at least one candidate. That prunes dead branches early without changing
    which completion is found first.
    """
    n = board.n
    empties = board.empties()
    grid = board.grid

    def dead_after(r: int, c: int) -> bool:
        for j in range(n):
            if grid[r * n + j] < 0 and not board.candidates(r, j):
                return True
        for i in range(n):
            if grid[i * n + c] < 0 and not board.candidates(i, c):
                return True
        return False

    def solve(k: int) -> bool:
        if k == len(empties):
            return True
        r, c = empties[k]
        for s in _bits(board.candidates(r, c)):
            board.place(r, c, s)
            if not dead_after(r, c) and solve(k + 1):
                return True
            board.clear(r, c, s)
        return False

    return solve(0)


def _as_partial(p) -> PartialLatinSquare:
    if isinstance(p, PartialLatinSquare):
        return p
    if isinstance(p, LatinSquare):
        return p.to_partial()
    raise InvalidPartial(f"expected a PartialLatinSquare, got {type(p).__name__}")


# --- operations -----------------------------------------------------------

def cayley_square(n: int) -> LatinSquare:
    """Addition table of Z/nZ."""
    if n < 1:
        raise InvalidOrder(f"order must be >= 1, got {n}")
    return LatinSquare(tuple(tuple((i + j) % n for j in range(n)) for i in range(n)))


def _match_row(n: int, cols_used: list[int], col_order: Sequence[int], sym_orders) -> list[int]:
    """Perfect matching columns -> unused symbols via augmenting paths (Kuhn).

    ``sym_orders[c]`` lists the symbols to try for column ``c`` in preference order.
    Returns the new row as ``row[c] = symbol``.
    """
    owner = [-1] * n  # symbol -> column
    row = [-1] * n

    def augment(c: int, seen: list[bool]) -> bool:
        for s in sym_orders[c]:
            if cols_used[c] >> s & 1 or seen[s]:
                continue
            seen[s] = True
            if owner[s] < 0 or augment(owner[s], seen):
                owner[s] = c
                row[c] = s
                return True
        return False

    for c in col_order:
        if not augment(c, [False] * n):
            # unreachable for a genuine Latin rectangle (Hall's condition holds)
            raise InvalidRectangle("no perfect matching for the next row")
    return row


def extend_rectangle(rect: Sequence[Sequence[int]]) -> LatinSquare:
    """Extend an m x n Latin rectangle (m < n) to a full Latin square, row by row."""
    if not rect:
        raise InvalidRectangle("rectangle has no rows")
    n = len(rect[0])
    m = len(rect)
    if m >= n:
        raise InvalidRectangle(f"need fewer rows than columns, got {m}x{n}")
    cols_used = [0] * n
    for r, row in enumerate(rect):
        if len(row) != n or sorted(row) != list(range(n)):
            raise InvalidRectangle(f"row {r} is not a permutation of 0..{n - 1}")
        for c, s in enumerate(row):
            if cols_used[c] >> s & 1:
                raise InvalidRectangle(f"symbol {s} repeated in column {c}")
            cols_used[c] |= 1 << s
    rows = [list(row) for row in rect]
    ascending = [list(range(n))] * n
    while len(rows) < n:
        new = _match_row(n, cols_used, range(n), ascending)
        for c, s in enumerate(new):
            cols_used[c] |= 1 << s
        rows.append(new)
    return LatinSquare(rows)


def random_square(n: int, seed: int) -> LatinSquare:
    """Seeded Latin square built row by row from randomized matchings.

    Not uniformly distributed over all Latin squares of order n.
    """
    if n < 1:
        raise InvalidOrder(f"order must be >= 1, got {n}")
    rng = random.Random(seed)
    cols_used = [0] * n
    rows = []
    for _ in range(n):
        col_order = rng.sample(range(n), n)
        sym_orders = [rng.sample(range(n), n) for _ in range(n)]
        new = _match_row(n, cols_used, col_order, sym_orders)
        for c, s in enumerate(new):
            cols_used[c] |= 1 << s
        rows.append(new)
    return LatinSquare(rows)


def count_completions(p: PartialLatinSquare, limit: int) -> int:
    """Number of Latin squares containing ``p``, capped at ``limit``."""
    p = _as_partial(p)
    if limit < 1:
        raise ValueError("limit must be >= 1")
    return _count(_Board(p), limit)


def complete(p: PartialLatinSquare) -> LatinSquare:
    """First completion in row-major, ascending-symbol order.

    That is the lexicographically smallest Latin square containing ``p``.
    """
    p = _as_partial(p)
    board = _Board(p)
    if not _first_completion(board):
        raise NoCompletion(f"partial square with {len(p)} cells has no completion")
    return board.to_square()


def _scan_order(n: int, scan: str) -> list[tuple[int, int]]:
    if scan == "row":
        return [(r, c) for r in range(n) for c in range(n)]
    if scan == "col":
        return [(r, c) for c in range(n) for r in range(n)]
    raise ValueError(f"scan must be 'row' or 'col', got {scan!r}")


def force_out(p: PartialLatinSquare, scan: str = "row") -> ForceOutTrace:
    """Repeatedly fill the first cell (in scan order) that admits a single symbol."""
    p = _as_partial(p)
    board = _Board(p)
    order = _scan_order(p.order, scan)
    n = p.order
    steps = []
    while True:
        forced = None
        for r, c in order:
            if board.grid[r * n + c] >= 0:
                continue
            m = board.candidates(r, c)
            if m == 0:
                raise Contradiction(r, c)
            if forced is None and m & (m - 1) == 0:
                forced = Triple(r, c, m.bit_length() - 1)
        if forced is None:
            break
        board.place(*forced)
        steps.append(forced)
    final = PartialLatinSquare(n, p.cells | frozenset(steps))
    return ForceOutTrace(p, tuple(steps), final)


def is_critical_set(p: PartialLatinSquare) -> bool:
    p = _as_partial(p)
    if count_completions(p, 2) != 1:
        return False
    return all(count_completions(p.without(t), 2) >= 2 for t in p.cells)


def is_strong_critical_set(p: PartialLatinSquare) -> bool:
    p = _as_partial(p)
    if not is_critical_set(p):
        return False
    try:
        return force_out(p).final.is_full()
    except Contradiction:
        return False


def reduce_to_critical_set(square: LatinSquare, seed: int | None = None) -> PartialLatinSquare:
    """Greedily drop entries of ``square`` while the completion stays unique.

    One pass suffices: an entry that cannot be dropped from a larger set cannot be
    dropped from any subset of it either. Only practical at small orders.
    """
    cells = square.triples()
    if seed is not None:
        random.Random(seed).shuffle(cells)
    current = square.to_partial()
    for t in cells:
        trial = current.without(t)
        if count_completions(trial, 2) == 1:
            current = trial
    return current


def enumerate_count(n: int) -> int:
    """Exact number of Latin squares of order n by exhaustive search (n <= 5)."""
    if n < 1:
        raise InvalidOrder(f"order must be >= 1, got {n}")
    if n > MAX_ENUMERATE_ORDER:
        raise OrderTooLarge(f"enumeration limited to n <= {MAX_ENUMERATE_ORDER}, got {n}")
    return _count(_Board(PartialLatinSquare.empty(n)), math.inf)


def lower_bound(n: int) -> int:
    """n! (n-1)! ... 2!"""
    if n < 2:
        raise InvalidOrder(f"bound defined for n >= 2, got {n}")
    return math.prod(math.factorial(k) for k in range(2, n + 1))


# --- text format ----------------------------------------------------------

def parse_square_text(text: str) -> PartialLatinSquare:
    """Read the line-oriented format: order on line 1, then n rows of symbols or '.'."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidGrid("empty square file")
    try:
        n = int(lines[0][0])
    except ValueError:
        raise InvalidGrid(f"first line must be the order, got {lines[0]!r}") from None
    if len(lines[0]) != 1 or n < 1:
        raise InvalidGrid("first line must hold a single positive order")
    rows = lines[1:]
    if len(rows) != n:
        raise InvalidGrid(f"expected {n} rows, found {len(rows)}")
    grid: list[list[int | None]] = []
    for r, toks in enumerate(rows):
        if len(toks) != n:
            raise InvalidGrid(f"row {r} has {len(toks)} tokens, expected {n}")
        row = []
        for tok in toks:
            if tok == ".":
                row.append(None)
            elif tok.isdigit():
                row.append(int(tok))
            else:
                raise InvalidGrid(f"bad token {tok!r} in row {r}")
        grid.append(row)
    try:
        return PartialLatinSquare.from_grid(grid)
    except InvalidPartial as exc:
        raise InvalidGrid(str(exc)) from None


def format_square_text(p: PartialLatinSquare | LatinSquare) -> str:
    grid = p.to_grid() if isinstance(p, PartialLatinSquare) else p.grid
    lines = [str(len(grid))]
    lines += [" ".join("." if v is None else str(v) for v in row) for row in grid]
    return "\n".join(lines) + "\n"
