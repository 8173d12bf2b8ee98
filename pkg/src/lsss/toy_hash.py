"""Reduced-width iterative hash, collision search and diamond structures.

The compression function truncates SHA-256::

    compress_d(s, b) = top d bits of SHA-256(s as d/8 big-endian bytes || b)
    IV(d)            = top d bits of SHA-256(b"LSSS-IV-v1" || d as 4-byte big-endian)

Chaining values are plain ``int`` and blocks are 8-byte ``bytes``. Digest widths
stay at or below 40 bits so a birthday search costs about 2^(d/2) calls.
"""

from __future__ import annotations

import hashlib
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    BudgetExceeded,
    DuplicateLeaf,
    IndexOutOfRange,
    InvalidParams,
    UnalignedPrefix,
)

BLOCK_BYTES = 8
DIGEST_WIDTHS = (8, 16, 24, 32, 40)
IV_TAG = b"LSSS-IV-v1"

# probes handed to one worker per round when searching in parallel
_BATCH = 4096


@dataclass(frozen=True)
class HashParams:
    digest_bits: int = 16
    block_bytes: int = BLOCK_BYTES

    def __post_init__(self):
        if self.digest_bits not in DIGEST_WIDTHS:
            raise InvalidParams(f"digest_bits must be one of {DIGEST_WIDTHS}, got {self.digest_bits}")
        if self.block_bytes != BLOCK_BYTES:
            raise InvalidParams(f"block_bytes is fixed at {BLOCK_BYTES}")

    @property
    def state_bytes(self) -> int:
        return self.digest_bits // 8

    def encode(self, state: int) -> bytes:
        return state.to_bytes(self.state_bytes, "big")

    def decode(self, raw: bytes) -> int:
        if len(raw) != self.state_bytes:
            raise InvalidParams(f"chaining value must be {self.state_bytes} bytes, got {len(raw)}")
        return int.from_bytes(raw, "big")


@dataclass
class SearchStats:
    """Running tally of compression calls made by a search."""

    probes: int = 0
    searches: int = 0


@dataclass(frozen=True)
class Diamond:
    params: HashParams
    levels: tuple[tuple[int, ...], ...]
    edge_blocks: tuple[tuple[bytes, ...], ...]

    @property
    def root(self) -> int:
        return self.levels[-1][0]

    @property
    def leaves(self) -> tuple[int, ...]:
        return self.levels[0]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1


def _check_block(block: bytes) -> bytes:
    if len(block) != BLOCK_BYTES:
        raise InvalidParams(f"block must be {BLOCK_BYTES} bytes, got {len(block)}")
    return bytes(block)


def iv(params: HashParams) -> int:
    digest = hashlib.sha256(IV_TAG + params.digest_bits.to_bytes(4, "big")).digest()
    return int.from_bytes(digest[:params.state_bytes], "big")


def compress(params: HashParams, state: int, block: bytes) -> int:
    if not 0 <= state < 1 << params.digest_bits:
        raise InvalidParams(f"chaining value {state:#x} wider than {params.digest_bits} bits")
    _check_block(block)
    digest = hashlib.sha256(params.encode(state) + block).digest()
    return int.from_bytes(digest[:params.state_bytes], "big")


def iterate(params: HashParams, state: int, blocks: Sequence[bytes]) -> int:
    for b in blocks:
        state = compress(params, state, b)
    return state


def split_blocks(data: bytes) -> list[bytes]:
    if len(data) % BLOCK_BYTES:
        raise UnalignedPrefix(f"length {len(data)} is not a multiple of {BLOCK_BYTES}")
    return [data[i:i + BLOCK_BYTES] for i in range(0, len(data), BLOCK_BYTES)]


def md_pad(message: bytes) -> bytes:
    """Merkle-Damgard strengthening: 0x80, zeros, 64-bit big-endian bit length."""
    if len(message) >= 1 << 61:
        raise InvalidParams("message too long")
    padded = message + b"\x80"
    padded += b"\x00" * (-(len(padded) + 8) % BLOCK_BYTES)
    return padded + (8 * len(message)).to_bytes(8, "big")


def hash_full(params: HashParams, message: bytes) -> int:
    return iterate(params, iv(params), split_blocks(md_pad(message)))


# --- searches -------------------------------------------------------------

def _collision_batch(d: int, sa: int, sb: int, seed: tuple, count: int):
    params = HashParams(d)
    rng = random.Random(repr(seed))
    out = []
    for _ in range(count):
        ba = rng.randbytes(BLOCK_BYTES)
        bb = rng.randbytes(BLOCK_BYTES)
        out.append((compress(params, sa, ba), ba, compress(params, sb, bb), bb))
    return out


def _herd_batch(d: int, state: int, targets: frozenset, seed: tuple, count: int):
    params = HashParams(d)
    rng = random.Random(repr(seed))
    for i in range(count):
        b = rng.randbytes(BLOCK_BYTES)
        if compress(params, state, b) in targets:
            return b, i + 1
    return None, count


def find_collision(
    params: HashParams,
    state_a: int,
    state_b: int,
    seed: int = 0,
    *,
    parallelism: int = 1,
    stats: SearchStats | None = None,
) -> tuple[bytes, bytes]:
    """Blocks ``(ba, bb)`` with ``compress(state_a, ba) == compress(state_b, bb)``.

    Birthday search: random blocks are hashed from both states alternately and
    each output is checked against the table of the other side. Gives up after
    2^(d/2 + 6) compression calls. Sequential mode is deterministic in ``seed``.
    """
    d = params.digest_bits
    budget = 1 << (d // 2 + 6)
    stats = stats if stats is not None else SearchStats()
    stats.searches += 1
    if state_a == state_b:
        b = random.Random(seed).randbytes(BLOCK_BYTES)
        return b, b

    seen_a: dict[int, bytes] = {}
    seen_b: dict[int, bytes] = {}
    probes = 0

    def absorb(ha, ba, hb, bb):
        nonlocal probes
        probes += 1
        if ha in seen_b:
            return ba, seen_b[ha]
        seen_a.setdefault(ha, ba)
        probes += 1
        if hb in seen_a:
            return seen_a[hb], bb
        seen_b.setdefault(hb, bb)
        return None

    if parallelism <= 1:
        rng = random.Random(seed)
        while probes < budget:
            ba = rng.randbytes(BLOCK_BYTES)
            bb = rng.randbytes(BLOCK_BYTES)
            hit = absorb(compress(params, state_a, ba), ba, compress(params, state_b, bb), bb)
            if hit:
                stats.probes += probes
                return hit
    else:
        with ProcessPoolExecutor(parallelism) as pool:
            rnd = 0
            while probes < budget:
                futures = [
                    pool.submit(_collision_batch, d, state_a, state_b, (seed, rnd, w), _BATCH)
                    for w in range(parallelism)
                ]
                rnd += 1
                for fut in futures:
                    for row in fut.result():
                        hit = absorb(*row)
                        if hit:
                            stats.probes += probes
                            return hit
    stats.probes += probes
    raise BudgetExceeded(f"no collision within {budget} probes at d={d}")


def build_diamond(
    params: HashParams,
    leaves: Sequence[int],
    seed: int = 0,
    *,
    parallelism: int = 1,
    stats: SearchStats | None = None,
) -> Diamond:
    """Pair node 2i with 2i+1 at every level and collide each pair into a parent."""
    leaves = tuple(leaves)
    count = len(leaves)
    if count < 2 or count & (count - 1):
        raise InvalidParams(f"need 2^k leaves with k >= 1, got {count}")
    if len(set(leaves)) != count:
        raise DuplicateLeaf("diamond leaves must be distinct")
    for s in leaves:
        if not 0 <= s < 1 << params.digest_bits:
            raise InvalidParams(f"leaf {s:#x} wider than {params.digest_bits} bits")
    rng = random.Random(seed)
    levels = [leaves]
    edges = []
    while len(levels[-1]) > 1:
        level = levels[-1]
        parents = []
        blocks = []
        for i in range(0, len(level), 2):
            ba, bb = find_collision(
                params, level[i], level[i + 1], rng.getrandbits(64),
                parallelism=parallelism, stats=stats,
            )
            parents.append(compress(params, level[i], ba))
            blocks += [ba, bb]
        levels.append(tuple(parents))
        edges.append(tuple(blocks))
    return Diamond(params, tuple(levels), tuple(edges))


def linking_path(diamond: Diamond, leaf_index: int) -> list[bytes]:
    """Edge blocks from leaf ``leaf_index`` up to the root, leaf side first."""
    if not 0 <= leaf_index < len(diamond.leaves):
        raise IndexOutOfRange(f"leaf index {leaf_index} not in 0..{len(diamond.leaves) - 1}")
    path = []
    i = leaf_index
    for blocks in diamond.edge_blocks:
        path.append(blocks[i])
        i //= 2
    return path


def herd_prefix(
    params: HashParams,
    diamond: Diamond,
    prefix: bytes,
    seed: int = 0,
    *,
    parallelism: int = 1,
    stats: SearchStats | None = None,
) -> tuple[bytes, int, list[bytes]]:
    """Find a linking block taking ``prefix`` onto some diamond leaf.

    Returns ``(link_block, leaf_index, suffix)`` such that
    ``iterate(IV, prefix_blocks + [link_block] + suffix) == diamond.root``.
    Expected work is 2^d / 2^k calls; the search gives up at 2^(d-k+6).
    """
    d = params.digest_bits
    if d > 32:
        raise InvalidParams("herding limited to d <= 32")
    state = iterate(params, iv(params), split_blocks(prefix))
    targets = {s: i for i, s in enumerate(diamond.leaves)}
    budget = 1 << max(d - diamond.depth + 6, 0)
    stats = stats if stats is not None else SearchStats()
    stats.searches += 1
    probes = 0

    def done(block: bytes):
        idx = targets[compress(params, state, block)]
        return block, idx, linking_path(diamond, idx)

    if parallelism <= 1:
        rng = random.Random(seed)
        while probes < budget:
            b = rng.randbytes(BLOCK_BYTES)
            probes += 1
            if compress(params, state, b) in targets:
                stats.probes += probes
                return done(b)
    else:
        frozen = frozenset(targets)
        with ProcessPoolExecutor(parallelism) as pool:
            rnd = 0
            while probes < budget:
                futures = [
                    pool.submit(_herd_batch, d, state, frozen, (seed, rnd, w), _BATCH)
                    for w in range(parallelism)
                ]
                rnd += 1
                found = None
                for fut in futures:
                    b, used = fut.result()
                    probes += used
                    if b is not None and found is None:
                        found = b
                if found is not None:
                    stats.probes += probes
                    return done(found)
    stats.probes += probes
    raise BudgetExceeded(f"no linking block within {budget} probes")


def random_states(params: HashParams, count: int, seed: int, exclude=()) -> list[int]:
    """``count`` distinct chaining values, none of them in ``exclude``."""
    rng = random.Random(seed)
    taken = set(exclude)
    out = []
    if count > (1 << params.digest_bits) - len(taken):
        raise InvalidParams("not enough distinct chaining values left")
    while len(out) < count:
        s = rng.getrandbits(params.digest_bits)
        if s not in taken:
            taken.add(s)
            out.append(s)
    return out
