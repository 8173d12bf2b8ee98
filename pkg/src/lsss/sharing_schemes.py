"""Dealing and recovery.

Three schemes live here:

* critical-set sharing (``cds_*``): each participant holds triples of one or more
  critical sets of the secret square; a pool that contains a critical set
  completes the square uniquely.
* modular splitting of a critical set (``cgs_*``): all but the last share are
  random triples, the last one makes the component-wise sum mod n equal the set.
* herding threshold sharing (``threshold_*``): every participant holds random
  blocks; for each minimal authorized subset the concatenated blocks are hashed to
  a leaf of a diamond structure, and the published edge blocks carry that leaf to
  the root. The root keys a SHA-256 keystream that masks the payload.

Shares are committed with full-width SHA-256 so holders can check them
(:func:`vss_verify`).
"""

from __future__ import annotations

import hashlib
import itertools
import math
import random
import secrets
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    CommitmentsAbsent,
    EmptyAccessStructure,
    IncompleteAssignment,
    Inconsistent,
    InvalidParticipants,
    InvalidPartial,
    InvalidThreshold,
    LengthMismatch,
    NoCompletion,
    NotACriticalSet,
    NotAuthorized,
    NotUnique,
    WrongSquare,
)
from .latin_core import (
    LatinSquare,
    PartialLatinSquare,
    Triple,
    complete,
    count_completions,
    is_critical_set,
)
from .toy_hash import (
    BLOCK_BYTES,
    HashParams,
    SearchStats,
    build_diamond,
    iterate,
    iv,
    linking_path,
    random_states,
)

STORE_VERSION = "lsss-store-v1"


def _rng(seed: int | None) -> random.Random:
    # unseeded dealing draws from the OS entropy pool
    return random.Random(seed) if seed is not None else secrets.SystemRandom()


# --- access structures ----------------------------------------------------

@dataclass(frozen=True)
class AccessStructure:
    n_participants: int
    minimal_subsets: tuple[tuple[int, ...], ...]
    threshold: int | None = None

    def __post_init__(self):
        subsets = tuple(tuple(sorted(set(s))) for s in self.minimal_subsets)
        object.__setattr__(self, "minimal_subsets", subsets)
        if not subsets:
            raise EmptyAccessStructure("access structure has no subsets")
        for s in subsets:
            if not s:
                raise EmptyAccessStructure("empty authorized subset")
            if s[0] < 0 or s[-1] >= self.n_participants:
                raise InvalidParticipants(f"subset {s} outside 0..{self.n_participants - 1}")
        as_sets = [set(s) for s in subsets]
        for i, a in enumerate(as_sets):
            for j, b in enumerate(as_sets):
                if i != j and a <= b:
                    raise InvalidParticipants(f"subset {subsets[i]} is contained in {subsets[j]}")

    def without(self, *excluded: Iterable[int]) -> AccessStructure:
        """Drop the given subsets (e.g. a pair that must not recover together)."""
        drop = {tuple(sorted(s)) for s in excluded}
        kept = tuple(s for s in self.minimal_subsets if s not in drop)
        return AccessStructure(self.n_participants, kept, None)


def _check_threshold(n: int, t: int) -> None:
    if not 0 <= t < n:
        raise InvalidThreshold(f"need 0 <= t < n, got n={n}, t={t}")


def access_structure_size(n: int, t: int) -> int:
    """Number of authorized subsets of a (t+1, n) threshold structure."""
    _check_threshold(n, t)
    return sum(math.comb(n, k) for k in range(t + 1, n + 1))


def minimal_subsets(n: int, t: int) -> AccessStructure:
    _check_threshold(n, t)
    return AccessStructure(n, tuple(itertools.combinations(range(n), t + 1)), t)


# --- herding threshold scheme ---------------------------------------------

@dataclass(frozen=True)
class HashShare:
    owner: int
    blocks: tuple[bytes, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(bytes(b) for b in self.blocks))
        if not self.blocks or any(len(b) != BLOCK_BYTES for b in self.blocks):
            raise InvalidParticipants(f"share of {self.owner} must hold one or more {BLOCK_BYTES}-byte blocks")

    def data(self) -> bytes:
        return b"".join(self.blocks)


@dataclass(frozen=True)
class PublicStore:
    digest_bits: int
    n_participants: int
    threshold: int | None
    share_blocks: int
    records: Mapping[tuple[int, ...], tuple[bytes, ...]]
    mask: bytes
    payload_len: int
    commitments: tuple[bytes, ...] = ()
    version: str = STORE_VERSION

    @property
    def params(self) -> HashParams:
        return HashParams(self.digest_bits)


def default_share_blocks(params: HashParams) -> int:
    # a share must be at least as long as the digest
    return max(1, math.ceil(params.digest_bits / (8 * BLOCK_BYTES)))


def keystream(params: HashParams, root: int, length: int) -> bytes:
    seed = params.encode(root)
    out = bytearray()
    j = 0
    while len(out) < length:
        out += hashlib.sha256(seed + j.to_bytes(8, "big")).digest()
        j += 1
    return bytes(out[:length])


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


def commit(share: HashShare) -> bytes:
    return hashlib.sha256(share.data()).digest()


def threshold_setup(
    params: HashParams,
    access: AccessStructure,
    payload: bytes,
    seed: int | None = None,
    *,
    share_blocks: int | None = None,
    parallelism: int = 1,
    stats: SearchStats | None = None,
) -> tuple[list[HashShare], PublicStore]:
    """Deal random block shares and publish one linking record per minimal subset."""
    rng = _rng(seed)
    if share_blocks is None:
        share_blocks = default_share_blocks(params)
    if share_blocks < default_share_blocks(params):
        raise InvalidParticipants("shares must be at least as long as the digest")
    shares = [
        HashShare(i, tuple(rng.randbytes(BLOCK_BYTES) for _ in range(share_blocks)))
        for i in range(access.n_participants)
    ]
    start = iv(params)
    leaf_of = {
        subset: iterate(params, start, [b for i in subset for b in shares[i].blocks])
        for subset in access.minimal_subsets
    }
    # subsets whose private messages collide share one leaf
    leaves = sorted(set(leaf_of.values()))
    width = 2
    while width < len(leaves):
        width *= 2
    leaves += random_states(params, width - len(leaves), rng.getrandbits(64), exclude=leaves)
    diamond = build_diamond(params, leaves, rng.getrandbits(64), parallelism=parallelism, stats=stats)
    index = {s: i for i, s in enumerate(diamond.leaves)}
    records = {
        subset: tuple(linking_path(diamond, index[leaf]))
        for subset, leaf in sorted(leaf_of.items())
    }
    mask = _xor(payload, keystream(params, diamond.root, len(payload)))
    store = PublicStore(
        digest_bits=params.digest_bits,
        n_participants=access.n_participants,
        threshold=access.threshold,
        share_blocks=share_blocks,
        records=records,
        mask=mask,
        payload_len=len(payload),
        commitments=tuple(commit(s) for s in shares),
    )
    return shares, store


def _pool_by_owner(shares: Iterable[HashShare]) -> dict[int, HashShare]:
    pool: dict[int, HashShare] = {}
    for s in shares:
        if s.owner in pool and pool[s.owner] != s:
            raise Inconsistent(f"two different shares claim owner {s.owner}")
        pool[s.owner] = s
    return pool


def covered_subsets(store: PublicStore, shares: Iterable[HashShare]) -> list[tuple[int, ...]]:
    owners = set(_pool_by_owner(shares))
    return sorted(s for s in store.records if owners.issuperset(s))


def threshold_root(store: PublicStore, shares: Iterable[HashShare], subset: Sequence[int] | None = None) -> int:
    """Chaining value reached by a subset's blocks followed by its linking record."""
    pool = _pool_by_owner(shares)
    if subset is None:
        covered = covered_subsets(store, pool.values())
        if not covered:
            raise NotAuthorized(f"participants {sorted(pool)} cover no authorized subset")
        subset = covered[0]
    subset = tuple(sorted(subset))
    if subset not in store.records or not set(pool).issuperset(subset):
        raise NotAuthorized(f"no linking record usable for subset {subset}")
    params = store.params
    private = [b for i in subset for b in pool[i].blocks]
    return iterate(params, iterate(params, iv(params), private), store.records[subset])


def threshold_recover(
    store: PublicStore, shares: Iterable[HashShare], subset: Sequence[int] | None = None
) -> bytes:
    """Unmask the payload using the lexicographically first covered subset (or ``subset``)."""
    root = threshold_root(store, shares, subset)
    return _xor(store.mask, keystream(store.params, root, store.payload_len))


def vss_verify(share: HashShare, store: PublicStore) -> int | None:
    """Index of the commitment matching ``share``, or None."""
    if not store.commitments:
        raise CommitmentsAbsent("store carries no commitments")
    digest = commit(share)
    for i, c in enumerate(store.commitments):
        if c == digest:
            return i
    return None


# --- critical-set schemes -------------------------------------------------

@dataclass(frozen=True)
class TripleShare:
    owner: int
    order: int
    triples: tuple[Triple, ...] = field(default_factory=tuple)

    def __post_init__(self):
        triples = tuple(Triple(*t) for t in self.triples)
        object.__setattr__(self, "triples", triples)
        if not triples:
            raise InvalidParticipants(f"share of {self.owner} is empty")
        if any(not 0 <= v < self.order for t in triples for v in t):
            raise InvalidParticipants(f"share of {self.owner} has components outside 0..{self.order - 1}")


def cds_deal(
    square: LatinSquare,
    critical_sets: Sequence[PartialLatinSquare],
    assignment: Mapping[Sequence[int], int],
) -> list[TripleShare]:
    union: set[Triple] = set()
    for k, cs in enumerate(critical_sets):
        if not is_critical_set(cs):
            raise NotACriticalSet(f"set #{k} is not a critical set")
        if complete(cs) != square:
            raise WrongSquare(f"set #{k} completes to a different square")
        union |= cs.cells
    owners = {Triple(*t): p for t, p in assignment.items()}
    missing = union - owners.keys()
    if missing:
        raise IncompleteAssignment(f"no owner for {sorted(missing)}")
    held: dict[int, list[Triple]] = {}
    for t in sorted(union):
        held.setdefault(owners[t], []).append(t)
    return [TripleShare(p, square.order, tuple(ts)) for p, ts in sorted(held.items())]


def cds_recover(n: int, pool: Iterable[Sequence[int]]) -> LatinSquare:
    cells = {Triple(*t) for t in pool}
    try:
        p = PartialLatinSquare(n, frozenset(cells))
    except InvalidPartial as exc:
        raise Inconsistent(str(exc)) from None
    found = count_completions(p, 2)
    if found == 0:
        raise NoCompletion("pooled triples admit no Latin square")
    if found > 1:
        raise NotUnique("pooled triples do not determine the square")
    return complete(p)


def cgs_last_share(critical: Sequence[Sequence[int]], shares: Sequence[Sequence[Sequence[int]]], n: int) -> list[Triple]:
    """Triples that bring the component-wise sum of ``shares`` to ``critical`` mod n."""
    out = []
    for j, target in enumerate(critical):
        out.append(Triple(*((target[x] - sum(s[j][x] for s in shares)) % n for x in range(3))))
    return out


def cgs_deal(critical: PartialLatinSquare, participants: int, seed: int | None = None) -> list[TripleShare]:
    """Split a critical set among ``participants``; all shares are needed to rebuild it.

    The set is taken in sorted triple order.
    """
    if participants < 2:
        raise InvalidParticipants(f"need at least 2 participants, got {participants}")
    if not len(critical):
        raise InvalidPartial("critical set is empty")
    n = critical.order
    target = sorted(critical.cells)
    rng = _rng(seed)
    randoms = [
        [Triple(rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in target]
        for _ in range(participants - 1)
    ]
    last = cgs_last_share(target, randoms, n)
    return [TripleShare(i, n, tuple(ts)) for i, ts in enumerate(randoms + [last])]


def cgs_combine(shares: Sequence[TripleShare], n: int) -> list[Triple]:
    if not shares:
        raise LengthMismatch("no shares to combine")
    length = len(shares[0].triples)
    if any(len(s.triples) != length for s in shares):
        raise LengthMismatch("shares differ in length")
    return [
        Triple(*(sum(s.triples[j][x] for s in shares) % n for x in range(3)))
        for j in range(length)
    ]
