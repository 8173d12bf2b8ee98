"""JSON files for published stores, participant shares and diamonds.

Output is canonical: fixed key order, lowercase hex, two-space indent and a
trailing newline, so saving the same object twice gives identical bytes.
Writes go to a temporary file in the target directory and are renamed into place.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import jsonschema

from .errors import SchemaViolation
from .latin_core import Triple
from .sharing_schemes import STORE_VERSION, HashShare, PublicStore, TripleShare
from .toy_hash import Diamond, HashParams

SHARE_VERSION = "lsss-share-v1"
TRIPLE_SHARE_VERSION = "lsss-triple-share-v1"
DIAMOND_VERSION = "lsss-diamond-v1"

_HEX = {"type": "string", "pattern": "^([0-9a-f]{2})*$"}
_BLOCK = {"type": "string", "pattern": "^[0-9a-f]{16}$"}
_DIGEST = {"type": "string", "pattern": "^[0-9a-f]{64}$"}
_ID = {"type": "integer", "minimum": 0}


def _obj(props: dict, required=None) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": list(props) if required is None else required,
        "additionalProperties": False,
    }


STORE_SCHEMA = _obj({
    "version": {"const": STORE_VERSION},
    "params": _obj({
        "digest_bits": {"enum": [8, 16, 24, 32, 40]},
        "n_participants": {"type": "integer", "minimum": 1},
        "threshold": {"type": ["integer", "null"], "minimum": 0},
        "share_blocks": {"type": "integer", "minimum": 1},
    }),
    "records": {
        "type": "array",
        "items": _obj({
            "members": {"type": "array", "items": _ID, "minItems": 1},
            "path": {"type": "array", "items": _BLOCK, "minItems": 1},
        }),
    },
    "mask": _HEX,
    "payload_len": {"type": "integer", "minimum": 0},
    "commitments": {"type": "array", "items": _DIGEST},
})

SHARE_SCHEMA = _obj({
    "version": {"const": SHARE_VERSION},
    "owner": _ID,
    "blocks": {"type": "array", "items": _BLOCK, "minItems": 1},
})

TRIPLE_SHARE_SCHEMA = _obj({
    "version": {"const": TRIPLE_SHARE_VERSION},
    "owner": _ID,
    "order": {"type": "integer", "minimum": 1},
    "triples": {
        "type": "array",
        "minItems": 1,
        "items": {"type": "array", "items": _ID, "minItems": 3, "maxItems": 3},
    },
})

DIAMOND_SCHEMA = _obj({
    "version": {"const": DIAMOND_VERSION},
    "digest_bits": {"enum": [8, 16, 24, 32, 40]},
    "levels": {"type": "array", "minItems": 2, "items": {"type": "array", "items": _HEX}},
    "edge_blocks": {"type": "array", "items": {"type": "array", "items": _BLOCK}},
})


def _validate(doc, schema) -> None:
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise SchemaViolation(exc.message, path or "<root>") from None


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _write_atomic(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise SchemaViolation(f"not UTF-8: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"invalid JSON: {exc}") from None


# --- store ------------------------------------------------------------------

def store_to_dict(store: PublicStore) -> dict:
    return {
        "version": store.version,
        "params": {
            "digest_bits": store.digest_bits,
            "n_participants": store.n_participants,
            "threshold": store.threshold,
            "share_blocks": store.share_blocks,
        },
        "records": [
            {"members": list(members), "path": [b.hex() for b in path]}
            for members, path in sorted(store.records.items())
        ],
        "mask": store.mask.hex(),
        "payload_len": store.payload_len,
        "commitments": [c.hex() for c in store.commitments],
    }


def store_from_dict(doc) -> PublicStore:
    _validate(doc, STORE_SCHEMA)
    params = doc["params"]
    n = params["n_participants"]
    records = {}
    for k, rec in enumerate(doc["records"]):
        members = rec["members"]
        where = f"records/{k}/members"
        if members != sorted(set(members)):
            raise SchemaViolation("members must be sorted ascending and unique", where)
        if members[-1] >= n:
            raise SchemaViolation(f"member id {members[-1]} >= n_participants {n}", where)
        if tuple(members) in records:
            raise SchemaViolation("duplicate record", where)
        records[tuple(members)] = tuple(bytes.fromhex(b) for b in rec["path"])
    mask = bytes.fromhex(doc["mask"])
    if len(mask) != doc["payload_len"]:
        raise SchemaViolation(f"mask has {len(mask)} bytes, payload_len says {doc['payload_len']}", "mask")
    return PublicStore(
        digest_bits=params["digest_bits"],
        n_participants=n,
        threshold=params["threshold"],
        share_blocks=params["share_blocks"],
        records=records,
        mask=mask,
        payload_len=doc["payload_len"],
        commitments=tuple(bytes.fromhex(c) for c in doc["commitments"]),
    )


def save_store(store: PublicStore, path) -> None:
    _write_atomic(path, _dump(store_to_dict(store)))


def load_store(path) -> PublicStore:
    return store_from_dict(_read(path))


# --- shares -----------------------------------------------------------------

def save_share(share: HashShare, path) -> None:
    doc = {"version": SHARE_VERSION, "owner": share.owner, "blocks": [b.hex() for b in share.blocks]}
    _write_atomic(path, _dump(doc))


def share_from_dict(doc) -> HashShare:
    _validate(doc, SHARE_SCHEMA)
    return HashShare(doc["owner"], tuple(bytes.fromhex(b) for b in doc["blocks"]))


def load_share(path) -> HashShare:
    return share_from_dict(_read(path))


def save_triple_share(share: TripleShare, path) -> None:
    doc = {
        "version": TRIPLE_SHARE_VERSION,
        "owner": share.owner,
        "order": share.order,
        "triples": [list(t) for t in share.triples],
    }
    _write_atomic(path, _dump(doc))


def triple_share_from_dict(doc) -> TripleShare:
    _validate(doc, TRIPLE_SHARE_SCHEMA)
    n = doc["order"]
    for k, t in enumerate(doc["triples"]):
        if max(t) >= n:
            raise SchemaViolation(f"component >= order {n}", f"triples/{k}")
    return TripleShare(doc["owner"], n, tuple(Triple(*t) for t in doc["triples"]))


def load_triple_share(path) -> TripleShare:
    return triple_share_from_dict(_read(path))


def load_any_share(path) -> HashShare | TripleShare:
    doc = _read(path)
    if isinstance(doc, dict) and doc.get("version") == TRIPLE_SHARE_VERSION:
        return triple_share_from_dict(doc)
    return share_from_dict(doc)


# --- diamonds ---------------------------------------------------------------

def save_diamond(diamond: Diamond, path) -> None:
    params = diamond.params
    doc = {
        "version": DIAMOND_VERSION,
        "digest_bits": params.digest_bits,
        "levels": [[params.encode(s).hex() for s in level] for level in diamond.levels],
        "edge_blocks": [[b.hex() for b in blocks] for blocks in diamond.edge_blocks],
    }
    _write_atomic(path, _dump(doc))


def load_diamond(path) -> Diamond:
    doc = _read(path)
    _validate(doc, DIAMOND_SCHEMA)
    params = HashParams(doc["digest_bits"])
    width = params.state_bytes * 2
    levels = []
    for i, level in enumerate(doc["levels"]):
        if any(len(h) != width for h in level):
            raise SchemaViolation(f"chaining values must be {width} hex digits", f"levels/{i}")
        levels.append(tuple(int(h, 16) for h in level))
    edges = tuple(tuple(bytes.fromhex(b) for b in blocks) for blocks in doc["edge_blocks"])
    for i in range(len(levels) - 1):
        if len(levels[i]) != 2 * len(levels[i + 1]) or len(edges) <= i or len(edges[i]) != len(levels[i]):
            raise SchemaViolation("level sizes must halve and match their edge blocks", f"levels/{i}")
    if len(levels[-1]) != 1 or len(edges) != len(levels) - 1:
        raise SchemaViolation("diamond must end in a single root", "levels")
    return Diamond(params, tuple(levels), edges)
