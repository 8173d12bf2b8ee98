"""Command line front end.

Exit status: 0 on success, 1 on a domain failure (NotAuthorized, NotUnique,
NotRecoverable, ...), 2 on usage or file-format problems. Progress goes to
stderr; results go to stdout or to files.
"""

from __future__ import annotations

import argparse
import secrets
import sys
from pathlib import Path

from . import latin_core as lc
from . import ls_packing as pk
from . import public_store as ps
from . import sharing_schemes as ss
from . import toy_hash as th
from .errors import InputError, LsssError

STORE_FILE = "store.json"


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(63)
        _log(f"seed: {args.seed}")
    return args.seed


def _read_partial(path) -> lc.PartialLatinSquare:
    return lc.parse_square_text(Path(path).read_text(encoding="utf-8"))


def _read_square(path) -> lc.LatinSquare:
    return _read_partial(path).to_square()


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _store_path(p) -> Path:
    p = Path(p)
    return p / STORE_FILE if p.is_dir() else p


# --- ls -------------------------------------------------------------------

def cmd_ls(args) -> int:
    op = args.op
    if op == "gen":
        sys.stdout.write(lc.format_square_text(lc.random_square(args.order, _seed(args))))
    elif op == "bound":
        print(lc.lower_bound(args.order))
    elif op == "enumerate":
        print(lc.enumerate_count(args.order))
    else:
        if not args.file:
            raise InputError(f"ls {op} needs a square file")
        p = _read_partial(args.file)
        if op == "check":
            ok = p.is_full() and lc.validate_square(p.to_grid())
            print(f"latin: {_yes(ok)}")
            return 0 if ok else 1
        if op == "complete":
            sys.stdout.write(lc.format_square_text(lc.complete(p)))
        elif op == "count":
            print(lc.count_completions(p, args.limit))
        elif op == "critical":
            crit = lc.is_critical_set(p)
            strong = crit and lc.is_strong_critical_set(p)
            print(f"critical: {_yes(crit)}, strong: {_yes(strong)}")
        elif op == "strong":
            print(f"strong: {_yes(lc.is_strong_critical_set(p))}")
        elif op == "force":
            trace = lc.force_out(p)
            for t in trace.steps:
                print(f"{t.row} {t.col} {t.sym}")
            sys.stdout.write(lc.format_square_text(trace.final))
        elif op == "rect":
            grid = p.to_grid()
            rows = [row for row in grid if all(v is not None for v in row)]
            sys.stdout.write(lc.format_square_text(lc.extend_rectangle(rows)))
    return 0


# --- packing --------------------------------------------------------------

def cmd_pack(args) -> int:
    square = _read_square(args.file)
    print((pk.pack256 if args.format == "256" else pk.pack324)(square).hex())
    return 0


def _parse_hex(text: str) -> bytes:
    try:
        return bytes.fromhex(text.strip())
    except ValueError:
        raise InputError("payload is not valid hex") from None


def cmd_unpack(args) -> int:
    data = _parse_hex(args.hex)
    square = (pk.unpack256 if args.format == "256" else pk.unpack324)(data)
    sys.stdout.write(lc.format_square_text(square))
    return 0


# --- hash -----------------------------------------------------------------

def cmd_hash_vector(args) -> int:
    params = th.HashParams(args.digest_bits)
    width = params.state_bytes * 2
    if args.block is not None:
        state = int(args.state, 16) if args.state else 0
        block = _parse_hex(args.block)
        print(f"compress {th.compress(params, state, block):0{width}x}")
    else:
        message = _parse_hex(args.message_hex or "")
        print(f"hash_full {th.hash_full(params, message):0{width}x}")
    return 0


def cmd_hash_diamond_demo(args) -> int:
    params = th.HashParams(args.digest_bits)
    seed = _seed(args)
    stats = th.SearchStats()
    leaves = th.random_states(params, 1 << args.k, seed)
    dia = th.build_diamond(params, leaves, seed, parallelism=args.parallelism, stats=stats)
    width = params.state_bytes * 2
    ok = all(th.iterate(params, s, th.linking_path(dia, i)) == dia.root for i, s in enumerate(leaves))
    print(f"root {dia.root:0{width}x}")
    print(f"leaves {len(leaves)} collisions {stats.searches} probes {stats.probes}")
    print(f"all paths reach root: {_yes(ok)}")
    return 0 if ok else 1


def cmd_nostradamus_commit(args) -> int:
    params = th.HashParams(args.digest_bits)
    seed = _seed(args)
    leaves = th.random_states(params, 1 << args.k, seed)
    dia = th.build_diamond(params, leaves, seed, parallelism=args.parallelism)
    ps.save_diamond(dia, args.out)
    print(f"{dia.root:0{params.state_bytes * 2}x}")
    return 0


def cmd_nostradamus_reveal(args) -> int:
    dia = ps.load_diamond(args.diamond)
    params = dia.params
    prefix = Path(args.prefix_file).read_bytes()
    if len(prefix) % th.BLOCK_BYTES:
        # zero-pad the announced result to whole blocks
        prefix += b"\x00" * (-len(prefix) % th.BLOCK_BYTES)
        _log(f"prefix zero-padded to {len(prefix)} bytes")
    stats = th.SearchStats()
    link, leaf, suffix = th.herd_prefix(params, dia, prefix, _seed(args), parallelism=args.parallelism, stats=stats)
    message = prefix + link + b"".join(suffix)
    final = th.iterate(params, th.iv(params), th.split_blocks(message))
    width = params.state_bytes * 2
    if args.out:
        Path(args.out).write_bytes(message)
    else:
        print(f"message {message.hex()}")
    print(f"link {link.hex()}")
    print(f"leaf {leaf}")
    print(f"suffix {' '.join(b.hex() for b in suffix)}")
    print(f"probes {stats.probes}")
    print(f"final {final:0{width}x}")
    print(f"root {dia.root:0{width}x}")
    print(f"match: {_yes(final == dia.root)}")
    return 0 if final == dia.root else 1


# --- dealing and recovery -------------------------------------------------

def _parse_ids(text: str) -> tuple[int, ...]:
    try:
        return tuple(sorted(int(x) for x in text.split(",") if x.strip()))
    except ValueError:
        raise InputError(f"bad participant list {text!r}") from None


def cmd_deal_threshold(args) -> int:
    params = th.HashParams(args.digest_bits)
    seed = _seed(args)
    if args.payload_file:
        payload = Path(args.payload_file).read_bytes()
    elif args.gen_square:
        payload = pk.pack256(pk.first_recoverable_square(seed))
    else:
        raise InputError("give --payload-file or --gen-square")
    access = ss.minimal_subsets(args.n, args.t)
    if args.exclude:
        access = access.without(*(_parse_ids(e) for e in args.exclude))
    _log(f"building diamond over {len(access.minimal_subsets)} subsets at d={params.digest_bits}")
    shares, store = ss.threshold_setup(params, access, payload, seed, parallelism=args.parallelism)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ps.save_store(store, out / STORE_FILE)
    for s in shares:
        ps.save_share(s, out / f"share-{s.owner}.json")
    _log(f"wrote {out / STORE_FILE} and {len(shares)} shares")
    return 0


def cmd_deal_cds(args) -> int:
    square = _read_square(args.square)
    sets = [_read_partial(f) for f in args.critical]
    union = sorted(set().union(*(c.cells for c in sets)))
    assignment = {t: i for i, t in enumerate(union)}
    shares = ss.cds_deal(square, sets, assignment)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for s in shares:
        ps.save_triple_share(s, out / f"share-{s.owner}.json")
    _log(f"wrote {len(shares)} triple shares")
    return 0


def cmd_deal_cgs(args) -> int:
    critical = _read_partial(args.critical)
    shares = ss.cgs_deal(critical, args.participants, _seed(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for s in shares:
        ps.save_triple_share(s, out / f"share-{s.owner}.json")
    _log(f"wrote {len(shares)} triple shares")
    return 0


def _print_payload(payload: bytes) -> None:
    if len(payload) == pk.PACKED256_BYTES:
        sys.stdout.write(lc.format_square_text(pk.unpack256(payload)))
    elif len(payload) == pk.PACKED324_BYTES:
        sys.stdout.write(lc.format_square_text(pk.unpack324(payload)))
    else:
        print(payload.hex())


def cmd_recover(args) -> int:
    shares = [ps.load_any_share(f) for f in args.share]
    if shares and all(isinstance(s, ss.TripleShare) for s in shares):
        n = shares[0].order
        pool = [t for s in shares for t in s.triples]
        sys.stdout.write(lc.format_square_text(ss.cds_recover(n, pool)))
        return 0
    if not args.store:
        raise InputError("recover needs --store for hash shares")
    if any(isinstance(s, ss.TripleShare) for s in shares):
        raise InputError("cannot mix triple shares and hash shares")
    store = ps.load_store(_store_path(args.store))
    payload = ss.threshold_recover(store, shares)
    if args.raw:
        print(payload.hex())
    else:
        _print_payload(payload)
    return 0


def cmd_combine_cgs(args) -> int:
    shares = [ps.load_triple_share(f) for f in args.share]
    n = args.order if args.order else shares[0].order
    triples = ss.cgs_combine(shares, n)
    try:
        p = lc.PartialLatinSquare.from_triples(n, triples)
    except InputError:
        for t in triples:
            print(f"{t.row} {t.col} {t.sym}")
        return 0
    sys.stdout.write(lc.format_square_text(lc.complete(p) if args.complete else p))
    return 0


def cmd_verify(args) -> int:
    store = ps.load_store(_store_path(args.store))
    share = ps.load_share(args.share)
    idx = ss.vss_verify(share, store)
    if idx is None:
        print(f"share of {share.owner}: no matching commitment")
        return 1
    print(f"share of {share.owner}: matches commitment {idx}")
    return 0


# --- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lsss", description="Latin square secret sharing toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def seeded(p):
        p.add_argument("--seed", type=int)

    def parallel(p):
        p.add_argument("--parallelism", type=int, default=1)

    def width(p):
        p.add_argument("--digest-bits", type=int, default=16, choices=th.DIGEST_WIDTHS)

    ls = sub.add_parser("ls", help="Latin square operations")
    ls.add_argument("op", choices=["gen", "check", "complete", "count", "critical", "strong",
                                   "force", "rect", "enumerate", "bound"])
    ls.add_argument("file", nargs="?")
    ls.add_argument("--order", type=int, default=10)
    ls.add_argument("--limit", type=int, default=1000)
    seeded(ls)
    ls.set_defaults(func=cmd_ls)

    for name, func in (("pack", cmd_pack), ("unpack", cmd_unpack)):
        p = sub.add_parser(name, help="order-10 square to hex" if name == "pack" else "hex back to a square")
        p.add_argument("file" if name == "pack" else "hex")
        p.add_argument("--format", choices=["256", "324"], default="256")
        p.set_defaults(func=func)

    hsh = sub.add_parser("hash", help="toy iterative hash").add_subparsers(dest="hash_op", required=True)
    vec = hsh.add_parser("vector")
    width(vec)
    vec.add_argument("--state")
    vec.add_argument("--block")
    vec.add_argument("--message-hex")
    vec.set_defaults(func=cmd_hash_vector)
    demo = hsh.add_parser("diamond-demo")
    width(demo)
    demo.add_argument("--k", type=int, default=4)
    seeded(demo)
    parallel(demo)
    demo.set_defaults(func=cmd_hash_diamond_demo)
    nos = hsh.add_parser("nostradamus").add_subparsers(dest="nos_op", required=True)
    com = nos.add_parser("commit")
    width(com)
    com.add_argument("--k", type=int, default=4)
    com.add_argument("--out", required=True)
    seeded(com)
    parallel(com)
    com.set_defaults(func=cmd_nostradamus_commit)
    rev = nos.add_parser("reveal")
    rev.add_argument("--diamond", required=True)
    rev.add_argument("--prefix-file", required=True)
    rev.add_argument("--out")
    seeded(rev)
    parallel(rev)
    rev.set_defaults(func=cmd_nostradamus_reveal)

    deal = sub.add_parser("deal", help="split a secret into shares").add_subparsers(dest="scheme", required=True)
    thr = deal.add_parser("threshold")
    thr.add_argument("--n", type=int, required=True)
    thr.add_argument("--t", type=int, required=True)
    width(thr)
    src = thr.add_mutually_exclusive_group()
    src.add_argument("--payload-file")
    src.add_argument("--gen-square", action="store_true")
    thr.add_argument("--exclude", action="append", default=[], help="comma-separated ids; repeatable")
    thr.add_argument("--out", required=True)
    seeded(thr)
    parallel(thr)
    thr.set_defaults(func=cmd_deal_threshold)
    cds = deal.add_parser("cds")
    cds.add_argument("--square", required=True)
    cds.add_argument("--critical", action="append", required=True)
    cds.add_argument("--out", required=True)
    cds.set_defaults(func=cmd_deal_cds)
    cgs = deal.add_parser("cgs")
    cgs.add_argument("--critical", required=True)
    cgs.add_argument("--participants", type=int, required=True)
    cgs.add_argument("--out", required=True)
    seeded(cgs)
    cgs.set_defaults(func=cmd_deal_cgs)

    rec = sub.add_parser("recover", help="rebuild a secret from shares")
    rec.add_argument("--store")
    rec.add_argument("--share", action="append", required=True)
    rec.add_argument("--raw", action="store_true", help="print the payload as hex")
    rec.set_defaults(func=cmd_recover)

    comb = sub.add_parser("combine", help="sum modular shares").add_subparsers(dest="scheme", required=True)
    cc = comb.add_parser("cgs")
    cc.add_argument("--share", action="append", required=True)
    cc.add_argument("--order", type=int)
    cc.add_argument("--complete", action="store_true")
    cc.set_defaults(func=cmd_combine_cgs)

    ver = sub.add_parser("verify", help="check a share against the store commitments")
    ver.add_argument("--store", required=True)
    ver.add_argument("--share", required=True)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "parallelism", 1) < 1:
        _log("error: --parallelism must be >= 1")
        return 2
    try:
        return args.func(args)
    except LsssError as exc:
        _log(f"error: {type(exc).__name__}: {exc}")
        return exc.exit_code
    except OSError as exc:
        _log(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
