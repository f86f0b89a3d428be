"""Command-line front end.

    cryptompress keygen  --out KEY
    cryptompress encrypt --key KEY --in PLAIN --out CIPHER
    cryptompress decrypt --key KEY --in CIPHER --out PLAIN
    cryptompress harden  --key KEY --cipher CIPHER
    cryptompress inspect --cipher CIPHER [--json]
    cryptompress trace   --key KEY --block HEX30 [--json]
    cryptompress analyze {bruteforce,compression,avalanche} ...

Exit codes: 0 success, 1 usage error, 2 integrity failure (wrong key,
tampering, round-count mismatch), 3 I/O or format error.
"""

import argparse
import csv
import io
import json
import os
import random
import sys
from typing import Optional, Sequence

from . import analysis, codec, container
from .cipher import (
    AsmStringCell,
    CipherGrid,
    EmptyCell,
    RmOutcomeCell,
    SmListCell,
    TmPairCell,
    decrypt_block,
    encrypt_block,
    harden_message,
)
from .engine import TraceStep, compress_block
from .errors import (
    ContainerError,
    CryptompressError,
    IntegrityFailure,
    RoundCountMismatch,
)
from .keyschedule import KeyChain, derive_material, generate_key

PRIMES = codec.PRIMES


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; this tool reserves 2 for integrity
    # failures, so route usage problems through UsageError instead.
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read_file(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _write_file(path: str, data: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(data)


def _replace_file(path: str, data: bytes) -> None:
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _load_chain(path: str) -> KeyChain:
    return container.read_key(_read_file(path))


def _parse_block_arg(text: str) -> int:
    s = text.lower().removeprefix("0x")
    try:
        value = int(s, 16)
    except ValueError:
        raise UsageError(f"--block expects hex digits, got {text!r}")
    if value >= 1 << codec.BLOCK_BITS:
        raise UsageError(f"--block must fit 30 bits, got {text!r}")
    return value


def _emit(args, payload: dict | list, csv_rows: Optional[list[dict]] = None) -> None:
    if getattr(args, "format", "json") == "csv":
        rows = csv_rows if csv_rows is not None else [payload]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if getattr(args, "out", None):
        _write_file(args.out, text.encode())
    else:
        sys.stdout.write(text)


def _cmd_keygen(args) -> int:
    chain = KeyChain(base=generate_key())
    _write_file(args.out, container.write_key(chain))
    print(f"wrote 128-bit key to {args.out}", file=sys.stderr)
    return 0


def _cmd_encrypt(args) -> int:
    chain = _load_chain(args.key)
    payload = _read_file(args.infile)
    msg = codec.segment_message(payload)
    grids = tuple(encrypt_block(b, chain) for b in msg.blocks)
    _write_file(args.out, container.write_cipher(container.CipherMessage(grids=grids, tail_bits=msg.tail_bits)))
    return 0


def _cmd_decrypt(args) -> int:
    chain = _load_chain(args.key)
    msg = container.read_cipher(_read_file(args.infile))
    if msg.sticky_rounds != len(chain.sticky):
        raise RoundCountMismatch(
            f"cipher file has {msg.sticky_rounds} sticky rounds, key file has {len(chain.sticky)}"
        )
    blocks = tuple(decrypt_block(g, chain) for g in msg.grids)
    payload = codec.reassemble_message(codec.PaddedMessage(blocks=blocks, tail_bits=msg.tail_bits))
    _write_file(args.out, payload)
    return 0


def _cmd_harden(args) -> int:
    chain = _load_chain(args.key)
    msg = container.read_cipher(_read_file(args.cipher))
    if msg.sticky_rounds != len(chain.sticky):
        raise RoundCountMismatch(
            f"cipher file has {msg.sticky_rounds} sticky rounds, key file has {len(chain.sticky)}"
        )
    grids, new_chain = harden_message(msg.grids, chain)
    # Key first: once the new sticky word is durable the rewritten cipher
    # is always recoverable; the reverse order could strand the cipher.
    _replace_file(args.key, container.write_key(new_chain))
    _replace_file(
        args.cipher,
        container.write_cipher(container.CipherMessage(grids=grids, tail_bits=msg.tail_bits)),
    )
    print(
        f"hardened: key now {new_chain.key_bits} bits, {len(new_chain.sticky)} sticky round(s)",
        file=sys.stderr,
    )
    return 0


def _cell_dict(cell) -> dict:
    if isinstance(cell, EmptyCell):
        return {"kind": "empty"}
    if isinstance(cell, AsmStringCell):
        return {"kind": "asm", "x_pos": cell.x_pos, "sign_mask": cell.sign_mask, "text": cell.render()}
    if isinstance(cell, RmOutcomeCell):
        return {"kind": "rm", "value": cell.value}
    if isinstance(cell, SmListCell):
        return {"kind": "sm", "pairs": [list(p) for p in cell.pairs]}
    return {"kind": "tm", "prime": PRIMES[cell.prime_code], "last_seq": cell.last_seq}


def _cell_text(cell) -> str:
    if isinstance(cell, EmptyCell):
        return "-"
    if isinstance(cell, (AsmStringCell, SmListCell, TmPairCell)):
        return cell.render()
    return str(cell.value)


def _render_grid(grid: CipherGrid) -> str:
    headers = ["Order", "ASM(h)", "ASM(v)", "RM", "SM", "TM"]
    rows = []
    for r, row in enumerate(grid.rows()):
        rows.append([format(grid.orders[r], "04b")] + [_cell_text(c) for c in row])
    widths = [max(len(headers[c]), *(len(row[c]) for row in rows)) for c in range(6)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    for row in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)))
    return "\n".join(lines)


def _cmd_inspect(args) -> int:
    msg = container.read_cipher(_read_file(args.cipher))
    if args.json:
        payload = {
            "sticky_rounds": msg.sticky_rounds,
            "tail_bits": msg.tail_bits,
            "blocks": [
                {
                    "orders": list(g.orders),
                    "rows": [[_cell_dict(c) for c in row] for row in g.rows()],
                }
                for g in msg.grids
            ],
        }
        print(json.dumps(payload, indent=2))
    else:
        print(f"blocks: {len(msg.grids)}  sticky rounds: {msg.sticky_rounds}  tail bits: {msg.tail_bits}")
        for i, g in enumerate(msg.grids):
            print(f"\nblock {i}:")
            print(_render_grid(g))
    return 0


def _render_asm_table(asm) -> str:
    lines = ["Order  Target  2   3   5   7"]
    for i, t in enumerate(PRIMES):
        cells = []
        for j, c in enumerate(PRIMES):
            cells.append(" X " if i == j else f"{asm.delta(t, c):+d} ".rjust(3))
        lines.append(f"{format(asm.orders[i], '04b')}   {t}       " + " ".join(cells))
    return "\n".join(lines)


def _cmd_trace(args) -> int:
    chain = _load_chain(args.key)
    asm, _, _ = derive_material(chain.base)
    block = _parse_block_arg(args.block)
    steps: list[TraceStep] = []
    cb = compress_block(codec.block_to_symbols(block), asm, trace=steps)
    tm_list = [None if s is None else list(s) for s in cb.tm]
    if args.json:
        payload = {
            "block": f"{block:08x}",
            "symbols": list(codec.block_to_symbols(block)),
            "steps": [s._asdict() for s in steps],
            "rm": {str(p): cb.rm[p] for p in PRIMES},
            "sm": {str(p): [list(e) for e in cb.sm[p]] for p in PRIMES},
            "tm": tm_list,
        }
        print(json.dumps(payload, indent=2))
        return 0
    print(f"block 0x{block:08x} -> symbols {' '.join(map(str, codec.block_to_symbols(block)))}")
    print()
    print(_render_asm_table(asm))
    print()
    for s in steps:
        if s.action == "absorb":
            what = f"absorb {s.detail} cell(s) of {s.target}"
        else:
            sign = "+1" if asm.delta(s.target, s.detail) > 0 else "-1"
            what = f"cross {s.detail} ({sign})"
        print(f"{s.target}.{s.seq:<3} {what:28} -> {s.value}")
    print()
    print("Target  SM                     RM    TM")
    for i, p in enumerate(PRIMES):
        sm_text = " ; ".join(f"{a}|{b}" for a, b in cb.sm[p]) or "-"
        tm_text = f"{cb.tm[i][0]}|{cb.tm[i][1]}" if cb.tm[i] else "-"
        rm_text = str(cb.rm[p]) if cb.rm[p] is not None else "-"
        print(f"{p}       {sm_text:22} {rm_text:5} {tm_text}")
    return 0


def _demo_block(rng: random.Random) -> int:
    # a block where every prime occurs at least twice, so all eight xor
    # subkeys matter and candidate elimination is meaningful
    while True:
        block = rng.getrandbits(codec.BLOCK_BITS)
        symbols = codec.block_to_symbols(block)
        if all(symbols.count(p) >= 2 for p in PRIMES):
            return block


def _cmd_analyze_bruteforce(args) -> int:
    rng = random.Random(args.seed)
    chain = KeyChain(base=generate_key(rng))
    block = _demo_block(rng)
    grid = encrypt_block(block, chain)
    baseline = analysis.bruteforce_demo(grid, chain, block, args.restricted_bits, 0, args.seed)
    hardened = analysis.bruteforce_demo(
        grid, chain, block, args.restricted_bits, args.harden_every, args.seed
    )
    rows = [
        {"run": "baseline", **baseline.to_dict()},
        {"run": "hardened", **hardened.to_dict()},
    ]
    _emit(args, {"baseline": baseline.to_dict(), "hardened": hardened.to_dict()}, rows)
    return 0


def _cmd_analyze_compression(args) -> int:
    rng = random.Random(args.seed)
    chain = KeyChain(base=generate_key(rng))
    asm, _, _ = derive_material(chain.base)
    if args.biased:
        blocks = analysis.biased_blocks(args.count, args.seed, args.stay)
    else:
        blocks = analysis.random_blocks(args.count, args.seed)
    report = analysis.compression_stats(blocks, asm)
    rows = [
        {
            "symbols": e.symbols,
            "sm_events": e.sm_events,
            "compressed_bits": e.compressed_bits,
            "ratio": e.ratio,
        }
        for e in report.entries
    ]
    _emit(args, report.to_dict(), rows)
    return 0


def _cmd_analyze_avalanche(args) -> int:
    rng = random.Random(args.seed)
    if args.key:
        chain = _load_chain(args.key)
    else:
        chain = KeyChain(base=generate_key(rng))
    report = analysis.avalanche_test(args.samples, chain, args.seed)
    _emit(args, report.to_dict())
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="cryptompress", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("keygen", help="generate a fresh 128-bit key file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_keygen)

    p = sub.add_parser("encrypt", help="encrypt a file")
    p.add_argument("--key", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a file")
    p.add_argument("--key", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_decrypt)

    p = sub.add_parser("harden", help="apply one sticky round to key and cipher files")
    p.add_argument("--key", required=True)
    p.add_argument("--cipher", required=True)
    p.set_defaults(func=_cmd_harden)

    p = sub.add_parser("inspect", help="render the cell grids of a cipher file")
    p.add_argument("--cipher", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("trace", help="step-by-step compression of one 30-bit block")
    p.add_argument("--key", required=True)
    p.add_argument("--block", required=True, help="hex, at most 30 bits")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_trace)

    pa = sub.add_parser("analyze", help="measurement harnesses")
    asub = pa.add_subparsers(dest="subtool", required=True, parser_class=_Parser)

    p = asub.add_parser("bruteforce", help="paired baseline/hardened key sweep")
    p.add_argument("--restricted-bits", type=int, default=16)
    p.add_argument("--harden-every", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_analyze_bruteforce)

    p = asub.add_parser("compression", help="sequence-event and size statistics")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--biased", action="store_true", help="run-heavy inputs")
    p.add_argument("--stay", type=float, default=0.8)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_analyze_compression)

    p = asub.add_parser("avalanche", help="one-bit diffusion distances")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--key", help="key file; generated from the seed when omitted")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_analyze_avalanche)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (IntegrityFailure, RoundCountMismatch) as exc:
        print(f"integrity failure: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # downstream consumer (head, less) closed the pipe; not an error
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except (ContainerError, CryptompressError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
