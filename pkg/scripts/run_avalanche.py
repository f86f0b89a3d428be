#!/usr/bin/env python3
"""One-bit-flip diffusion measurement over serialized ciphertext grids."""

import argparse
import json
import random

import cryptompress as cm
from cryptompress import analysis


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--key-hex", help="32 hex chars; random from seed when omitted")
    args = ap.parse_args()

    if args.key_hex:
        base = cm.BaseKey.from_bytes(bytes.fromhex(args.key_hex))
    else:
        base = cm.generate_key(random.Random(args.seed))
    report = analysis.avalanche_test(args.samples, cm.KeyChain(base=base), args.seed)
    print(json.dumps(report.to_dict(), indent=2))


if __name__ == "__main__":
    main()
