"""Measurement harness for the scheme's two empirical claims: hardening
grows brute-force work, and run-heavy inputs compress into fewer sequence
events. Plus a standard bit-diffusion diagnostic.

Every run takes an explicit seed; reports are plain dataclasses with
to_dict for JSON/CSV emission.
"""

import random
import time
from dataclasses import asdict, dataclass, field

from . import codec
from .cipher import CipherGrid, decrypt_block, encrypt_block, harden
from .container import compressed_size_bits, write_cipher, CipherMessage
from .engine import AddSubMatrix, compress_block
from .errors import CryptompressError, InvalidKeyspace, ValueOutOfRange
from .keyschedule import BaseKey, KeyChain

MAX_RESTRICTED_BITS = 24


@dataclass
class AttackReport:
    keyspace_bits: int
    attempts_made: int
    hardenings_triggered: int
    elapsed_seconds: float
    success: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class BlockStats:
    symbols: int
    sm_events: int
    compressed_bits: int
    ratio: float


@dataclass
class RatioReport:
    entries: list[BlockStats] = field(default_factory=list)

    @property
    def mean_events(self) -> float:
        return sum(e.sm_events for e in self.entries) / len(self.entries)

    @property
    def mean_bits(self) -> float:
        return sum(e.compressed_bits for e in self.entries) / len(self.entries)

    @property
    def mean_ratio(self) -> float:
        return sum(e.ratio for e in self.entries) / len(self.entries)

    def to_dict(self) -> dict:
        return {
            "blocks": len(self.entries),
            "mean_events": self.mean_events,
            "mean_bits": self.mean_bits,
            "mean_ratio": self.mean_ratio,
        }


@dataclass
class AvalancheReport:
    samples: int
    mean: float
    min: int
    max: int

    def to_dict(self) -> dict:
        return asdict(self)


def _candidate_chain(base: BaseKey, low_bits: int, value: int, sticky: tuple[int, ...]) -> KeyChain:
    """The true base key with its lowest `low_bits` bits replaced."""
    raw = int.from_bytes(base.to_bytes(), "big")
    mask = (1 << low_bits) - 1
    cand = (raw & ~mask) | value
    return KeyChain(base=BaseKey.from_bytes(cand.to_bytes(16, "big")), sticky=sticky)


def bruteforce_demo(
    grid: CipherGrid,
    chain: KeyChain,
    known_block: int,
    restricted_bits: int,
    harden_every: int,
    seed: int,
) -> AttackReport:
    """Known-plaintext sweep of a toy keyspace against a live defender.

    The true key differs from candidates only in its low `restricted_bits`
    bits. The attacker tries each candidate once, in a seed-shuffled
    order, always against the *current* ciphertext and with only the
    sticky keys that existed when the attack started. Every failed
    attempt increments the defender's counter; every `harden_every`-th
    failure (0 = never) triggers hardening, which rewrites the sequence
    cells and grows the chain, so every later attempt, the true base key
    included, dies on the round-count check. The report then shows a full
    unsuccessful sweep: the restart cost hardening imposes.
    """
    if restricted_bits > MAX_RESTRICTED_BITS:
        raise InvalidKeyspace(f"restricted_bits capped at {MAX_RESTRICTED_BITS}")
    if restricted_bits < 1:
        raise InvalidKeyspace("restricted_bits must be at least 1")
    start = time.perf_counter()
    order = list(range(1 << restricted_bits))
    rng = random.Random(seed)
    rng.shuffle(order)
    stale_sticky = chain.sticky
    live_grid, live_chain = grid, chain
    attempts = 0
    failures = 0
    success = False
    for value in order:
        candidate = _candidate_chain(chain.base, restricted_bits, value, stale_sticky)
        attempts += 1
        try:
            hit = decrypt_block(live_grid, candidate) == known_block
        except CryptompressError:
            hit = False
        if hit:
            success = True
            break
        failures += 1
        if harden_every and failures % harden_every == 0:
            live_grid, live_chain = harden(live_grid, live_chain, rng)
    return AttackReport(
        keyspace_bits=restricted_bits,
        attempts_made=attempts,
        hardenings_triggered=failures // harden_every if harden_every else 0,
        elapsed_seconds=time.perf_counter() - start,
        success=success,
    )


def compression_stats(blocks: list[int], asm: AddSubMatrix) -> RatioReport:
    """Sequence-event counts and serialized sizes for a batch of blocks."""
    report = RatioReport()
    for block in blocks:
        cb = compress_block(codec.block_to_symbols(block), asm)
        events = sum(len(v) for v in cb.sm.values())
        bits = compressed_size_bits(cb)
        report.entries.append(
            BlockStats(
                symbols=codec.SYMBOLS_PER_BLOCK,
                sm_events=events,
                compressed_bits=bits,
                ratio=bits / codec.BLOCK_BITS,
            )
        )
    return report


def biased_blocks(count: int, seed: int, stay: float = 0.8) -> list[int]:
    """Blocks whose symbol stream repeats with probability `stay`:
    run-heavy inputs, the scheme's favourable case."""
    if not 0 <= stay <= 1:
        raise ValueOutOfRange("stay probability must be in [0,1]")
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        symbols = [rng.choice(codec.PRIMES)]
        for _ in range(codec.SYMBOLS_PER_BLOCK - 1):
            if rng.random() < stay:
                symbols.append(symbols[-1])
            else:
                symbols.append(rng.choice(codec.PRIMES))
        out.append(codec.symbols_to_block(symbols))
    return out


def random_blocks(count: int, seed: int) -> list[int]:
    rng = random.Random(seed)
    return [rng.getrandbits(codec.BLOCK_BITS) for _ in range(count)]


def _grid_bytes(grid: CipherGrid) -> bytes:
    return write_cipher(CipherMessage(grids=(grid,), tail_bits=codec.BLOCK_BITS))


def _hamming(a: bytes, b: bytes) -> int:
    if len(a) < len(b):
        a = a + bytes(len(b) - len(a))
    elif len(b) < len(a):
        b = b + bytes(len(a) - len(b))
    return sum(bin(x ^ y).count("1") for x, y in zip(a, b))


def avalanche_test(samples: int, chain: KeyChain, seed: int) -> AvalancheReport:
    """Flip one random plaintext bit per sample and report the Hamming
    distance between the serialized grids (shorter one zero-padded)."""
    if samples < 100:
        raise ValueOutOfRange("need at least 100 samples")
    rng = random.Random(seed)
    distances = []
    for _ in range(samples):
        block = rng.getrandbits(codec.BLOCK_BITS)
        flipped = block ^ (1 << rng.randrange(codec.BLOCK_BITS))
        d = _hamming(
            _grid_bytes(encrypt_block(block, chain)),
            _grid_bytes(encrypt_block(flipped, chain)),
        )
        distances.append(d)
    return AvalancheReport(
        samples=samples,
        mean=sum(distances) / len(distances),
        min=min(distances),
        max=max(distances),
    )
