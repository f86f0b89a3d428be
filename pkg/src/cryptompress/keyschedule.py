"""Key parsing and growth.

The 128-bit base key splits into five working parts (sizes in bits):

    asm key 48 = orders 16 | horizontal arrangement 16 | vertical arrangement 16
    rm key 16
    tm key 16
    sm key 48 = arrangement 16 | xor subkeys 32

The five 16-bit arrangement words feed the placement table that keys the
ciphertext scramble; the order word alone builds the Add-Sub Matrix; the
32 xor-subkey bits split into eight nibbles, one (S, R) pair per prime.
Failed-attempt hardening appends 32-bit sticky keys, one per round.
"""

import random
from dataclasses import dataclass, field

from .engine import AddSubMatrix
from .errors import EntropyUnavailable, WrongLength

KEY_BYTES = 16
STICKY_BITS = 32

# Placement-table kinds in scramble cycle order.
KINDS = ("asmh", "asmv", "rm", "sm", "tm")


def _nibbles16(word: int) -> tuple[int, int, int, int]:
    return ((word >> 12) & 15, (word >> 8) & 15, (word >> 4) & 15, word & 15)


@dataclass(frozen=True)
class NibbleTable:
    """The 20 arrangement nibbles: one per (matrix kind, target slot)."""

    asmh: tuple[int, int, int, int]
    asmv: tuple[int, int, int, int]
    rm: tuple[int, int, int, int]
    sm: tuple[int, int, int, int]
    tm: tuple[int, int, int, int]

    def group(self, kind_index: int) -> tuple[int, int, int, int]:
        return getattr(self, KINDS[kind_index])


@dataclass(frozen=True)
class XorSubkeys:
    """Eight 4-bit subkeys; (s1,s2) serve prime 2, (s3,s4) prime 3, ..."""

    values: tuple[int, int, int, int, int, int, int, int]

    def pair_for(self, prime_index: int) -> tuple[int, int]:
        return self.values[2 * prime_index], self.values[2 * prime_index + 1]


@dataclass(frozen=True)
class BaseKey:
    asm_key: int  # 48 bits
    rm_key: int  # 16 bits
    tm_key: int  # 16 bits
    sm_key: int  # 48 bits

    @classmethod
    def from_bytes(cls, raw: bytes) -> "BaseKey":
        if len(raw) != KEY_BYTES:
            raise WrongLength(f"base key must be 16 bytes, got {len(raw)}")
        return cls(
            asm_key=int.from_bytes(raw[0:6], "big"),
            rm_key=int.from_bytes(raw[6:8], "big"),
            tm_key=int.from_bytes(raw[8:10], "big"),
            sm_key=int.from_bytes(raw[10:16], "big"),
        )

    def to_bytes(self) -> bytes:
        return (
            self.asm_key.to_bytes(6, "big")
            + self.rm_key.to_bytes(2, "big")
            + self.tm_key.to_bytes(2, "big")
            + self.sm_key.to_bytes(6, "big")
        )

    @property
    def orders(self) -> tuple[int, int, int, int]:
        return _nibbles16(self.asm_key >> 32)

    @property
    def xor_word(self) -> int:
        return self.sm_key & 0xFFFFFFFF


@dataclass(frozen=True)
class KeyChain:
    """Base key plus the sticky keys appended by hardening, oldest first."""

    base: BaseKey
    sticky: tuple[int, ...] = field(default_factory=tuple)

    @property
    def key_bits(self) -> int:
        return 8 * KEY_BYTES + STICKY_BITS * len(self.sticky)


def build_asm(orders: tuple[int, int, int, int]) -> AddSubMatrix:
    """Build the delta lookup from the four order nibbles."""
    return AddSubMatrix(orders=tuple(orders))


def parse_key(raw: bytes) -> tuple[AddSubMatrix, NibbleTable, XorSubkeys]:
    """Split a 128-bit key into its three derived working structures."""
    base = BaseKey.from_bytes(raw)
    return derive_material(base)


def derive_material(base: BaseKey) -> tuple[AddSubMatrix, NibbleTable, XorSubkeys]:
    asm = build_asm(base.orders)
    table = NibbleTable(
        asmh=_nibbles16((base.asm_key >> 16) & 0xFFFF),
        asmv=_nibbles16(base.asm_key & 0xFFFF),
        rm=_nibbles16(base.rm_key),
        sm=_nibbles16(base.sm_key >> 32),
        tm=_nibbles16(base.tm_key),
    )
    w = base.xor_word
    subkeys = XorSubkeys(values=tuple((w >> (28 - 4 * i)) & 15 for i in range(8)))
    return asm, table, subkeys


def _draw_bits(rng: random.Random, nbits: int) -> int:
    try:
        return rng.getrandbits(nbits)
    except Exception as exc:  # the source itself failed, not our state
        raise EntropyUnavailable(f"randomness source failed: {exc}") from exc


def generate_key(rng: random.Random | None = None) -> BaseKey:
    """Draw a fresh uniformly random 128-bit base key.

    Pass a seeded random.Random for reproducible tests; the default is the
    OS entropy pool. No weak-key screening: the scheme defines none.
    """
    if rng is None:
        rng = random.SystemRandom()
    return BaseKey.from_bytes(_draw_bits(rng, 128).to_bytes(KEY_BYTES, "big"))


def extend_key(chain: KeyChain, rng: random.Random | None = None) -> KeyChain:
    """Append one fresh 32-bit sticky key; prior keys are untouched."""
    if rng is None:
        rng = random.SystemRandom()
    return KeyChain(base=chain.base, sticky=chain.sticky + (_draw_bits(rng, STICKY_BITS),))


def sticky_nibbles(word: int) -> tuple[int, ...]:
    """Split a 32-bit sticky key into its eight subkey nibbles, MSB-first."""
    return tuple((word >> (28 - 4 * i)) & 15 for i in range(8))
