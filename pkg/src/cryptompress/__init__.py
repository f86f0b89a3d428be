"""Compression-based 30-bit block cipher with a growing sticky key.

Reference implementation: library (codec, engine, keyschedule, cipher,
container), CLI and analysis harness. Not a secure cipher; see README.
"""

from .codec import (
    BLOCK_BITS,
    PRIMES,
    PaddedMessage,
    SYMBOLS_PER_BLOCK,
    block_to_symbols,
    reassemble_message,
    segment_message,
    symbols_to_block,
)
from .engine import (
    AddSubMatrix,
    CompressedBlock,
    SequenceEvent,
    compress_block,
    decompress_block,
    traverse_target,
)
from .keyschedule import (
    BaseKey,
    KeyChain,
    NibbleTable,
    XorSubkeys,
    build_asm,
    derive_material,
    extend_key,
    generate_key,
    parse_key,
)
from .cipher import (
    AsmStringCell,
    CipherGrid,
    EmptyCell,
    RmOutcomeCell,
    SmListCell,
    TmPairCell,
    decrypt_block,
    encrypt_block,
    harden,
    harden_message,
    scramble,
    sticky_round_apply,
    sticky_round_invert,
    unscramble,
    xor_sequence_matrix,
)
from .container import (
    CipherMessage,
    read_cipher,
    read_key,
    write_cipher,
    write_key,
)
from . import analysis, errors

__all__ = [
    "BLOCK_BITS",
    "PRIMES",
    "SYMBOLS_PER_BLOCK",
    "PaddedMessage",
    "block_to_symbols",
    "symbols_to_block",
    "segment_message",
    "reassemble_message",
    "AddSubMatrix",
    "CompressedBlock",
    "SequenceEvent",
    "compress_block",
    "decompress_block",
    "traverse_target",
    "BaseKey",
    "KeyChain",
    "NibbleTable",
    "XorSubkeys",
    "build_asm",
    "derive_material",
    "extend_key",
    "generate_key",
    "parse_key",
    "AsmStringCell",
    "CipherGrid",
    "EmptyCell",
    "RmOutcomeCell",
    "SmListCell",
    "TmPairCell",
    "encrypt_block",
    "decrypt_block",
    "harden",
    "harden_message",
    "scramble",
    "unscramble",
    "sticky_round_apply",
    "sticky_round_invert",
    "xor_sequence_matrix",
    "CipherMessage",
    "read_key",
    "write_key",
    "read_cipher",
    "write_cipher",
    "analysis",
    "errors",
]
