"""Block pipeline: compression output -> keyed XOR of the sequence data ->
sticky Feistel rounds -> keyed scramble of the 20 result cells.

The ciphertext of one block is a grid of six columns: the Order column in
clear (the scheme's own design, an acknowledged information leak) and five
scrambled data columns holding, per target row, the horizontal and
vertical matrix strings, the reduced outcome, the sequence list and the
term pair.
"""

import random
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from . import codec
from .engine import (
    AddSubMatrix,
    CompressedBlock,
    SequenceEvent,
    SequenceMatrix,
    compress_block,
    decompress_block,
)
from .errors import (
    IncompleteGrid,
    IntegrityFailure,
    RoundCountMismatch,
    ValueOutOfRange,
)
from .keyschedule import (
    KeyChain,
    NibbleTable,
    XorSubkeys,
    derive_material,
    extend_key,
    sticky_nibbles,
)

PRIMES = codec.PRIMES
N_KINDS = 5
N_SLOTS = 4
N_CELLS = N_KINDS * N_SLOTS


@dataclass(frozen=True)
class EmptyCell:
    pass


@dataclass(frozen=True)
class AsmStringCell:
    """One matrix row or column: where the self-mark X sits and the four
    sign bits (MSB->LSB over targets 2,3,5,7; 1 is +1)."""

    x_pos: int
    sign_mask: int

    def render(self) -> str:
        parts = []
        for i in range(4):
            if i == self.x_pos:
                parts.append("X")
            else:
                parts.append("+1" if (self.sign_mask >> (3 - i)) & 1 else "-1")
        return "".join(parts)


@dataclass(frozen=True)
class RmOutcomeCell:
    value: int


@dataclass(frozen=True)
class SmListCell:
    pairs: tuple[tuple[int, int], ...]

    def render(self) -> str:
        return " ; ".join(f"{s}|{r}" for s, r in self.pairs) if self.pairs else "(none)"


@dataclass(frozen=True)
class TmPairCell:
    prime_code: int  # index into (2,3,5,7)
    last_seq: int

    def render(self) -> str:
        return f"{PRIMES[self.prime_code]}|{self.last_seq}"


Cell = Union[EmptyCell, AsmStringCell, RmOutcomeCell, SmListCell, TmPairCell]


@dataclass(frozen=True)
class CipherGrid:
    """One block's ciphertext: clear order nibbles, 20 scrambled cells
    (kind-major: index = kind*4 + slot) and the sticky round count."""

    orders: tuple[int, int, int, int]
    cells: tuple[Cell, ...]
    sticky_rounds: int

    def cell(self, kind: int, slot: int) -> Cell:
        return self.cells[kind * N_SLOTS + slot]

    def rows(self) -> list[list[Cell]]:
        """Cells as 4 rows x 5 data columns, the presentation layout."""
        return [[self.cell(k, r) for k in range(N_KINDS)] for r in range(N_SLOTS)]


def _check_inventory(cells: Sequence[Cell], exc: type[Exception]) -> None:
    counts = {EmptyCell: 0, AsmStringCell: 0, RmOutcomeCell: 0, SmListCell: 0, TmPairCell: 0}
    if len(cells) != N_CELLS:
        raise exc(f"expected {N_CELLS} cells, got {len(cells)}")
    for c in cells:
        if type(c) not in counts:
            raise exc(f"unknown cell type {type(c).__name__}")
        counts[type(c)] += 1
    m = counts[RmOutcomeCell]
    if (
        counts[AsmStringCell] != 8
        or counts[SmListCell] != 4
        or counts[TmPairCell] != m
        or not 1 <= m <= 4
        or counts[EmptyCell] != 8 - 2 * m
    ):
        raise exc(f"cell inventory is not a permutation of the 20 logical items: {counts}")


def xor_sequence_matrix(sm: SequenceMatrix, subkeys: XorSubkeys) -> SequenceMatrix:
    """XOR every event pair with its prime's two subkeys (no swap here;
    the position swap belongs to sticky rounds). Involution."""
    out: SequenceMatrix = {}
    for i, p in enumerate(PRIMES):
        ks, kr = subkeys.pair_for(i)
        events = []
        for s, r in sm.get(p, []):
            if not (0 <= s <= 15 and 0 <= r <= 15):
                raise ValueOutOfRange(f"prime {p}: ({s},{r}) does not fit a nibble")
            events.append(SequenceEvent(s ^ ks, r ^ kr))
        out[p] = events
    return out


def _sticky_pairs(pairs, k_s: int, k_r: int, invert: bool):
    if invert:
        return tuple((b ^ k_s, a ^ k_r) for a, b in pairs)
    return tuple((r ^ k_r, s ^ k_s) for s, r in pairs)


def sticky_round_apply(sm: SequenceMatrix, sticky: int) -> SequenceMatrix:
    """One hardening round: XOR both halves of every event with the sticky
    subkeys of its prime, then swap the halves."""
    return _sticky_round(sm, sticky, invert=False)


def sticky_round_invert(sm: SequenceMatrix, sticky: int) -> SequenceMatrix:
    """Exact inverse of sticky_round_apply: unswap, then XOR."""
    return _sticky_round(sm, sticky, invert=True)


def _sticky_round(sm: SequenceMatrix, sticky: int, invert: bool) -> SequenceMatrix:
    ks = sticky_nibbles(sticky)
    out: SequenceMatrix = {}
    for i, p in enumerate(PRIMES):
        for a, b in sm.get(p, []):
            if not (0 <= a <= 15 and 0 <= b <= 15):
                raise ValueOutOfRange(f"prime {p}: ({a},{b}) does not fit a nibble")
        out[p] = [
            SequenceEvent(*pair)
            for pair in _sticky_pairs(sm.get(p, []), ks[2 * i], ks[2 * i + 1], invert)
        ]
    return out


def _swap_schedule(table: NibbleTable) -> list[tuple[int, int]]:
    """The 20 fixed transpositions the placement table defines: each kind
    hands one cell per slot to the next kind in the cycle, at the slot its
    nibble names (mod 4)."""
    schedule = []
    for k in range(N_KINDS):
        group = table.group(k)
        for i in range(N_SLOTS):
            j = group[i] % 4
            schedule.append((k * N_SLOTS + i, ((k + 1) % N_KINDS) * N_SLOTS + j))
    return schedule


def scramble(cells: Sequence[Cell], table: NibbleTable) -> tuple[Cell, ...]:
    """Permute the 20 logical cells with the keyed swap schedule."""
    _check_inventory(cells, IncompleteGrid)
    out = list(cells)
    for a, b in _swap_schedule(table):
        out[a], out[b] = out[b], out[a]
    return tuple(out)


def unscramble(cells: Sequence[Cell], table: NibbleTable) -> tuple[Cell, ...]:
    """Replay the swap schedule backwards; two-sided inverse of scramble."""
    _check_inventory(cells, IncompleteGrid)
    out = list(cells)
    for a, b in reversed(_swap_schedule(table)):
        out[a], out[b] = out[b], out[a]
    return tuple(out)


def _asm_cells(asm: AddSubMatrix) -> tuple[list[AsmStringCell], list[AsmStringCell]]:
    horizontal = [AsmStringCell(x_pos=i, sign_mask=asm.orders[i]) for i in range(4)]
    vertical = []
    for c in range(4):
        mask = 0
        for t in range(4):
            mask |= ((asm.orders[t] >> (3 - c)) & 1) << (3 - t)
        vertical.append(AsmStringCell(x_pos=c, sign_mask=mask))
    return horizontal, vertical


def data_cells(cb: CompressedBlock) -> tuple[Cell, ...]:
    """The 12 data cells (rm, sm, tm) a compressed block contributes."""
    cells: list[Cell] = []
    for p in PRIMES:
        v = cb.rm.get(p)
        cells.append(EmptyCell() if v is None else RmOutcomeCell(v))
    for p in PRIMES:
        cells.append(SmListCell(tuple((s, r) for s, r in cb.sm.get(p, []))))
    for slot in cb.tm:
        if slot is None:
            cells.append(EmptyCell())
        else:
            prime, last_seq = slot
            cells.append(TmPairCell(PRIMES.index(prime), last_seq))
    return tuple(cells)


def logical_cells(asm: AddSubMatrix, cb: CompressedBlock) -> tuple[Cell, ...]:
    """Lay the 20 items out unscrambled, kind-major (asmh, asmv, rm, sm, tm)."""
    horizontal, vertical = _asm_cells(asm)
    return tuple(horizontal) + tuple(vertical) + data_cells(cb)


def _split_logical(cells: Sequence[Cell]) -> CompressedBlock:
    """Inverse of logical_cells for the decrypt path; raises
    IntegrityFailure when a slot holds a cell of the wrong kind.

    The matrix-string columns carry their own placement witness: a string
    cell's X mark sits on the diagonal, so x_pos must equal the slot it
    occupies. Checking that needs no key material and catches scramble
    misplacement that would otherwise be invisible (these two columns are
    never consulted while restoring the block)."""
    for kind in (0, 1):
        for i in range(N_SLOTS):
            c = cells[kind * N_SLOTS + i]
            if not isinstance(c, AsmStringCell):
                raise IntegrityFailure(
                    f"matrix-string slot ({kind},{i}) holds {type(c).__name__}"
                )
            if c.x_pos != i:
                raise IntegrityFailure(
                    f"matrix-string cell at slot {i} marks position {c.x_pos}"
                )
    rm = {}
    sm: SequenceMatrix = {}
    for i, p in enumerate(PRIMES):
        c = cells[2 * N_SLOTS + i]
        if isinstance(c, RmOutcomeCell):
            rm[p] = c.value
        elif isinstance(c, EmptyCell):
            rm[p] = None
        else:
            raise IntegrityFailure(f"outcome slot for prime {p} holds {type(c).__name__}")
        s = cells[3 * N_SLOTS + i]
        if not isinstance(s, SmListCell):
            raise IntegrityFailure(f"sequence slot for prime {p} holds {type(s).__name__}")
        sm[p] = [SequenceEvent(a, b) for a, b in s.pairs]
    tm: list[Optional[tuple[int, int]]] = []
    for i in range(N_SLOTS):
        c = cells[4 * N_SLOTS + i]
        if isinstance(c, TmPairCell):
            tm.append((PRIMES[c.prime_code], c.last_seq))
        elif isinstance(c, EmptyCell):
            tm.append(None)
        else:
            raise IntegrityFailure(f"term slot {i} holds {type(c).__name__}")
    return CompressedBlock(rm=rm, sm=sm, tm=tuple(tm))


def _sm_cells_transformed(cells: Sequence[Cell], sticky: int) -> tuple[Cell, ...]:
    """Apply one sticky round to the four sequence cells of an unscrambled
    layout, leaving every other cell untouched."""
    ks = sticky_nibbles(sticky)
    out = list(cells)
    for i in range(N_SLOTS):
        idx = 3 * N_SLOTS + i
        c = out[idx]
        if not isinstance(c, SmListCell):
            raise IntegrityFailure(f"sequence slot for prime {PRIMES[i]} holds {type(c).__name__}")
        out[idx] = SmListCell(_sticky_pairs(c.pairs, ks[2 * i], ks[2 * i + 1], invert=False))
    return tuple(out)


def encrypt_block(block: int, chain: KeyChain) -> CipherGrid:
    """Encrypt one 30-bit block under the full key chain."""
    asm, table, subkeys = derive_material(chain.base)
    symbols = codec.block_to_symbols(block)
    cb = compress_block(symbols, asm)
    sm = xor_sequence_matrix(cb.sm, subkeys)
    for word in chain.sticky:
        sm = sticky_round_apply(sm, word)
    cells = logical_cells(asm, CompressedBlock(rm=cb.rm, sm=sm, tm=cb.tm))
    return CipherGrid(
        orders=chain.base.orders,
        cells=scramble(cells, table),
        sticky_rounds=len(chain.sticky),
    )


def decrypt_block(grid: CipherGrid, chain: KeyChain) -> int:
    """Invert encrypt_block. Raises RoundCountMismatch when the chain's
    sticky depth disagrees with the grid, IntegrityFailure when the
    reconstruction checks fail (wrong key or tampered ciphertext)."""
    if grid.sticky_rounds != len(chain.sticky):
        raise RoundCountMismatch(
            f"grid carries {grid.sticky_rounds} sticky rounds, chain has {len(chain.sticky)}"
        )
    asm, table, subkeys = derive_material(chain.base)
    cells = unscramble(grid.cells, table)
    cb = _split_logical(cells)
    sm = cb.sm
    for word in reversed(chain.sticky):
        sm = sticky_round_invert(sm, word)
    sm = xor_sequence_matrix(sm, subkeys)
    symbols = decompress_block(CompressedBlock(rm=cb.rm, sm=sm, tm=cb.tm), asm)
    return codec.symbols_to_block(symbols)


def harden_message(
    grids: Sequence[CipherGrid], chain: KeyChain, rng: random.Random | None = None
) -> tuple[tuple[CipherGrid, ...], KeyChain]:
    """Respond to a failed attempt: grow the chain by one 32-bit sticky
    key and rewrite the sequence portion of every block's ciphertext.

    Cell placement is untouched (the scramble is replayed with the same
    table); only sequence-list payloads change.
    """
    for grid in grids:
        if grid.sticky_rounds != len(chain.sticky):
            raise RoundCountMismatch(
                f"grid carries {grid.sticky_rounds} sticky rounds, chain has {len(chain.sticky)}"
            )
    new_chain = extend_key(chain, rng)
    word = new_chain.sticky[-1]
    _, table, _ = derive_material(chain.base)
    out = []
    for grid in grids:
        cells = unscramble(grid.cells, table)
        cells = _sm_cells_transformed(cells, word)
        out.append(
            CipherGrid(
                orders=grid.orders,
                cells=scramble(cells, table),
                sticky_rounds=grid.sticky_rounds + 1,
            )
        )
    return tuple(out), new_chain


def harden(
    grid: CipherGrid, chain: KeyChain, rng: random.Random | None = None
) -> tuple[CipherGrid, KeyChain]:
    """harden_message for a single block."""
    grids, new_chain = harden_message((grid,), chain, rng)
    return grids[0], new_chain
