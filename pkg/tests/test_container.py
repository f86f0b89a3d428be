import random

import pytest
from hypothesis import given, settings, strategies as st

import cryptompress as cm
from cryptompress import container
from cryptompress.cipher import EmptyCell
from cryptompress.errors import (
    BadMagic,
    BadVersion,
    ContainerError,
    InventoryMismatch,
    MalformedCell,
    RoundCountMismatch,
)
from cryptompress.keyschedule import KeyChain, extend_key, generate_key


def random_chain(rng, depth=0):
    chain = KeyChain(base=generate_key(rng))
    for _ in range(depth):
        chain = extend_key(chain, rng)
    return chain


def random_message(rng, chain, nblocks=3):
    grids = tuple(cm.encrypt_block(rng.getrandbits(30), chain) for _ in range(nblocks))
    return container.CipherMessage(grids=grids, tail_bits=rng.randrange(1, 31))


def test_golden_key_file_bytes(golden, golden_chain):
    data = container.write_key(golden_chain)
    assert len(data) == 21
    assert data.hex() == golden["key_file_hex"]
    assert data[:4] == b"CMK1"
    assert data[4] == 0
    assert data[5:21] == bytes.fromhex(golden["key_hex"])


def test_key_round_trip_1000():
    rng = random.Random(21)
    for _ in range(1000):
        chain = random_chain(rng, rng.randrange(0, 4))
        assert container.read_key(container.write_key(chain)) == chain


def test_key_file_length_follows_sticky_count():
    rng = random.Random(22)
    chain = random_chain(rng)
    for k in range(1, 9):
        chain = extend_key(chain, rng)
        assert len(container.write_key(chain)) == 21 + 4 * k


def test_cipher_round_trip_1000():
    rng = random.Random(23)
    for _ in range(1000):
        chain = random_chain(rng, rng.randrange(0, 3))
        msg = random_message(rng, chain, nblocks=rng.randrange(1, 4))
        assert container.read_cipher(container.write_cipher(msg)) == msg


@settings(max_examples=50, deadline=None)
@given(st.binary(min_size=16, max_size=16), st.integers(1, 30), st.integers(0, 2**30 - 1))
def test_cipher_round_trip_property(raw, tail_bits, block):
    chain = KeyChain(base=cm.BaseKey.from_bytes(raw))
    msg = container.CipherMessage(grids=(cm.encrypt_block(block, chain),), tail_bits=tail_bits)
    assert container.read_cipher(container.write_cipher(msg)) == msg


def test_key_truncation_sweep(golden_chain):
    rng = random.Random(24)
    chain = extend_key(extend_key(golden_chain, rng), rng)
    data = container.write_key(chain)
    for cut in range(len(data)):
        with pytest.raises(ContainerError):
            container.read_key(data[:cut])


def test_cipher_truncation_sweep(golden_chain, golden_block):
    msg = container.CipherMessage(
        grids=(cm.encrypt_block(golden_block, golden_chain),) * 2, tail_bits=30
    )
    data = container.write_cipher(msg)
    for cut in range(len(data)):
        with pytest.raises(ContainerError):
            container.read_cipher(data[:cut])


def test_bad_magic():
    with pytest.raises(BadMagic):
        container.read_key(b"XXXX" + bytes(17))
    with pytest.raises(BadMagic):
        container.read_cipher(b"XXXX" + bytes(20))


def test_bad_version(golden_chain, golden_block):
    msg = container.CipherMessage(grids=(cm.encrypt_block(golden_block, golden_chain),), tail_bits=30)
    data = bytearray(container.write_cipher(msg))
    data[4] = 2
    with pytest.raises(BadVersion):
        container.read_cipher(bytes(data))


def test_trailing_bytes_rejected(golden_chain, golden_block):
    key_data = container.write_key(golden_chain)
    with pytest.raises(MalformedCell):
        container.read_key(key_data + b"\x00")
    msg = container.CipherMessage(grids=(cm.encrypt_block(golden_block, golden_chain),), tail_bits=30)
    with pytest.raises(MalformedCell):
        container.read_cipher(container.write_cipher(msg) + b"\x00")


def test_unknown_cell_tag_rejected(golden_chain, golden_block):
    msg = container.CipherMessage(grids=(cm.encrypt_block(golden_block, golden_chain),), tail_bits=30)
    data = bytearray(container.write_cipher(msg))
    # first cell tag sits right after header (11 bytes) + packed orders (2)
    assert data[13] in range(5)
    data[13] = 99
    with pytest.raises(MalformedCell):
        container.read_cipher(bytes(data))


def test_inventory_mismatch(golden_chain, golden_block):
    grid = cm.encrypt_block(golden_block, golden_chain)
    # overwrite one matrix-string cell with an extra empty
    idx = next(i for i, c in enumerate(grid.cells) if not isinstance(c, EmptyCell))
    cells = list(grid.cells)
    cells[idx] = EmptyCell()
    bad = container.CipherMessage(
        grids=(cm.CipherGrid(orders=grid.orders, cells=tuple(cells), sticky_rounds=0),),
        tail_bits=30,
    )
    data = _encode_without_checks(bad)
    with pytest.raises(InventoryMismatch):
        container.read_cipher(data)


def _encode_without_checks(msg):
    """Serialize a (possibly invalid) message for parser tests."""
    import struct

    from cryptompress.container import _encode_cell

    out = bytearray(b"CMC1")
    out.append(1)
    out.append(msg.grids[0].sticky_rounds)
    out += struct.pack(">I", len(msg.grids))
    out.append(msg.tail_bits)
    for grid in msg.grids:
        o = grid.orders
        out.append((o[0] << 4) | o[1])
        out.append((o[2] << 4) | o[3])
        for row in range(4):
            for kind in range(5):
                out += _encode_cell(grid.cell(kind, row))
    return bytes(out)


def test_write_cipher_rejects_mixed_rounds(golden_chain, golden_block):
    rng = random.Random(25)
    g0 = cm.encrypt_block(golden_block, golden_chain)
    chain1 = extend_key(golden_chain, rng)
    g1 = cm.encrypt_block(golden_block, chain1)
    with pytest.raises(RoundCountMismatch):
        container.write_cipher(container.CipherMessage(grids=(g0, g1), tail_bits=30))


def test_sticky_rounds_survive_serialization(golden_chain, golden_block):
    rng = random.Random(26)
    chain = extend_key(extend_key(golden_chain, rng), rng)
    msg = container.CipherMessage(grids=(cm.encrypt_block(golden_block, chain),), tail_bits=30)
    back = container.read_cipher(container.write_cipher(msg))
    assert back.sticky_rounds == 2
    assert back.grids[0].sticky_rounds == 2


def test_zero_block_count_rejected():
    data = b"CMC1" + bytes([1, 0]) + bytes(4) + bytes([30])
    with pytest.raises(MalformedCell):
        container.read_cipher(data)


def test_byte_flip_fuzz_never_crashes(golden_chain, golden_block):
    """Any single byte corruption parses to a typed error or a value."""
    msg = container.CipherMessage(grids=(cm.encrypt_block(golden_block, golden_chain),), tail_bits=30)
    data = container.write_cipher(msg)
    rng = random.Random(27)
    for _ in range(300):
        i = rng.randrange(len(data))
        mutated = bytearray(data)
        mutated[i] ^= 1 << rng.randrange(8)
        try:
            container.read_cipher(bytes(mutated))
        except ContainerError:
            pass


def test_random_garbage_never_crashes():
    rng = random.Random(28)
    for _ in range(300):
        blob = rng.randbytes(rng.randrange(0, 2048))
        for reader in (container.read_key, container.read_cipher):
            try:
                reader(blob)
            except ContainerError:
                pass
    # headers promising huge bodies must fail on truncation, not allocate
    huge = b"CMC1" + bytes([1, 0]) + (0xFFFFFFFF).to_bytes(4, "big") + bytes([30])
    with pytest.raises(ContainerError):
        container.read_cipher(huge)
