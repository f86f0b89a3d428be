import json
from pathlib import Path

import pytest

from cryptompress import BaseKey, KeyChain

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def golden():
    """The worked-example fixture: key, block, matrices, placement, errata."""
    with open(FIXTURES / "worked_example.json") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def golden_chain(golden):
    return KeyChain(base=BaseKey.from_bytes(bytes.fromhex(golden["key_hex"])))


@pytest.fixture(scope="session")
def golden_block(golden):
    return int(golden["block_hex"], 16)
