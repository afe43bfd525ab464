"""
Shared test fixtures and utilities for the G-Anti-SAT locking toolkit tests.
"""

import pytest
import sys
import os

import numpy as np

# Add the Locking directory to the Python path for imports
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'Locking'))

from block_factory import initialize_block_factory
from data.example_blocks import get_example_block
from data.host_data import load_sample_host
from fixture_setup import build_locked
from netlist import Gate, Netlist
from truthsets import is_right_key


@pytest.fixture(scope="session")
def block_factory():
    """Create a block factory for testing."""
    return initialize_block_factory()


@pytest.fixture(scope="session")
def example_blocks():
    """The three worked four-input blocks."""
    return {name: get_example_block(name) for name in ("example1", "example2", "example3")}


@pytest.fixture(scope="session")
def sample_host():
    """The bundled c17 host."""
    return load_sample_host()


@pytest.fixture(scope="session")
def canonical_blocks(block_factory):
    """Canonical comp/noncomp/antisat blocks for n in 4..6, keyed by (kind, n, t)."""
    blocks = {}
    for n in (4, 5, 6):
        blocks[("antisat", n, None)] = block_factory.create_block("antisat", n)
        for t in range(1, n):
            blocks[("comp", n, t)] = block_factory.create_block("comp", n, t=t)
        for t in range(2, n):
            blocks[("noncomp", n, t)] = block_factory.create_block("noncomp", n, t=t)
    return blocks


@pytest.fixture(scope="session")
def antisat_locked_n2():
    """Anti-SAT n=2 locking a constant-0 host."""
    return build_locked("antisat", 2)


@pytest.fixture(scope="session")
def antisat_locked_n4():
    """Anti-SAT n=4 locking a constant-0 host."""
    return build_locked("antisat", 4)


@pytest.fixture(scope="session")
def noncomp_locked_n4():
    """Canonical non-complementary n=4, t=2 block on a constant-0 host."""
    return build_locked("noncomp", 4, t=2)


@pytest.fixture(scope="session")
def c17_locked():
    """Anti-SAT n=6 locking output 22 of c17."""
    return build_locked("antisat", 6, host="c17")


@pytest.fixture(scope="function")
def xor_locked_and():
    """A 2-input AND whose output is XOR-locked by one key bit (right key 0)."""
    gates = [Gate("AND", ("a", "b"), "w"), Gate("XOR", ("w", "keyinput0"), "y")]
    return Netlist(["a", "b", "keyinput0"], ["y"], gates, name="and_xor")


@pytest.fixture(scope="function")
def rng():
    """Seeded numpy generator."""
    return np.random.default_rng(7)


def assert_family_valid(block, family):
    """Helper function to validate a right-key family against the block."""
    assert family is not None
    assert family.n == block.n
    assert len(family.offsets) > 0
    assert family.key_count == len(family.offsets) << block.n
    for k_f, k_g in family.expand():
        assert is_right_key(block, k_f, k_g)


def assert_partition_valid(histogram, n):
    """Helper function to check that a census covers the whole key space."""
    assert isinstance(histogram, dict)
    assert all(count > 0 for count in histogram.values())
    assert sum(histogram.values()) == 2 ** (2 * n)


def assert_report_valid(result):
    """Helper function to validate a provider result."""
    assert result is not None
    assert isinstance(result, dict)
    assert "error" not in result, result.get("error")
