"""
Fixture Setup Module
Central coordinator that builds locked circuits from blocks and the bundled
hosts.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

from blockgen import RightKeyFamily
from block_factory import BlockFactory
from data.host_data import load_host
from netlist import Netlist, Oracle, constant_host, integrate, key_assignment, synthesize_block
from truthsets import LockBlock

logger = logging.getLogger(__name__)


@dataclass
class LockedFixture:
    """A block integrated into a host, with a right key and the matching oracle."""

    block: LockBlock
    family: RightKeyFamily
    locked: Netlist
    key: Dict[str, int]
    oracle: Oracle


def right_key(block: LockBlock, family: RightKeyFamily) -> Dict[str, int]:
    """K_f = 0 with the smallest right-key offset as K_g."""
    return key_assignment(block.n, 0, min(family.offsets))


def lock_block(block: LockBlock, family: RightKeyFamily, host: Optional[Netlist] = None,
               target_output: Optional[str] = None) -> LockedFixture:
    """Lock ``host`` (default: constant-0 host of block width) with ``block``."""
    host = host if host is not None else constant_host(block.n)
    locked = integrate(host, synthesize_block(block), target_output)
    key = right_key(block, family)
    return LockedFixture(block, family, locked, key, Oracle(locked, key))


def build_locked(kind: str, n: int, t: Optional[int] = None, host="const0",
                 factory: Optional[BlockFactory] = None, **params) -> LockedFixture:
    """Build a block by kind and lock a host given by catalog name, path or netlist."""
    factory = factory or BlockFactory()
    block, family = factory.create_block(kind, n, t=t, **params)
    if isinstance(host, str):
        host = load_host(host, n_inputs=n)
    fixture = lock_block(block, family, host)
    logger.info("Locked %s with %s block n=%d: %d key inputs", host.name, kind, n, len(fixture.locked.key_inputs))
    return fixture
