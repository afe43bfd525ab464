"""
Block Factory Module
Contains the BlockFactory for creating locking blocks by kind.
"""

import logging
from typing import Optional, Tuple

from blockgen import (
    CompSpec,
    NonCompSpec,
    RightKeyFamily,
    build_antisat,
    build_complementary,
    build_consecutive_complementary,
    build_custom,
    build_noncomplementary,
)
from errors import DomainError
from truthsets import BlockType, LockBlock

logger = logging.getLogger(__name__)

BLOCK_KINDS = ("antisat", "comp", "noncomp", "consecutive", "custom")


class BlockFactory:
    """Factory for creating G-Anti-SAT locking blocks."""

    def __init__(self, default_block_type: BlockType = BlockType.TYPE0):
        self.default_block_type = BlockType(default_block_type)

    def create_block(self, kind: str, n: int, *, t: Optional[int] = None,
                     block_type: Optional[int] = None, **params) -> Tuple[LockBlock, RightKeyFamily]:
        """
        Create a block of the given kind.

        Args:
            kind: One of antisat, comp, noncomp, consecutive, custom
            n: Input width
            t: Column bits for comp and noncomp
            block_type: 0 or 1; the factory default when omitted
            **params: Builder labels (f_column, common_row, q, included_columns,
                dividing_column, cell_row, single_cell_in, p, validate,
                f_true_set, g_true_set)

        Returns:
            (LockBlock, RightKeyFamily)
        """
        kind = kind.lower()
        block_type = self.default_block_type if block_type is None else BlockType(block_type)

        if kind == "antisat":
            result = build_antisat(n, block_type)
        elif kind == "comp":
            spec = CompSpec(
                n, self._require_t(kind, t),
                dividing_column=params.get("dividing_column", 0),
                cell_row=params.get("cell_row", 0),
                single_cell_in=params.get("single_cell_in", "g"),
                block_type=block_type,
            )
            result = build_complementary(spec)
        elif kind == "noncomp":
            columns = params.get("included_columns")
            spec = NonCompSpec(
                n, self._require_t(kind, t),
                f_column=params.get("f_column", 0),
                common_row=params.get("common_row"),
                q=params.get("q"),
                included_columns=frozenset(columns) if columns is not None else None,
                block_type=block_type,
            )
            result = build_noncomplementary(spec)
        elif kind == "consecutive":
            if params.get("p") is None:
                raise DomainError("Consecutive blocks need p")
            result = build_consecutive_complementary(n, params["p"], block_type,
                                                     validate=params.get("validate", True))
        elif kind == "custom":
            if params.get("f_true_set") is None or params.get("g_true_set") is None:
                raise DomainError("Custom blocks need f_true_set and g_true_set")
            result = build_custom(n, params["f_true_set"], params["g_true_set"], block_type)
        else:
            raise DomainError(f"Unknown block kind {kind!r}; expected one of {', '.join(BLOCK_KINDS)}")

        logger.info("Built %s block n=%d type=%d with %d right-key offsets",
                    kind, n, int(block_type), len(result[1].offsets))
        return result

    @staticmethod
    def _require_t(kind: str, t: Optional[int]) -> int:
        if t is None:
            raise DomainError(f"{kind} blocks need t")
        return t


def initialize_block_factory(block_type: int = 0) -> BlockFactory:
    """Initialize the block factory."""
    factory = BlockFactory(BlockType(block_type))
    logger.info("Block factory ready: kinds %s, default type %d", ", ".join(BLOCK_KINDS), block_type)
    return factory
