"""
Block Generation Module
K-map driven construction of two-function locking blocks: non-complementary
and complementary builders, the Anti-SAT and consecutive-cell special cases,
right-key families and closed-form corruptibility predictors.

K-map layout: the high t bits of an n-bit pattern are the column label
(label bit j is literal l_{n-t+j}), the low n-t bits are the row.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import FrozenSet, Iterator, Optional, Tuple

import numpy as np

from errors import ConstructionError, DomainError
from truthsets import (
    BlockType,
    BooleanFunction,
    LockBlock,
    SopCover,
    check_constraint1,
    right_key_offsets,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RightKeyFamily:
    """All right keys of a block: {(K_f, K_g) : K_f XOR K_g in offsets}."""

    n: int
    offsets: FrozenSet[int]
    # per bit, most significant first: '=' equal, '~' complementary, '*' free
    pattern: str = ""

    @classmethod
    def from_offsets(cls, n: int, offsets) -> "RightKeyFamily":
        offsets = frozenset(int(k) for k in offsets)
        symbols = []
        for bit in reversed(range(n)):
            values = {(k >> bit) & 1 for k in offsets}
            symbols.append("=" if values == {0} else "~" if values == {1} else "*")
        return cls(n, offsets, "".join(symbols) if offsets else "")

    @property
    def is_cube(self) -> bool:
        """True when the pattern alone describes the offsets exactly."""
        return bool(self.offsets) and len(self.offsets) == 2 ** self.pattern.count("*")

    @property
    def key_count(self) -> int:
        return len(self.offsets) << self.n

    def contains(self, k_f: int, k_g: int) -> bool:
        return (int(k_f) ^ int(k_g)) in self.offsets

    def expand(self) -> Iterator[Tuple[int, int]]:
        for offset in sorted(self.offsets):
            for k_f in range(1 << self.n):
                yield k_f, k_f ^ offset

    def describe(self) -> str:
        if not self.offsets:
            return "no right key"
        names = {"=": "equal", "~": "complementary", "*": "free"}
        parts = [f"bit {self.n - 1 - i}: {names[s]}" for i, s in enumerate(self.pattern)]
        suffix = "" if self.is_cube else f" ({len(self.offsets)} offsets, not a cube)"
        return "K_f vs K_g -> " + ", ".join(parts) + suffix

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "offsets": sorted(self.offsets),
            "pattern": self.pattern,
            "is_cube": self.is_cube,
            "right_key_count": self.key_count,
            "description": self.describe(),
        }


def _check_label(value: int, bits: int, what: str) -> None:
    if not 0 <= value < (1 << bits):
        raise DomainError(f"{what} {value} does not fit in {bits} bits")


@dataclass(frozen=True)
class NonCompSpec:
    """Parameters of the non-complementary builder; unset labels take defaults."""

    n: int
    t: int
    f_column: int = 0
    common_row: Optional[int] = None
    q: Optional[int] = None
    included_columns: Optional[FrozenSet[int]] = None
    block_type: BlockType = BlockType.TYPE0

    def __post_init__(self):
        if not 2 <= self.t <= self.n - 1:
            raise DomainError(f"Non-complementary t must be in [2, n-1], got t={self.t} for n={self.n}")
        row_bits = self.n - self.t
        _check_label(self.f_column, self.t, "f_column")
        if self.common_row is None:
            object.__setattr__(self, "common_row", (1 << row_bits) - 1)
        _check_label(self.common_row, row_bits, "common_row")
        if self.q is None:
            object.__setattr__(self, "q", row_bits)
        if not row_bits <= self.q <= self.n - 1:
            raise DomainError(f"q must index a column bit in [{row_bits}, {self.n - 1}], got {self.q}")
        if self.included_columns is None:
            object.__setattr__(self, "included_columns", self.default_columns())
        else:
            columns = frozenset(int(c) for c in self.included_columns)
            for column in columns:
                _check_label(column, self.t, "included column")
            excluded = {self.f_column, self.partner_column}
            if columns & excluded:
                raise DomainError(
                    f"included_columns must exclude the f column {self.f_column} "
                    f"and its bit-q partner {self.partner_column}")
            object.__setattr__(self, "included_columns", columns)
        object.__setattr__(self, "block_type", BlockType(self.block_type))

    @property
    def row_bits(self) -> int:
        return self.n - self.t

    @property
    def partner_column(self) -> int:
        return self.f_column ^ (1 << (self.q - self.row_bits))

    @property
    def common_cell(self) -> int:
        return (self.f_column << self.row_bits) | self.common_row

    def default_columns(self) -> FrozenSet[int]:
        return frozenset(range(1 << self.t)) - {self.f_column, self.partner_column}

    @property
    def is_canonical(self) -> bool:
        return self.included_columns == self.default_columns()


@dataclass(frozen=True)
class CompSpec:
    """Parameters of the complementary builder."""

    n: int
    t: int
    dividing_column: int = 0
    cell_row: int = 0
    single_cell_in: str = "g"
    block_type: BlockType = BlockType.TYPE0

    def __post_init__(self):
        if not 1 <= self.t <= self.n - 1:
            raise DomainError(f"Complementary t must be in [1, n-1], got t={self.t} for n={self.n}")
        _check_label(self.dividing_column, self.t, "dividing_column")
        _check_label(self.cell_row, self.n - self.t, "cell_row")
        if self.single_cell_in not in ("g", "f"):
            raise DomainError(f"single_cell_in must be 'g' or 'f', got {self.single_cell_in!r}")
        object.__setattr__(self, "block_type", BlockType(self.block_type))

    @property
    def row_bits(self) -> int:
        return self.n - self.t

    @property
    def single_cell(self) -> int:
        return (self.dividing_column << self.row_bits) | self.cell_row


@dataclass(frozen=True)
class CorruptibilityPrediction:
    """Closed-form wrong-key histogram of a canonical builder."""

    n: int
    t: int
    kind: str
    histogram: Counter = field(default_factory=Counter)
    right_keys: int = 0

    @property
    def total_keys(self) -> int:
        return sum(self.histogram.values()) + self.right_keys

    def full_histogram(self) -> Counter:
        histogram = Counter(self.histogram)
        histogram[0] += self.right_keys
        return histogram

    @property
    def average(self) -> Fraction:
        """Exact mean corruptibility over wrong keys."""
        wrong = sum(self.histogram.values())
        if not wrong:
            return Fraction(0)
        return Fraction(sum(e * c for e, c in self.histogram.items()), wrong)

    @property
    def closed_form_average(self) -> Fraction:
        """The tabulated approximation of the average."""
        n, t = self.n, self.t
        if self.kind == "comp":
            return Fraction(2) ** (n - t) - Fraction(2) ** (n - 2 * t)
        return Fraction(2) ** (n - t) - Fraction(2) ** (n - 2 * t + 1)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "t": self.t,
            "kind": self.kind,
            "histogram": {str(e): c for e, c in sorted(self.histogram.items(), reverse=True)},
            "right_keys": self.right_keys,
            "average": str(self.average),
            "closed_form_average": str(self.closed_form_average),
        }


def _literal(bit: int, positive: bool) -> Tuple[int, bool]:
    return bit, bool(positive)


def _label_cube(label: int, t: int, row_bits: int) -> tuple:
    """Cube selecting one K-map column: literal polarity follows the label bits."""
    return tuple(_literal(row_bits + j, (label >> j) & 1) for j in reversed(range(t)))


def _row_literals(row: int, row_bits: int) -> tuple:
    return tuple(_literal(i, (row >> i) & 1) for i in reversed(range(row_bits)))


def _column_table(labels, n: int, t: int) -> np.ndarray:
    columns = np.arange(1 << n, dtype=np.int64) >> (n - t)
    return np.isin(columns, np.fromiter(labels, dtype=np.int64))


def _function(table: np.ndarray, cover: SopCover, n: int, what: str) -> BooleanFunction:
    if not np.array_equal(cover.table(n), table):
        raise ConstructionError(f"{what}: closed-form cover {cover.describe()} disagrees with its truth table")
    return BooleanFunction(n, table, cover)


def _finish(n: int, f: BooleanFunction, g: BooleanFunction, block_type: BlockType,
            what: str) -> Tuple[LockBlock, RightKeyFamily]:
    if block_type == BlockType.TYPE1:
        # complementing both functions keeps the wrong-key structure
        f, g = f.negate(), g.negate()
    block = LockBlock(n, f, g, block_type)
    witness = check_constraint1(f, g, block_type)
    if witness is None:
        raise ConstructionError(f"{what}: no element pair satisfies Constraint 1")
    offsets = right_key_offsets(f, g, block_type)
    if not offsets:
        raise ConstructionError(f"{what}: block has no right key")
    family = RightKeyFamily.from_offsets(n, offsets)
    logger.debug("%s built: witness=%s, %d right-key offsets, pattern %s",
                 what, tuple(int(w) for w in witness), len(offsets), family.pattern)
    return block, family


def build_noncomplementary(spec: NonCompSpec) -> Tuple[LockBlock, RightKeyFamily]:
    """
    Non-complementary block: F^T is one K-map column, G^T the included
    columns plus the common cell shared with F^T.

    Raises:
        ConstructionError: if the result fails Constraint 1 or has no right key
    """
    n, t, rows = spec.n, spec.t, spec.row_bits
    what = f"noncomp(n={n}, t={t})"

    f_cover = SopCover((_label_cube(spec.f_column, t, rows),))
    f = _function(_column_table([spec.f_column], n, t), f_cover, n, what)

    g_table = _column_table(spec.included_columns, n, t)
    g_table[spec.common_cell] = True
    q_literal = _literal(spec.q, (spec.f_column >> (spec.q - rows)) & 1)
    g2 = (q_literal,) + _row_literals(spec.common_row, rows)
    if spec.is_canonical:
        g1 = tuple(
            (_literal(rows + j, not (spec.f_column >> j) & 1),)
            for j in reversed(range(t)) if rows + j != spec.q
        )
    else:
        g1 = tuple(_label_cube(c, t, rows) for c in sorted(spec.included_columns))
        g2_cells = SopCover((g2,)).table(n)
        if np.any(g2_cells & ~g_table):
            g2 = _label_cube(spec.common_cell, n, 0)
    g = _function(g_table, SopCover(g1 + (g2,)), n, what)

    block, family = _finish(n, f, g, spec.block_type, what)
    if spec.is_canonical:
        expected = {(1 << spec.q) | r for r in range(1 << rows)}
        if family.offsets != expected:
            raise ConstructionError(f"{what}: right-key offsets differ from the column-partner family")
    return block, family


def build_complementary(spec: CompSpec) -> Tuple[LockBlock, RightKeyFamily]:
    """
    Complementary block, g = NOT f. One function covers every column except
    the dividing column plus the single cell; the other covers the rest of
    the dividing column.
    """
    n, t, rows = spec.n, spec.t, spec.row_bits
    what = f"comp(n={n}, t={t})"

    outer_table = ~_column_table([spec.dividing_column], n, t)
    outer_table[spec.single_cell] = True
    g1 = tuple(
        (_literal(rows + j, not (spec.dividing_column >> j) & 1),) for j in reversed(range(t))
    )
    g2 = _row_literals(spec.cell_row, rows)
    outer = _function(outer_table, SopCover(g1 + (g2,)), n, what)
    inner = outer.negate()

    f, g = (inner, outer) if spec.single_cell_in == "g" else (outer, inner)
    return _finish(n, f, g, spec.block_type, what)


def build_antisat(n: int, block_type=BlockType.TYPE0) -> Tuple[LockBlock, RightKeyFamily]:
    """Anti-SAT: f is an n-input AND, g its complement."""
    if not 2 <= n <= 24:
        raise DomainError(f"Anti-SAT width must be in [2, 24], got {n}")
    cover = SopCover((tuple(_literal(i, True) for i in reversed(range(n))),))
    table = np.zeros(1 << n, dtype=bool)
    table[-1] = True
    f = _function(table, cover, n, f"antisat(n={n})")
    return _finish(n, f, f.negate(), BlockType(block_type), f"antisat(n={n})")


def _prefix_cubes(p: int, n: int) -> tuple:
    """Cubes covering [0, p): one per set bit of p."""
    cubes = []
    for i in reversed(range(n)):
        if (p >> i) & 1:
            high = tuple(_literal(j, (p >> j) & 1) for j in reversed(range(i + 1, n)))
            cubes.append(high + (_literal(i, False),))
    return tuple(cubes)


def build_consecutive_complementary(n: int, p: int, block_type=BlockType.TYPE0,
                                    validate: bool = True) -> Tuple[LockBlock, RightKeyFamily]:
    """
    Complementary block whose f-side set is the consecutive cells 0..p-1.

    With validate=False the block is returned even when it fails
    Constraint 1 (still requiring a right key).
    """
    if not 1 <= p <= (1 << n) - 1:
        raise DomainError(f"p must be in [1, 2^n - 1], got p={p} for n={n}")
    what = f"consecutive(n={n}, p={p})"
    table = np.arange(1 << n) < p
    f = _function(table, SopCover(_prefix_cubes(p, n)), n, what)
    g = f.negate()
    block_type = BlockType(block_type)
    if validate:
        return _finish(n, f, g, block_type, what)
    if block_type == BlockType.TYPE1:
        f, g = f.negate(), g.negate()
    block = LockBlock(n, f, g, block_type)
    offsets = right_key_offsets(f, g, block_type)
    if not offsets:
        raise ConstructionError(f"{what}: block has no right key")
    return block, RightKeyFamily.from_offsets(n, offsets)


def build_custom(n: int, f_true_set, g_true_set, block_type=BlockType.TYPE0) -> Tuple[LockBlock, RightKeyFamily]:
    """Block from explicit true sets, validated like the K-map builders."""
    f = BooleanFunction.from_true_set(f_true_set, n)
    g = BooleanFunction.from_true_set(g_true_set, n)
    block_type = BlockType(block_type)
    block = LockBlock(n, f, g, block_type)
    what = f"custom(n={n})"
    if check_constraint1(f, g, block_type) is None:
        raise ConstructionError(f"{what}: no element pair satisfies Constraint 1")
    offsets = right_key_offsets(f, g, block_type)
    if not offsets:
        raise ConstructionError(f"{what}: block has no right key")
    return block, RightKeyFamily.from_offsets(n, offsets)


def block_eval(block: LockBlock, x, k_f, k_g):
    """Block output bit; arguments may be numpy arrays."""
    return block.output(x, k_f, k_g)


def predict_corruptibility(n: int, t: int, kind: str) -> CorruptibilityPrediction:
    """Closed-form histogram {e: key count} for the canonical builders."""
    if kind == "comp":
        if not 1 <= t <= n - 1:
            raise DomainError(f"comp prediction needs 1 <= t <= n-1, got t={t}")
        histogram = Counter()
        histogram[2 ** (n - t) - 1] += 2 ** (2 * n) - 2 ** (2 * n - t)
        histogram[1] += 2 ** (2 * n - t) - 2 ** n
        right_keys = 2 ** n
    elif kind == "noncomp":
        if not 2 <= t <= n - 1:
            raise DomainError(f"noncomp prediction needs 2 <= t <= n-1, got t={t}")
        histogram = Counter({2 ** (n - t): 2 ** (2 * n) - 2 ** (2 * n - t + 1)})
        histogram[1] += 2 ** (2 * n - t)
        right_keys = 2 ** (2 * n - t)
    else:
        raise DomainError(f"Unknown prediction kind {kind!r}; expected 'comp' or 'noncomp'")
    histogram = Counter({e: c for e, c in histogram.items() if c})
    return CorruptibilityPrediction(n, t, kind, histogram, right_keys)


def lambda_lower_bound(n: int, p: int, right_keys: Optional[int] = None) -> Fraction:
    """
    Lower bound on SAT-attack iterations: wrong keys divided by the most
    keys one input pattern can rule out. right_keys defaults to 2^n.
    """
    if not 1 <= p <= 2 ** n - 1:
        raise DomainError(f"p must be in [1, 2^n - 1], got p={p} for n={n}")
    right_keys = 2 ** n if right_keys is None else right_keys
    return Fraction(2 ** (2 * n) - right_keys, p * (2 ** n - p))
