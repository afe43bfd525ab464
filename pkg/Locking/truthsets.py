"""
Truth Sets Module
Bit-vector and truth-set algebra for locking blocks: distance sets and
structures, the two block constraints, wrong-key sets and right-key offsets.

Conventions: bit i of an integer is literal l_i (l_{n-1} is the most
significant bit). A block key is the pair (K_f, K_g); the concatenated
2n-bit key is (K_f << n) | K_g.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import IntEnum
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from errors import CapacityError, DomainError
from schemas import BLOCK_SCHEMA, TRUTH_SET_SCHEMA, validate_document

logger = logging.getLogger(__name__)

MAX_WIDTH = 24
# int64 Walsh-Hadamard products stay exact up to this width
WHT_MAX_WIDTH = 20
WRONG_KEY_SWEEP_MAX_WIDTH = 8
CONSTRAINT_CHUNK = 1 << 22


class BitVector(int):
    """
    Fixed-width unsigned integer. Compares and hashes like the plain int,
    so sets of BitVectors compare equal to sets of their decimal values.
    """

    def __new__(cls, value: int, width: int):
        if not 1 <= width <= MAX_WIDTH:
            raise DomainError(f"BitVector width must be in [1, {MAX_WIDTH}], got {width}")
        value = int(value)
        if not 0 <= value < (1 << width):
            raise DomainError(f"Value {value} does not fit in {width} bits")
        obj = super().__new__(cls, value)
        obj.width = width
        return obj

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BitVector":
        """Build from a most-significant-first bit list, e.g. [0, 1, 0, 0] -> 4."""
        value = 0
        for bit in bits:
            value = (value << 1) | (1 if bit else 0)
        return cls(value, len(bits))

    def bit(self, index: int) -> int:
        return (int(self) >> index) & 1

    def bits(self) -> List[int]:
        """Most-significant-first bit list."""
        return [self.bit(i) for i in reversed(range(self.width))]

    def __xor__(self, other):
        if isinstance(other, BitVector):
            if other.width != self.width:
                raise DomainError(f"XOR of widths {self.width} and {other.width}")
            return BitVector(int(self) ^ int(other), self.width)
        if isinstance(other, int):
            return BitVector(int(self) ^ other, self.width)
        return NotImplemented

    __rxor__ = __xor__

    def __repr__(self) -> str:
        return f"BitVector({format(int(self), f'0{self.width}b')})"

    def __str__(self) -> str:
        return format(int(self), f"0{self.width}b")


def _check_width(width: int) -> None:
    if not 1 <= width <= MAX_WIDTH:
        raise CapacityError("Truth-set materialization", width, MAX_WIDTH)


@dataclass(frozen=True)
class TruthSet:
    """A set of n-bit patterns (decimal values)."""

    width: int
    members: FrozenSet[int]

    def __post_init__(self):
        _check_width(self.width)
        limit = 1 << self.width
        bad = [m for m in self.members if not 0 <= m < limit]
        if bad:
            raise DomainError(f"Members {sorted(bad)[:5]} do not fit in {self.width} bits")

    @classmethod
    def from_members(cls, members: Iterable[int], width: int) -> "TruthSet":
        return cls(width, frozenset(int(m) for m in members))

    @classmethod
    def universe(cls, width: int) -> "TruthSet":
        return cls(width, frozenset(range(1 << width)))

    def __contains__(self, value) -> bool:
        return int(value) in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[BitVector]:
        return (BitVector(m, self.width) for m in sorted(self.members))

    def complement(self) -> "TruthSet":
        return TruthSet(self.width, frozenset(range(1 << self.width)) - self.members)

    def shift(self, offset: int) -> "TruthSet":
        """Translate: {s XOR offset}."""
        return TruthSet(self.width, frozenset(m ^ int(offset) for m in self.members))

    def to_array(self) -> np.ndarray:
        return np.array(sorted(self.members), dtype=np.int64)

    def indicator(self) -> np.ndarray:
        table = np.zeros(1 << self.width, dtype=bool)
        if self.members:
            table[self.to_array()] = True
        return table

    def to_dict(self) -> dict:
        return {"n": self.width, "true_set": sorted(self.members)}

    @classmethod
    def from_dict(cls, data: dict) -> "TruthSet":
        validate_document(TRUTH_SET_SCHEMA, data, "truth set")
        return cls.from_members(data["true_set"], data["n"])


@dataclass(frozen=True)
class DistanceMultiset:
    """Pairwise XOR distances of a set, over unordered pairs."""

    width: int
    counts: Counter = field(default_factory=Counter)

    def total(self) -> int:
        return sum(self.counts.values())

    def ordered_listing(self) -> Counter:
        """Multiplicities as they appear when listing ordered pairs."""
        return Counter({d: 2 * c for d, c in self.counts.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistanceMultiset):
            return NotImplemented
        return self.width == other.width and +self.counts == +other.counts

    __hash__ = None


@dataclass(frozen=True)
class SopCover:
    """
    Sum-of-products cover of a Boolean function.

    Each cube is a tuple of (bit, positive) literals; an empty cube is the
    constant 1 and an empty cube list the constant 0. ``inverted`` negates
    the whole sum.
    """

    cubes: Tuple[Tuple[Tuple[int, bool], ...], ...]
    inverted: bool = False

    def negate(self) -> "SopCover":
        return SopCover(self.cubes, not self.inverted)

    def table(self, width: int) -> np.ndarray:
        points = np.arange(1 << width, dtype=np.int64)
        result = np.zeros(1 << width, dtype=bool)
        for cube in self.cubes:
            term = np.ones(1 << width, dtype=bool)
            for bit, positive in cube:
                literal = ((points >> bit) & 1).astype(bool)
                term &= literal if positive else ~literal
            result |= term
        return ~result if self.inverted else result

    def to_dict(self) -> dict:
        return {
            "cubes": [[[bit, positive] for bit, positive in cube] for cube in self.cubes],
            "inverted": self.inverted,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SopCover":
        cubes = tuple(tuple((int(b), bool(p)) for b, p in cube) for cube in data["cubes"])
        return cls(cubes, bool(data["inverted"]))

    @classmethod
    def from_minterms(cls, members: Iterable[int], width: int) -> "SopCover":
        return cls(tuple(
            tuple((bit, bool((m >> bit) & 1)) for bit in reversed(range(width)))
            for m in sorted(members)
        ))

    def describe(self) -> str:
        def literal(bit, positive):
            return f"l{bit}" if positive else f"~l{bit}"

        if not self.cubes:
            body = "0"
        else:
            body = " + ".join(
                "&".join(literal(b, p) for b, p in cube) if cube else "1" for cube in self.cubes
            )
        return f"~({body})" if self.inverted else body


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    """Tabulated n-input Boolean function with an optional SOP cover."""

    width: int
    truth_table: np.ndarray
    cover: Optional[SopCover] = None

    def __post_init__(self):
        _check_width(self.width)
        table = np.array(self.truth_table, dtype=bool)
        if table.shape != (1 << self.width,):
            raise DomainError(f"Truth table needs {1 << self.width} entries, got {table.shape}")
        table.setflags(write=False)
        object.__setattr__(self, "truth_table", table)

    @classmethod
    def from_true_set(cls, members: Union[TruthSet, Iterable[int]], width: int,
                      cover: Optional[SopCover] = None) -> "BooleanFunction":
        if not isinstance(members, TruthSet):
            members = TruthSet.from_members(members, width)
        return cls(width, members.indicator(), cover)

    @classmethod
    def from_cover(cls, cover: SopCover, width: int) -> "BooleanFunction":
        return cls(width, cover.table(width), cover)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.width == other.width and np.array_equal(self.truth_table, other.truth_table)

    __hash__ = None

    def __invert__(self) -> "BooleanFunction":
        return self.negate()

    def negate(self) -> "BooleanFunction":
        cover = self.cover.negate() if self.cover is not None else None
        return BooleanFunction(self.width, ~self.truth_table, cover)

    def evaluate(self, points):
        """Evaluate at an int or a numpy array of ints."""
        result = self.truth_table[points]
        return int(result) if np.ndim(result) == 0 else result

    def true_set(self) -> TruthSet:
        return TruthSet(self.width, frozenset(np.flatnonzero(self.truth_table).tolist()))

    def false_set(self) -> TruthSet:
        return TruthSet(self.width, frozenset(np.flatnonzero(~self.truth_table).tolist()))

    def sop_cover(self) -> SopCover:
        """The attached cover, or the minterm cover of the truth table."""
        if self.cover is not None:
            return self.cover
        return SopCover.from_minterms(np.flatnonzero(self.truth_table).tolist(), self.width)

    def to_dict(self) -> dict:
        data = self.true_set().to_dict()
        if self.cover is not None:
            data["cover"] = self.cover.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "BooleanFunction":
        truth_set = TruthSet.from_dict(data)
        cover = SopCover.from_dict(data["cover"]) if "cover" in data else None
        function = cls.from_true_set(truth_set, truth_set.width)
        if cover is not None:
            if not np.array_equal(cover.table(truth_set.width), function.truth_table):
                raise DomainError("Stored cover disagrees with the stored true set")
            function = cls(truth_set.width, function.truth_table, cover)
        return function


class BlockType(IntEnum):
    TYPE0 = 0
    TYPE1 = 1

    @property
    def correct_output(self) -> int:
        return int(self)


@dataclass(frozen=True, eq=False)
class LockBlock:
    """Two-function locking block: y = f(X^K_f) AND g(X^K_g) (OR for type-1)."""

    n: int
    f: BooleanFunction
    g: BooleanFunction
    block_type: BlockType = BlockType.TYPE0

    def __post_init__(self):
        if self.f.width != self.n or self.g.width != self.n:
            raise DomainError(
                f"Block width {self.n} does not match f ({self.f.width}) / g ({self.g.width})")
        object.__setattr__(self, "block_type", BlockType(self.block_type))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LockBlock):
            return NotImplemented
        return (self.n, self.block_type) == (other.n, other.block_type) and \
            self.f == other.f and self.g == other.g

    __hash__ = None

    @property
    def mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def correct_output(self) -> int:
        return self.block_type.correct_output

    def relevant_tables(self) -> Tuple[np.ndarray, np.ndarray]:
        """Indicator tables of the sets that drive a wrong output."""
        if self.block_type == BlockType.TYPE0:
            return self.f.truth_table, self.g.truth_table
        return ~self.f.truth_table, ~self.g.truth_table

    def relevant_sets(self) -> Tuple[TruthSet, TruthSet]:
        """True sets for type-0 blocks, false sets for type-1."""
        if self.block_type == BlockType.TYPE0:
            return self.f.true_set(), self.g.true_set()
        return self.f.false_set(), self.g.false_set()

    def output(self, x, k_f, k_g):
        """Block output; every argument may be an int or a numpy array."""
        f_out = self.f.truth_table[np.bitwise_xor(x, k_f)]
        g_out = self.g.truth_table[np.bitwise_xor(x, k_g)]
        result = (f_out & g_out) if self.block_type == BlockType.TYPE0 else (f_out | g_out)
        return int(result) if np.ndim(result) == 0 else result

    def concat_key(self, k_f: int, k_g: int) -> int:
        return (int(k_f) << self.n) | int(k_g)

    def split_key(self, key: int) -> Tuple[int, int]:
        return int(key) >> self.n, int(key) & self.mask

    def to_dict(self) -> dict:
        return {"n": self.n, "type": int(self.block_type), "f": self.f.to_dict(), "g": self.g.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "LockBlock":
        validate_document(BLOCK_SCHEMA, data, "block")
        f = BooleanFunction.from_dict(data["f"])
        g = BooleanFunction.from_dict(data["g"])
        return cls(data["n"], f, g, BlockType(data["type"]))


@dataclass(frozen=True)
class KeySet:
    """Set of concatenated 2n-bit keys (K_f << n) | K_g."""

    n: int
    members: FrozenSet[int]

    def __post_init__(self):
        limit = 1 << (2 * self.n)
        if any(not 0 <= m < limit for m in self.members):
            raise DomainError(f"Key set members must be below 2^{2 * self.n}")

    def __contains__(self, key) -> bool:
        return int(key) in self.members

    def __len__(self) -> int:
        return len(self.members)

    def pairs(self) -> List[Tuple[int, int]]:
        mask = (1 << self.n) - 1
        return [(k >> self.n, k & mask) for k in sorted(self.members)]


def _as_int(value) -> int:
    return int(value)


def _check_same_width(f: BooleanFunction, g: BooleanFunction) -> None:
    if f.width != g.width:
        raise DomainError(f"Functions of different widths: {f.width} and {g.width}")


def _relevant_tables(f: BooleanFunction, g: BooleanFunction, block_type) -> Tuple[np.ndarray, np.ndarray]:
    if BlockType(block_type) == BlockType.TYPE0:
        return f.truth_table, g.truth_table
    return ~f.truth_table, ~g.truth_table


def distance_set(members: TruthSet, s) -> FrozenSet[BitVector]:
    """{s XOR s_i : s_i in S, s_i != s}; raises DomainError when s is not in S."""
    s = _as_int(s)
    if s not in members.members:
        raise DomainError(f"{s} is not a member of the set")
    return frozenset(BitVector(s ^ m, members.width) for m in members.members if m != s)


def distance_structure(members: TruthSet) -> DistanceMultiset:
    """Multiset of pairwise distances over unordered pairs i < j."""
    values = members.to_array()
    if len(values) < 2:
        return DistanceMultiset(members.width, Counter())
    rows, cols = np.triu_indices(len(values), k=1)
    distances, counts = np.unique(values[rows] ^ values[cols], return_counts=True)
    return DistanceMultiset(members.width, Counter(dict(zip(distances.tolist(), counts.tolist()))))


def check_constraint1(f: BooleanFunction, g: BooleanFunction,
                      block_type=BlockType.TYPE0) -> Optional[Tuple[BitVector, BitVector]]:
    """
    Search for elements F_w, G_w whose distance sets are disjoint.

    Returns the lexicographically smallest witness pair, or None.

    Raises:
        DomainError: if either relevant set is empty
    """
    _check_same_width(f, g)
    f_table, g_table = _relevant_tables(f, g, block_type)
    f_members = np.flatnonzero(f_table)
    g_members = np.flatnonzero(g_table)
    if len(f_members) == 0 or len(g_members) == 0:
        raise DomainError("Constraint 1 needs non-empty relevant sets for f and g")

    width = f.width
    for f_w in f_members:
        f_distances = f_members[f_members != f_w] ^ f_w
        if len(f_distances) == 0:
            return BitVector(f_w, width), BitVector(g_members[0], width)
        # G_w fails when some G_w ^ d lands back in G
        chunk = max(1, CONSTRAINT_CHUNK // len(f_distances))
        for start in range(0, len(g_members), chunk):
            candidates = g_members[start:start + chunk]
            clashes = g_table[candidates[:, None] ^ f_distances[None, :]].any(axis=1)
            good = np.flatnonzero(~clashes)
            if len(good):
                return BitVector(f_w, width), BitVector(candidates[good[0]], width)
    return None


def _walsh_hadamard(vector: np.ndarray) -> np.ndarray:
    values = vector.astype(np.int64)
    size = len(values)
    half = 1
    while half < size:
        values = values.reshape(-1, 2, half)
        low, high = values[:, 0, :], values[:, 1, :]
        values = np.stack((low + high, low - high), axis=1).reshape(size)
        half *= 2
    return values


def xor_correlation(a_table: np.ndarray, b_table: np.ndarray) -> np.ndarray:
    """c[K] = |{x : a(x) and b(x XOR K)}| for every K."""
    width = int(len(a_table)).bit_length() - 1
    if width <= WHT_MAX_WIDTH:
        spectrum = _walsh_hadamard(a_table) * _walsh_hadamard(b_table)
        return _walsh_hadamard(spectrum) >> width
    a_members = np.flatnonzero(a_table)
    b_members = np.flatnonzero(b_table)
    if len(b_members) < len(a_members):
        a_members, b_members = b_members, a_members
        a_table, b_table = b_table, a_table
    # c is symmetric in K because XOR is its own inverse
    points = np.arange(len(a_table), dtype=np.int64)
    result = np.zeros(len(a_table), dtype=np.int64)
    for member in a_members:
        result += b_table[points ^ member]
    return result


def offset_corruptibility_table(f: BooleanFunction, g: BooleanFunction,
                                block_type=BlockType.TYPE0) -> np.ndarray:
    """
    Corruptibility of every key offset K = K_f XOR K_g.

    A key (K_f, K_g) corrupts exactly c[K_f ^ K_g] input patterns.
    """
    _check_same_width(f, g)
    f_table, g_table = _relevant_tables(f, g, block_type)
    return xor_correlation(f_table, g_table)


def right_key_offsets(f: BooleanFunction, g: BooleanFunction,
                      block_type=BlockType.TYPE0) -> FrozenSet[BitVector]:
    """All offsets K with (F XOR K) disjoint from G on the relevant sets."""
    table = offset_corruptibility_table(f, g, block_type)
    return frozenset(BitVector(k, f.width) for k in np.flatnonzero(table == 0).tolist())


def right_key_offsets_bruteforce(f: BooleanFunction, g: BooleanFunction,
                                 block_type=BlockType.TYPE0) -> FrozenSet[BitVector]:
    """Reference search testing set disjointness offset by offset."""
    _check_same_width(f, g)
    if f.width > 10:
        raise CapacityError("Brute-force offset search", f.width, 10)
    f_table, g_table = _relevant_tables(f, g, block_type)
    f_members = np.flatnonzero(f_table)
    return frozenset(
        BitVector(k, f.width) for k in range(1 << f.width)
        if not g_table[f_members ^ k].any()
    )


def check_constraint2(f: BooleanFunction, g: BooleanFunction, block_type=BlockType.TYPE0) -> bool:
    """True iff some translate of the f-side set fits inside the g-side complement."""
    return len(right_key_offsets(f, g, block_type)) > 0


def is_right_key(block: LockBlock, k_f, k_g) -> bool:
    """Exhaustive sweep over all X."""
    k_f, k_g = _as_int(k_f), _as_int(k_g)
    if not (0 <= k_f <= block.mask and 0 <= k_g <= block.mask):
        raise DomainError(f"Key halves must fit in {block.n} bits")
    points = np.arange(1 << block.n, dtype=np.int64)
    return bool(np.all(block.output(points, k_f, k_g) == block.correct_output))


def wrong_key_set(block: LockBlock, x) -> KeySet:
    """{(X^a) || (X^b) : a in F, b in G} over the relevant sets."""
    x = _as_int(x)
    if not 0 <= x <= block.mask:
        raise DomainError(f"Input {x} does not fit in {block.n} bits")
    f_table, g_table = block.relevant_tables()
    f_side = np.flatnonzero(f_table) ^ x
    g_side = np.flatnonzero(g_table) ^ x
    keys = (f_side[:, None] << block.n) | g_side[None, :]
    return KeySet(block.n, frozenset(keys.ravel().tolist()))


def wrong_key_matrix(block: LockBlock) -> np.ndarray:
    """
    Input-by-key wrong-output array: entry [X, (K_f << n) | K_g] is True when
    that key corrupts input X.
    """
    if block.n > WRONG_KEY_SWEEP_MAX_WIDTH:
        raise CapacityError("Wrong-key sweep", block.n, WRONG_KEY_SWEEP_MAX_WIDTH)
    f_table, g_table = block.relevant_tables()
    points = np.arange(1 << block.n, dtype=np.int64)
    shifted = points[:, None] ^ points[None, :]
    f_part, g_part = f_table[shifted], g_table[shifted]
    matrix = f_part[:, :, None] & g_part[:, None, :]
    return matrix.reshape(1 << block.n, 1 << (2 * block.n))


def has_distinct_elements(block: LockBlock) -> bool:
    """Every WK_X holds a key that belongs to no other WK_X'."""
    matrix = wrong_key_matrix(block)
    unique_keys = matrix.sum(axis=0) == 1
    return bool(np.all((matrix & unique_keys[None, :]).any(axis=1)))


def wrong_key_sets_disjoint(block: LockBlock) -> bool:
    """No key is wrong for two different inputs."""
    return bool(np.all(wrong_key_matrix(block).sum(axis=0) <= 1))
