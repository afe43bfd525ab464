"""
Test truth-set algebra: distance sets, constraints, right keys and wrong-key sets.
"""

import pytest

from blockgen import build_antisat
from errors import CapacityError, DomainError
from truthsets import (
    BitVector,
    BlockType,
    BooleanFunction,
    LockBlock,
    TruthSet,
    check_constraint1,
    check_constraint2,
    distance_set,
    distance_structure,
    has_distinct_elements,
    is_right_key,
    offset_corruptibility_table,
    right_key_offsets,
    right_key_offsets_bruteforce,
    wrong_key_matrix,
    wrong_key_set,
    wrong_key_sets_disjoint,
)


def ts(members, width=4):
    return TruthSet.from_members(members, width)


def brute_force_wrong_keys(block, x):
    """Every concatenated key whose block output differs from the correct constant at x."""
    return {
        key for key in range(1 << (2 * block.n))
        if block.output(x, key >> block.n, key & block.mask) != block.correct_output
    }


class TestBitVector:
    """Test fixed-width bit vectors."""

    def test_from_bits_most_significant_first(self):
        """Test that [0, 1, 0, 0] reads as decimal 4."""
        value = BitVector.from_bits([0, 1, 0, 0])
        assert value == 4
        assert value.width == 4
        assert value.bits() == [0, 1, 0, 0]
        assert str(value) == "0100"

    def test_value_must_fit(self):
        """Test that values wider than the vector are rejected."""
        with pytest.raises(DomainError):
            BitVector(16, 4)

    def test_xor_requires_equal_width(self):
        """Test that XOR of different widths raises a domain error."""
        assert BitVector(5, 4) ^ BitVector(3, 4) == 6
        with pytest.raises(DomainError):
            BitVector(5, 4) ^ BitVector(3, 5)


class TestTruthSet:
    """Test truth-set containers and serialization."""

    def test_complement_covers_universe(self):
        """Test that a set and its complement partition X_n."""
        members = ts({0, 1, 2, 3})
        complement = members.complement()
        assert members.members | complement.members == set(range(16))
        assert not members.members & complement.members

    def test_members_must_fit(self):
        """Test that out-of-range members are rejected."""
        with pytest.raises(DomainError):
            ts({16})

    def test_json_document(self):
        """Test the {"n", "true_set"} document form."""
        members = ts({3, 1, 2})
        assert members.to_dict() == {"n": 4, "true_set": [1, 2, 3]}
        assert TruthSet.from_dict({"n": 4, "true_set": [1, 2, 3]}) == members

    def test_boolean_function_partition(self):
        """Test that true and false sets of a function are disjoint and cover X_n."""
        fn = BooleanFunction.from_true_set({6, 8, 9}, 4)
        assert fn.true_set().members | fn.false_set().members == set(range(16))
        assert (~fn).true_set() == fn.false_set()


class TestDistanceSets:
    """Test distance sets and distance structures."""

    def test_distance_set_basic(self):
        """Test distances from element 0 of {0,1,2,3}."""
        assert distance_set(ts({0, 1, 2, 3}), 0) == {1, 2, 3}

    def test_distance_set_singleton(self):
        """Test that a singleton has no distances."""
        assert distance_set(ts({5}), 5) == frozenset()

    def test_distance_set_example2(self):
        """Test distances from 6 within {6, 8..15}."""
        members = ts({6} | set(range(8, 16)))
        assert distance_set(members, 6) == set(range(8, 16))

    def test_distance_set_rejects_non_member(self):
        """Test that an element outside the set raises a domain error."""
        with pytest.raises(DomainError):
            distance_set(ts({0, 1}), 7)

    def test_distance_set_properties(self, rng):
        """Test that zero never appears and the size is |S| - 1."""
        for _ in range(20):
            members = ts(set(rng.choice(64, size=9, replace=False).tolist()), 6)
            for s in members:
                distances = distance_set(members, s)
                assert 0 not in distances
                assert len(distances) == len(members) - 1

    def test_distance_structure_of_first_column(self):
        """Test D_S of {0,1,2,3} over unordered and ordered pairs."""
        structure = distance_structure(ts({0, 1, 2, 3}))
        assert dict(structure.counts) == {1: 2, 2: 2, 3: 2}
        assert dict(structure.ordered_listing()) == {1: 4, 2: 4, 3: 4}
        assert structure.total() == 6

    def test_distance_structure_singleton(self):
        """Test that a singleton has an empty structure."""
        assert distance_structure(ts({9})).total() == 0

    def test_distance_structure_same_shape(self):
        """Test that {12..15} has the same structure as {0..3}."""
        assert distance_structure(ts({12, 13, 14, 15})) == distance_structure(ts({0, 1, 2, 3}))

    def test_distance_structure_translation_invariant(self, rng):
        """Test D_{S xor K} = D_S for random sets and offsets."""
        for _ in range(20):
            members = ts(set(rng.choice(32, size=7, replace=False).tolist()), 5)
            offset = int(rng.integers(0, 32))
            assert distance_structure(members.shift(offset)) == distance_structure(members)


class TestConstraints:
    """Test Constraint 1, Constraint 2 and right-key offsets on the worked examples."""

    def test_constraint1_example1(self, example_blocks):
        """Test the (0, 0) witness of example 1."""
        block = example_blocks["example1"]
        assert check_constraint1(block.f, block.g) == (0, 0)

    def test_constraint1_example3(self, example_blocks):
        """Test the (0, 0) witness of example 3."""
        block = example_blocks["example3"]
        assert check_constraint1(block.f, block.g) == (0, 0)

    def test_constraint1_example2(self, example_blocks):
        """Test that example 2 has a witness and that (6, 5) is one."""
        block = example_blocks["example2"]
        witness = check_constraint1(block.f, block.g)
        assert witness == (6, 0)
        f_set, g_set = block.f.true_set(), block.g.true_set()
        assert not distance_set(f_set, 6) & distance_set(g_set, 5)

    def test_constraint1_empty_set(self):
        """Test that an empty relevant set raises a domain error."""
        empty = BooleanFunction.from_true_set(set(), 4)
        other = BooleanFunction.from_true_set({1}, 4)
        with pytest.raises(DomainError):
            check_constraint1(empty, other)

    def test_right_key_offsets_example1(self, example_blocks):
        """Test the eight right-key offsets of example 1."""
        block = example_blocks["example1"]
        offsets = right_key_offsets(block.f, block.g)
        assert offsets == {4, 5, 6, 7, 12, 13, 14, 15}
        assert len(offsets) << block.n == 128

    def test_right_key_offsets_example3(self, example_blocks):
        """Test that example 3 has no right key."""
        block = example_blocks["example3"]
        assert right_key_offsets(block.f, block.g) == frozenset()
        assert not check_constraint2(block.f, block.g)

    def test_constraint2_example1(self, example_blocks):
        """Test Constraint 2 on example 1 via the {12..15} translate."""
        block = example_blocks["example1"]
        assert check_constraint2(block.f, block.g)
        assert ts({0, 1, 2, 3}).shift(12).members <= block.g.false_set().members

    def test_complementary_offsets_are_stabilizer(self, rng):
        """Test that offsets of (f, not f) are the stabilizer of F^T and contain 0."""
        for _ in range(10):
            members = set(rng.choice(16, size=int(rng.integers(1, 15)), replace=False).tolist())
            f = BooleanFunction.from_true_set(members, 4)
            offsets = right_key_offsets(f, ~f)
            assert 0 in offsets
            assert offsets == {k for k in range(16) if {m ^ k for m in members} == members}
            assert check_constraint2(f, ~f)

    def test_offsets_match_bruteforce(self, example_blocks, canonical_blocks):
        """Test the transform-based offset search against direct disjointness checks."""
        blocks = list(example_blocks.values()) + [b for b, _ in canonical_blocks.values()]
        for block in blocks:
            assert right_key_offsets(block.f, block.g, block.block_type) == \
                right_key_offsets_bruteforce(block.f, block.g, block.block_type)

    def test_offset_table_counts_corrupted_inputs(self, example_blocks):
        """Test that c[K] equals the number of corrupted inputs of every key with that offset."""
        block = example_blocks["example1"]
        table = offset_corruptibility_table(block.f, block.g)
        for k_f in (0, 5, 11):
            for k_g in range(16):
                wrong = sum(block.output(x, k_f, k_g) for x in range(16))
                assert table[k_f ^ k_g] == wrong


class TestRightKeys:
    """Test exhaustive right-key checks."""

    def test_example1_derived_key(self, example_blocks):
        """Test that K_f=0000, K_g=0100 unlocks example 1."""
        assert is_right_key(example_blocks["example1"], 0b0000, 0b0100)

    def test_example1_rejects_key_0001(self, example_blocks):
        """Test that K_g=0001 fails on example 1 (X=1 outputs 1)."""
        block = example_blocks["example1"]
        assert not is_right_key(block, 0b0000, 0b0001)
        assert block.output(1, 0, 1) == 1

    def test_complementary_equal_keys(self, example_blocks):
        """Test that every K_f = K_g is right for a complementary block."""
        block = example_blocks["example2"]
        for k in range(16):
            assert is_right_key(block, k, k)

    def test_offsets_agree_with_exhaustive_check(self, example_blocks, canonical_blocks):
        """Test that a key is right exactly when its offset is a right-key offset."""
        blocks = [example_blocks["example1"], example_blocks["example2"]]
        blocks += [canonical_blocks[("noncomp", 5, 2)][0], canonical_blocks[("comp", 5, 3)][0]]
        for block in blocks:
            offsets = right_key_offsets(block.f, block.g, block.block_type)
            for k_f in range(1 << block.n):
                for k_g in range(1 << block.n):
                    assert is_right_key(block, k_f, k_g) == ((k_f ^ k_g) in offsets)

    def test_key_width_checked(self, example_blocks):
        """Test that oversized key halves are rejected."""
        with pytest.raises(DomainError):
            is_right_key(example_blocks["example1"], 16, 0)


class TestWrongKeySets:
    """Test wrong-key sets and the distinct-element property."""

    def test_antisat_wrong_key_set(self):
        """Test |WK_X| = 15 for Anti-SAT n=4, with WK_0 = {15 || b}."""
        block, _ = build_antisat(4)
        wk = wrong_key_set(block, 0)
        assert wk.members == {(15 << 4) | b for b in range(15)}
        for x in range(16):
            assert len(wrong_key_set(block, x)) == 15

    def test_example1_wrong_key_set(self, example_blocks):
        """Test the 20 wrong keys of example 1 at X=0."""
        block = example_blocks["example1"]
        wk = wrong_key_set(block, 0)
        expected = {(a << 4) | b for a in (0, 1, 2, 3) for b in (0, 8, 9, 10, 11)}
        assert wk.members == expected
        assert len(wk) == 20

    def test_matches_brute_force(self, example_blocks, canonical_blocks):
        """Test the structured wrong-key formula against brute-force enumeration."""
        blocks = [example_blocks["example1"], canonical_blocks[("comp", 4, 2)][0],
                  canonical_blocks[("noncomp", 4, 2)][0]]
        type1, _ = build_antisat(4, BlockType.TYPE1)
        blocks.append(type1)
        for block in blocks:
            for x in range(16):
                assert wrong_key_set(block, x).members == brute_force_wrong_keys(block, x)

    def test_right_key_never_wrong(self, example_blocks):
        """Test that the example 1 right key is in no WK_X."""
        block = example_blocks["example1"]
        key = block.concat_key(0, 4)
        assert all(key not in wrong_key_set(block, x) for x in range(16))

    def test_wrong_key_set_rejects_wide_input(self, example_blocks):
        """Test that X must fit the block width."""
        with pytest.raises(DomainError):
            wrong_key_set(example_blocks["example1"], 16)

    def test_antisat_distinct_and_disjoint(self):
        """Test that Anti-SAT n=4 wrong-key sets are pairwise disjoint."""
        block, _ = build_antisat(4)
        assert has_distinct_elements(block)
        assert wrong_key_sets_disjoint(block)

    def test_example1_distinct(self, example_blocks):
        """Test that example 1 has distinct elements."""
        assert has_distinct_elements(example_blocks["example1"])

    def test_equal_functions_not_distinct(self):
        """Test that f = g with F^T = {0, 1} gives WK_0 = WK_1."""
        f = BooleanFunction.from_true_set({0, 1}, 4)
        block = LockBlock(4, f, f)
        assert wrong_key_set(block, 0) == wrong_key_set(block, 1)
        assert not has_distinct_elements(block)

    def test_constraint1_matches_distinct_elements(self, example_blocks, canonical_blocks):
        """Test that a witness exists exactly when WK sets have distinct elements, for blocks with a right key."""
        blocks = [example_blocks["example1"], example_blocks["example2"]]
        blocks += [b for b, _ in canonical_blocks.values()]
        assert {b.n for b in blocks} == {4, 5, 6}
        for block in blocks:
            witness = check_constraint1(block.f, block.g, block.block_type)
            assert (witness is not None) == has_distinct_elements(block)

    def test_wrong_key_matrix_capped(self):
        """Test that the exhaustive wrong-key sweep refuses wide blocks."""
        block, _ = build_antisat(9)
        with pytest.raises(CapacityError):
            wrong_key_matrix(block)
