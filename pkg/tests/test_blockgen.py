"""
Test K-map block builders, right-key families and closed-form predictors.
"""

from fractions import Fraction

import pytest

from analysis import corruptibility_census
from blockgen import (
    CompSpec,
    NonCompSpec,
    RightKeyFamily,
    block_eval,
    build_antisat,
    build_complementary,
    build_consecutive_complementary,
    build_custom,
    build_noncomplementary,
    lambda_lower_bound,
    predict_corruptibility,
)
from errors import ConstructionError, DomainError
from truthsets import BlockType, check_constraint1, is_right_key, right_key_offsets


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


class TestNonComplementary:
    """Test the non-complementary builder."""

    def test_canonical_n4_t2(self):
        """Test F^T, G^T and the right-key pattern of the canonical n=4, t=2 block."""
        block, family = build_noncomplementary(NonCompSpec(4, 2, f_column=0b00, common_row=0b11, q=2))
        assert block.f.true_set().members == {0, 1, 2, 3}
        assert block.g.true_set().members == {3} | set(range(8, 16))
        assert family.offsets == {4, 5, 6, 7}
        assert family.pattern == "=~**"
        assert family.is_cube
        assert family.contains(0b0100, 0b0000)
        assert_family_valid(block, family)

    def test_canonical_key_count(self):
        """Test that the canonical n=4, t=2 family holds 2^(2n-t) = 64 keys."""
        block, family = build_noncomplementary(NonCompSpec(4, 2))
        assert family.key_count == 64
        assert len(list(family.expand())) == 64

    def test_closed_form_covers(self):
        """Test f = ~l3 & ~l2 and g = l3 + ~l2 & l1 & l0 on the canonical block."""
        block, _ = build_noncomplementary(NonCompSpec(4, 2))
        assert block.f.cover.describe() == "~l3&~l2"
        assert block.g.cover.describe() == "l3 + ~l2&l1&l0"

    def test_example1_columns(self, example_blocks):
        """Test that included column 10 with common cell 0 reproduces example 1."""
        spec = NonCompSpec(4, 2, common_row=0, included_columns=frozenset({0b10}))
        block, family = build_noncomplementary(spec)
        assert block.g.true_set().members == {0, 8, 9, 10, 11}
        assert block == example_blocks["example1"]
        assert family.offsets == {4, 5, 6, 7, 12, 13, 14, 15}
        assert not spec.is_canonical

    def test_g_size_formula(self):
        """Test |G^T| = 2^n - 2^(n-t+1) + 1 with default columns."""
        for n in (4, 5, 6):
            for t in range(2, n):
                block, _ = build_noncomplementary(NonCompSpec(n, t))
                assert len(block.f.true_set()) * 2 ** t == 2 ** n
                assert len(block.g.true_set()) == 2 ** n - 2 ** (n - t + 1) + 1

    def test_labels_complement_literals(self):
        """Test that a '1' in the f column label moves F^T to that column."""
        block, family = build_noncomplementary(NonCompSpec(4, 2, f_column=0b11))
        assert block.f.true_set().members == {12, 13, 14, 15}
        assert_family_valid(block, family)

    def test_partner_column_rejected(self):
        """Test that included columns may not contain the bit-q partner column."""
        with pytest.raises(DomainError):
            NonCompSpec(4, 2, included_columns=frozenset({0b01}))

    def test_t_range(self):
        """Test that t outside [2, n-1] is rejected."""
        with pytest.raises(DomainError):
            NonCompSpec(4, 1)
        with pytest.raises(DomainError):
            NonCompSpec(4, 4)

    def test_q_range(self):
        """Test that q must index a column-label bit."""
        with pytest.raises(DomainError):
            NonCompSpec(4, 2, q=1)


class TestComplementary:
    """Test the complementary builder."""

    def test_n4_t1(self):
        """Test F^T = {1..7} and G^T = {0, 8..15} for the dividing column l3=0."""
        block, family = build_complementary(CompSpec(4, 1))
        assert block.f.true_set().members == set(range(1, 8))
        assert block.g.true_set().members == {0} | set(range(8, 16))
        assert block.g == ~block.f
        assert 0 in family.offsets
        assert_family_valid(block, family)

    def test_example2_target(self, example_blocks):
        """Test that the g cell at row 110 with the single cell in f yields example 2."""
        block, family = build_complementary(CompSpec(4, 1, cell_row=0b110, single_cell_in="f"))
        assert block.f.true_set().members == {6} | set(range(8, 16))
        assert block == example_blocks["example2"]
        assert check_constraint1(block.f, block.g) is not None
        assert 0 in family.offsets

    def test_n4_t2_only_zero_offset(self):
        """Test |F^T| = 3 and offsets = {0} for n=4, t=2."""
        block, family = build_complementary(CompSpec(4, 2))
        assert len(block.f.true_set()) == 3
        assert family.offsets == {0}
        assert family.pattern == "===="

    def test_sizes_partition(self):
        """Test |F^T| + |G^T| = 2^n for every valid t."""
        for n in (4, 5, 6):
            for t in range(1, n):
                block, _ = build_complementary(CompSpec(n, t))
                assert len(block.f.true_set()) == 2 ** (n - t) - 1
                assert len(block.f.true_set()) + len(block.g.true_set()) == 2 ** n

    def test_last_t_low_corruptibility(self):
        """Test that t = n-1 leaves only corruptibility 0 or 1."""
        for n in (4, 5, 6):
            block, _ = build_complementary(CompSpec(n, n - 1))
            report = corruptibility_census(block)
            assert set(report.histogram) <= {0, 1}

    def test_single_cell_side_validated(self):
        """Test that single_cell_in must name f or g."""
        with pytest.raises(DomainError):
            CompSpec(4, 1, single_cell_in="h")


class TestAntiSat:
    """Test the Anti-SAT special case."""

    def test_truth_sets(self):
        """Test F^T = {15} and G^T = {0..14} for n=4."""
        block, family = build_antisat(4)
        assert block.f.true_set().members == {15}
        assert block.g.true_set().members == set(range(15))
        assert family.offsets == {0}

    def test_only_equal_keys_are_right(self):
        """Test that exactly the 16 keys with K_f = K_g are right."""
        block, family = build_antisat(4)
        right = {(k_f, k_g) for k_f in range(16) for k_g in range(16)
                 if all(block_eval(block, x, k_f, k_g) == 0 for x in range(16))}
        assert right == {(k, k) for k in range(16)}
        assert set(family.expand()) == right

    def test_every_wrong_key_corrupts_one_input(self):
        """Test that every Anti-SAT wrong key has corruptibility exactly 1."""
        for n in (4, 5, 6):
            block, _ = build_antisat(n)
            report = corruptibility_census(block)
            assert report.histogram == {0: 2 ** n, 1: 2 ** (2 * n) - 2 ** n}

    def test_type1_structure(self):
        """Test that a type-1 Anti-SAT block outputs 1 under right keys."""
        block, family = build_antisat(4, BlockType.TYPE1)
        assert block.block_type == BlockType.TYPE1
        assert block.correct_output == 1
        assert family.offsets == {0}
        assert_family_valid(block, family)

    def test_width_range(self):
        """Test that widths below 2 are rejected."""
        with pytest.raises(DomainError):
            build_antisat(1)


class TestConsecutive:
    """Test the consecutive-cell complementary builder."""

    def test_p1_matches_inverted_antisat(self):
        """Test that p=1 is Anti-SAT with every literal inverted."""
        block, family = build_consecutive_complementary(4, 1)
        assert block.f.true_set().members == {0}
        assert family.offsets == {0}

    @pytest.mark.parametrize("p", [2, 6, 8])
    def test_constraint1_violations(self, p):
        """Test that p values without a Constraint 1 witness raise a construction error."""
        with pytest.raises(ConstructionError):
            build_consecutive_complementary(4, p)

    def test_unvalidated_block_returned(self):
        """Test that validate=False returns the block with its stabilizer offsets."""
        block, family = build_consecutive_complementary(4, 8, validate=False)
        assert block.f.true_set().members == set(range(8))
        assert family.offsets == set(range(8))
        assert_family_valid(block, family)

    def test_validated_blocks_pass_constraint1(self):
        """Test every p whose block is accepted at n=4."""
        for p in range(1, 16):
            try:
                block, family = build_consecutive_complementary(4, p)
            except ConstructionError:
                unchecked, _ = build_consecutive_complementary(4, p, validate=False)
                assert check_constraint1(unchecked.f, unchecked.g) is None
                continue
            assert check_constraint1(block.f, block.g) is not None
            assert_family_valid(block, family)

    def test_p_range(self):
        """Test that p = 0 and p = 2^n are rejected."""
        with pytest.raises(DomainError):
            build_consecutive_complementary(4, 0)
        with pytest.raises(DomainError):
            build_consecutive_complementary(4, 16)


class TestCustomAndFactory:
    """Test explicit-set blocks and the block factory."""

    def test_custom_block(self):
        """Test a custom block from the example 1 sets."""
        block, family = build_custom(4, {0, 1, 2, 3}, {0, 8, 9, 10, 11})
        assert family.offsets == {4, 5, 6, 7, 12, 13, 14, 15}
        assert family.pattern == "*~**"
        assert family.is_cube

    def test_custom_without_right_key(self):
        """Test that example 3 sets fail construction."""
        with pytest.raises(ConstructionError):
            build_custom(4, {0, 1, 2, 3}, {0, 4, 8, 12})

    def test_factory_kinds(self, block_factory):
        """Test that the factory builds each kind."""
        for kind, kwargs in (("antisat", {}), ("comp", {"t": 2}), ("noncomp", {"t": 2}),
                             ("consecutive", {"p": 3})):
            block, family = block_factory.create_block(kind, 5, **kwargs)
            assert block.n == 5
            assert_family_valid(block, family)

    def test_factory_errors(self, block_factory):
        """Test missing parameters and unknown kinds."""
        with pytest.raises(DomainError):
            block_factory.create_block("comp", 4)
        with pytest.raises(DomainError):
            block_factory.create_block("consecutive", 4)
        with pytest.raises(DomainError):
            block_factory.create_block("sarlock", 4)

    def test_family_from_offsets(self):
        """Test pattern and description of a family."""
        family = RightKeyFamily.from_offsets(4, {4, 5, 6, 7})
        assert family.pattern == "=~**"
        assert "bit 2: complementary" in family.describe()
        assert family.to_dict()["right_key_count"] == 64


class TestPredictions:
    """Test closed-form corruptibility predictions."""

    def test_comp_n4_t1(self):
        """Test {7: 128, 1: 112} with 16 right keys."""
        prediction = predict_corruptibility(4, 1, "comp")
        assert dict(prediction.histogram) == {7: 128, 1: 112}
        assert prediction.right_keys == 16

    def test_noncomp_n4_t2(self):
        """Test {4: 128, 1: 64} with 64 right keys."""
        prediction = predict_corruptibility(4, 2, "noncomp")
        assert dict(prediction.histogram) == {4: 128, 1: 64}
        assert prediction.right_keys == 64

    def test_totals_partition_key_space(self):
        """Test that histogram totals plus right keys equal 2^(2n)."""
        for n in range(3, 9):
            for t in range(1, n):
                assert predict_corruptibility(n, t, "comp").total_keys == 2 ** (2 * n)
            for t in range(2, n):
                assert predict_corruptibility(n, t, "noncomp").total_keys == 2 ** (2 * n)

    def test_closed_form_averages(self):
        """Test the tabulated average approximations."""
        assert predict_corruptibility(4, 1, "comp").closed_form_average == 4
        assert predict_corruptibility(4, 2, "noncomp").closed_form_average == 2
        assert predict_corruptibility(4, 2, "noncomp").average == 3

    def test_census_matches_prediction(self, canonical_blocks):
        """Test exhaustive census of every canonical block against the prediction."""
        for (kind, n, t), (block, _) in canonical_blocks.items():
            if kind == "antisat":
                continue
            report = corruptibility_census(block)
            assert_partition_valid(report.histogram, n)
            assert report.histogram == dict(predict_corruptibility(n, t, kind).full_histogram())

    def test_unknown_kind(self):
        """Test that an unknown prediction kind is rejected."""
        with pytest.raises(DomainError):
            predict_corruptibility(4, 2, "sfll")


class TestLambdaBound:
    """Test the SAT-iteration lower bound."""

    def test_anti_sat_n4(self):
        """Test 240/15 = 16."""
        assert lambda_lower_bound(4, 1) == 16

    def test_anti_sat_n8(self):
        """Test (2^16 - 2^8)/255 = 256."""
        assert lambda_lower_bound(8, 1) == 256

    def test_p8(self):
        """Test 240/64 = 3.75."""
        assert lambda_lower_bound(4, 8) == Fraction(15, 4)

    def test_right_key_override(self):
        """Test the bound with an explicit right-key count."""
        block, family = build_consecutive_complementary(8, 2, validate=False)
        bound = lambda_lower_bound(8, 2, family.key_count)
        assert bound == Fraction(2 ** 16 - family.key_count, 2 * 254)

    def test_p_range(self):
        """Test that p must be in [1, 2^n - 1]."""
        with pytest.raises(DomainError):
            lambda_lower_bound(4, 16)


class TestBlockEval:
    """Test block evaluation."""

    def test_example1_wrong_output(self, example_blocks):
        """Test X=1, K_f=0, K_g=1 gives 1 on example 1."""
        assert block_eval(example_blocks["example1"], 1, 0, 1) == 1

    def test_antisat_wrong_output(self):
        """Test X=15, K_f=0, K_g=1 gives 1 on Anti-SAT n=4."""
        block, _ = build_antisat(4)
        assert block_eval(block, 15, 0, 1) == 1

    def test_right_keys_output_constant(self, canonical_blocks):
        """Test that every right key outputs the correct constant on all inputs."""
        for block, family in canonical_blocks.values():
            offset = min(family.offsets)
            for x in range(1 << block.n):
                assert block_eval(block, x, 3, 3 ^ offset) == block.correct_output

    def test_right_key_offsets_recomputed(self, canonical_blocks):
        """Test that family offsets equal the truth-set search."""
        for block, family in canonical_blocks.values():
            assert family.offsets == right_key_offsets(block.f, block.g, block.block_type)
