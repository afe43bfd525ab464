"""
Corruptibility Data Provider Module
Provides the CorruptibilityDataProvider class for block-level analyses.
"""

from typing import Optional

import numpy as np
import pandas as pd

from analysis import (
    DEFAULT_CENSUS_SEED,
    DEFAULT_SAMPLE_COUNT,
    bypass_cost,
    cas_unlock_probe,
    corruptibility_census,
)
from blockgen import RightKeyFamily, predict_corruptibility
from data_providers.report_data_provider import ReportDataProvider
from errors import CapacityError, LockingError
from truthsets import (
    LockBlock,
    check_constraint1,
    check_constraint2,
    has_distinct_elements,
    right_key_offsets,
    wrong_key_matrix,
    wrong_key_sets_disjoint,
    WRONG_KEY_SWEEP_MAX_WIDTH,
)

WK_ARRAY_EXPORT_MAX_WIDTH = 6


class CorruptibilityDataProvider(ReportDataProvider):
    """
    Data access class for the corruptibility of one locking block.
    Results are plain dicts; failures come back as {"error": ...}.
    """

    def __init__(self, block: LockBlock, provenance: Optional[dict] = None):
        """Initialize with the block under analysis"""
        super().__init__(provenance)
        self.block = block
        self.last_census = None

    def get_census(self, mode: str = "exhaustive", sample_count: int = DEFAULT_SAMPLE_COUNT,
                   seed: int = DEFAULT_CENSUS_SEED) -> dict:
        """
        Wrong-key histogram of the block.

        Args:
            mode: "exhaustive" or "sampled"
            sample_count: Keys drawn in sampled mode
            seed: Sampling seed, always reported

        Returns:
            Dictionary with histogram, average and census mode
        """
        try:
            self.last_census = corruptibility_census(self.block, mode, sample_count, seed)
            return self.last_census.to_dict()
        except LockingError as e:
            return self._error("Census", e)

    def get_census_frame(self) -> pd.DataFrame:
        if self.last_census is None:
            self.get_census()
        return self.last_census.to_frame()

    @staticmethod
    def get_prediction(kind: str, n: int, t: int) -> dict:
        try:
            return predict_corruptibility(n, t, kind).to_dict()
        except LockingError as e:
            return ReportDataProvider._error("Prediction", e)

    def get_cas_probe(self) -> dict:
        try:
            probe = cas_unlock_probe(self.block)
            probe["all0_right"] = probe["all0"] == 0
            probe["all1_right"] = probe["all1"] == 0
            return probe
        except LockingError as e:
            return self._error("CAS-Unlock probe", e)

    def get_bypass_cost(self, k_f: int, k_g: int) -> dict:
        try:
            cost = bypass_cost(self.block, (k_f, k_g))
            return {
                "K_f": k_f,
                "K_g": k_g,
                "n_p": cost.n_p,
                "patterns": list(cost.patterns),
                "truncated": cost.truncated,
            }
        except LockingError as e:
            return self._error("Bypass cost", e)

    def get_constraint_report(self) -> dict:
        """Distance-set witness, right-key offsets and wrong-key set properties."""
        try:
            block = self.block
            witness = check_constraint1(block.f, block.g, block.block_type)
            offsets = right_key_offsets(block.f, block.g, block.block_type)
            report = {
                "n": block.n,
                "type": int(block.block_type),
                "constraint1": witness is not None,
                "witness": [int(witness[0]), int(witness[1])] if witness else None,
                "constraint2": check_constraint2(block.f, block.g, block.block_type),
                "right_keys": RightKeyFamily.from_offsets(block.n, offsets).to_dict(),
            }
            if block.n <= WRONG_KEY_SWEEP_MAX_WIDTH:
                report["distinct_elements"] = has_distinct_elements(block)
                report["wrong_key_sets_disjoint"] = wrong_key_sets_disjoint(block)
            return report
        except LockingError as e:
            return self._error("Constraint check", e)

    def get_wrong_key_frame(self) -> pd.DataFrame:
        """Input-by-key wrong-output array, rows X, columns K_f||K_g as binary."""
        if self.block.n > WK_ARRAY_EXPORT_MAX_WIDTH:
            raise CapacityError("Wrong-key array export", self.block.n, WK_ARRAY_EXPORT_MAX_WIDTH)
        matrix = wrong_key_matrix(self.block)
        width = 2 * self.block.n
        columns = [format(k, f"0{width}b") for k in range(matrix.shape[1])]
        frame = pd.DataFrame(matrix.astype(np.uint8), columns=columns)
        frame.insert(0, "X", [format(x, f"0{self.block.n}b") for x in range(matrix.shape[0])])
        return frame
