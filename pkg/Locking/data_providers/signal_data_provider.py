"""
Signal Data Provider Module
Provides the SignalDataProvider class for SPS/ADS analysis and SPS removal.
"""

from typing import Optional

import pandas as pd

from analysis import ads_ranking, sps_analyze, sps_removal
from data_providers.report_data_provider import ReportDataProvider
from errors import LockingError
from netlist import Netlist, Oracle


class SignalDataProvider(ReportDataProvider):
    """Data access class for signal probability skew of one netlist."""

    def __init__(self, net: Netlist, provenance: Optional[dict] = None):
        super().__init__(provenance)
        self.net = net
        self.stats = None
        self.ranking = []

    def analyze(self, mode: str = "propagated", top: int = 10) -> dict:
        """
        Compute SPS/ADS and rank gates.

        Args:
            mode: "propagated" or "exact"
            top: Ranked gates to include in the result

        Returns:
            Dictionary with the mode and the top-ranked gates
        """
        try:
            self.stats = sps_analyze(self.net, mode)
            self.ranking = ads_ranking(self.stats, self.net)
            return {
                "mode": mode,
                "gates": len(self.stats.ads),
                "ranking": [self._gate_row(rank, gate) for rank, gate in enumerate(self.ranking[:top], 1)],
            }
        except LockingError as e:
            return self._error("SPS analysis", e)

    @staticmethod
    def _gate_row(rank: int, gate) -> dict:
        return {"rank": rank, "gate": gate.name, "kind": gate.kind, "ads": gate.ads,
                "sps": gate.sps, "tfi_keys": gate.tfi_keys}

    def get_ranking_frame(self) -> pd.DataFrame:
        rows = [self._gate_row(rank, gate) for rank, gate in enumerate(self.ranking, 1)]
        return pd.DataFrame(rows, columns=["rank", "gate", "kind", "ads", "sps", "tfi_keys"])

    def get_stats_frame(self) -> pd.DataFrame:
        return self.stats.to_frame() if self.stats is not None else pd.DataFrame()

    def run_removal(self, oracle: Oracle) -> dict:
        """SPS removal attack against ``oracle``."""
        try:
            result = sps_removal(self.net, oracle, self.stats)
            return {"gate": result.gate, "ads": result.ads, "constant": result.constant,
                    "corruptibility": result.corruptibility, "recovered": result.recovered}
        except LockingError as e:
            return self._error("SPS removal", e)
