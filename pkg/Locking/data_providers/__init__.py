"""
Data Providers Package

This package contains report providers for the locking analyses:
- CorruptibilityDataProvider: census, constraints, CAS-Unlock probe and bypass cost of a block
- AttackDataProvider: SAT attack traces, approximate keys and profiles on a locked netlist
- SignalDataProvider: SPS/ADS ranking and SPS removal
"""

from .attack_data_provider import AttackDataProvider
from .corruptibility_data_provider import CorruptibilityDataProvider
from .report_data_provider import ReportDataProvider
from .signal_data_provider import SignalDataProvider

__all__ = [
    'AttackDataProvider',
    'CorruptibilityDataProvider',
    'ReportDataProvider',
    'SignalDataProvider',
]
