"""
Command Providers Package

One provider per CLI subcommand, each exposing its operations through a
``commands`` property and a ``run`` method returning the exit code:
- gen_commands: block generation and host locking
- attack_commands: SAT attack, approximate keys and profiles
- analyze_commands: census, constraints, SPS/ADS, probes and bypass cost
"""

from .analyze_commands import AnalyzeCommandProvider
from .attack_commands import AttackCommandProvider
from .gen_commands import GenCommandProvider

__all__ = [
    'AnalyzeCommandProvider',
    'AttackCommandProvider',
    'GenCommandProvider',
]
