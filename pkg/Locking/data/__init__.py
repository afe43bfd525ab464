"""
Data Package

Bundled fixtures for the locking library:
- host_data: sample host netlists (c17) and constant hosts
- example_blocks: the three worked four-input blocks
"""

from .example_blocks import example_blocks, get_example_block
from .host_data import host_catalog, load_host, load_sample_host

__all__ = [
    'example_blocks',
    'get_example_block',
    'host_catalog',
    'load_host',
    'load_sample_host',
]
