"""
Test package for the G-Anti-SAT locking toolkit.

Covers:
- Truth-set algebra, block construction and right-key families
- Netlists, CNF encoding and the embedded SAT solver
- SAT attack, corruptibility and structural analyses
- Configuration files and the command-line entry point
"""
