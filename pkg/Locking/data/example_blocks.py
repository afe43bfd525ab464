"""
Example Blocks Module
The three worked four-input blocks as JSON-form documents, with loaders.
"""

from truthsets import LockBlock

# Example 1: f = ~l3 & ~l2, g = l3 & ~l2 + ~l2 & ~l1 & ~l0
# Example 2: complementary pair, f = l3 + l2 & l1 & ~l0
# Example 3: satisfies the distance-set condition but has no right key
example_blocks = {
    "example1": {
        "n": 4,
        "type": 0,
        "f": {"n": 4, "true_set": [0, 1, 2, 3]},
        "g": {"n": 4, "true_set": [0, 8, 9, 10, 11]},
    },
    "example2": {
        "n": 4,
        "type": 0,
        "f": {"n": 4, "true_set": [6, 8, 9, 10, 11, 12, 13, 14, 15]},
        "g": {"n": 4, "true_set": [0, 1, 2, 3, 4, 5, 7]},
    },
    "example3": {
        "n": 4,
        "type": 0,
        "f": {"n": 4, "true_set": [0, 1, 2, 3]},
        "g": {"n": 4, "true_set": [0, 4, 8, 12]},
    },
}


def get_example_block(name: str) -> LockBlock:
    if name not in example_blocks:
        raise KeyError(f"Unknown example block {name!r}; choose from {sorted(example_blocks)}")
    return LockBlock.from_dict(example_blocks[name])
