"""Counter-based random streams.

Every stream is a Philox4x64 generator keyed by ``(seed, stream_index)``.
Streams with different indices are independent, and any one of them can be
regenerated without touching the others, which is what lets Monte Carlo
chunks and scan trials be split across workers without changing results.
"""

import numpy as np

_MAX = 2**64


def stream(seed: int, index: int) -> np.random.Generator:
    if not (0 <= int(seed) < _MAX and 0 <= int(index) < _MAX):
        raise ValueError(f"seed and stream index must lie in [0, 2**64), got {seed}, {index}")
    key = np.array([int(seed), int(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
