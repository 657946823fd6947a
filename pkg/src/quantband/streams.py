"""Counter-based random streams.

Every replicate r of every randomized routine draws from
Philox(key=seed, counter=(0, r, domain, 0)).  Streams are therefore
independent across replicates and domains, and any parallel or blocked
execution schedule reproduces bit-identical draws.
"""

from __future__ import annotations

import numpy as np

CALIBRATION = 0
SCENARIO_DATA = 1
SCENARIO_DESIGN = 2


def replicate_stream(seed: int, replicate: int, domain: int = 0) -> np.random.Generator:
    counter = np.array([0, replicate, domain, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=np.uint64(seed), counter=counter))
