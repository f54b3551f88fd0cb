"""Counter-based random streams.

Every draw in a simulation is produced by a Philox generator whose key is
(seed, path) and whose 256-bit counter block encodes (purpose, step).  A
stream is therefore a pure function of those labels: paths and steps can be
generated in any order, on any number of workers, with bit-identical output.
Within one stream the draws come out in the fixed basis order.
"""

from __future__ import annotations

import numpy as np

PURPOSE_INCREMENT = 0
PURPOSE_INIT = 1

_MASK64 = (1 << 64) - 1


def stream(seed: int, path_index: int, step_index: int = 0,
           purpose: int = PURPOSE_INCREMENT) -> np.random.Generator:
    """Generator for one (seed, path, step, purpose) label."""
    if seed < 0 or path_index < 0 or step_index < 0:
        raise ValueError("seed, path and step labels must be nonnegative")
    bitgen = np.random.Philox(
        counter=[0, 0, purpose & _MASK64, step_index & _MASK64],
        key=[seed & _MASK64, path_index & _MASK64],
    )
    return np.random.Generator(bitgen)
