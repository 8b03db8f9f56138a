"""Deterministic random streams.

Every sampled number in the package comes from Philox (the 4x64 variant,
10 rounds), a counter-based generator whose streams are cheap to derive,
splittable, and bit-reproducible across platforms.  ``RNG_ID`` names the
algorithm and is recorded in every ``RunResult`` so results can be
reproduced later.

Stream discipline for multi-shot runs: shot ``i`` of a run consumes the
contiguous counter block ``[i * d, (i + 1) * d)`` of the stream keyed by
the run seed, where ``d`` is the number of random draws a single shot
needs (one per measurement).  Blocks of distinct shots never overlap, so
shots are independent and could be generated in any order or in
parallel without changing a single bit of the output.
"""

from __future__ import annotations

import numpy as np

RNG_ID = "philox4x64-10"

_MASK64 = (1 << 64) - 1


def stream(seed: int, stream_index: int = 0) -> np.random.Generator:
    """Generator number ``stream_index`` of the family keyed by ``seed``."""
    key = np.array([seed & _MASK64, stream_index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def shot_uniforms(seed: int, shots: int, draws_per_shot: int) -> np.ndarray:
    """Uniform draws for a whole run, one row per shot.

    Row ``i`` holds exactly the draws shot ``i`` consumes, in op order.
    """
    if draws_per_shot == 0:
        return np.zeros((shots, 0))
    return stream(seed).random((shots, draws_per_shot))
