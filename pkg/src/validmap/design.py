"""Space-filling designs and candidate generation.

Initial designs use plain Latin hypercube sampling (one uniform draw per
stratum, independent column permutations). Candidate sets are i.i.d. uniform
and regenerated on every call. All randomness in a run flows from a single
seed through named substreams (see :func:`substream`).
"""

from __future__ import annotations

import numpy as np

from .exceptions import ParameterError

# Fixed substream indices; changing these changes every seeded result.
_STREAMS = {
    "init": 0,
    "candidates": 1,
    "noise": 2,
    "restarts": 3,
    "select": 4,
    "test": 5,
    "train": 6,
}


def substream(seed: int, name: str) -> np.random.Generator:
    """Named, reproducible child generator of a single run seed."""
    if name not in _STREAMS:
        raise ParameterError(f"unknown rng stream {name!r}")
    ss = np.random.SeedSequence(int(seed), spawn_key=(_STREAMS[name],))
    return np.random.default_rng(ss)


def lhs(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Latin hypercube sample of ``n`` points in ``[0, 1]^d``.

    Every dimension places exactly one point in each of the ``n`` equal-width
    strata ``[k/n, (k+1)/n)``, with a uniform offset inside the stratum and
    independent permutations across dimensions.
    """
    if n < 1 or d < 1:
        raise ParameterError("lhs requires n >= 1 and d >= 1")
    out = np.empty((n, d))
    for j in range(d):
        perm = rng.permutation(n)
        out[:, j] = (perm + rng.uniform(size=n)) / n
    return out


def candidate_count(d: int) -> int:
    """Default per-iteration candidate count, ``min(5000 d, 50000)``."""
    return min(5000 * d, 50000)


def candidates(
    d: int, rng: np.random.Generator, override: int | None = None
) -> np.ndarray:
    """Fresh i.i.d. uniform candidate set on ``[0, 1]^d``."""
    if d < 1:
        raise ParameterError("candidates requires d >= 1")
    n_c = candidate_count(d) if override is None else int(override)
    if n_c < 1:
        raise ParameterError(f"candidate count must be positive, got {n_c}")
    return rng.uniform(size=(n_c, d))
