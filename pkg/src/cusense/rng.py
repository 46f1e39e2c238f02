"""Reproducible random streams.

Gaussian variates come from an explicit Box-Muller transform over uniforms
drawn from a keyed Philox counter-based generator.  Each logical stream is
addressed by a single 64-bit seed; per-trial seeds are derived from a base
seed with a SplitMix64 mix, so stream i of an experiment is a pure function
of (base_seed, i) and independent of evaluation order or parallelism.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def derive_seed(base_seed: int, index: int) -> int:
    """SplitMix64-style seed for stream `index` of an experiment."""
    if index < 0:
        raise ValueError(f"stream index must be >= 0, got {index}")
    z = (int(base_seed) + (index + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def standard_normals(seed: int, count: int) -> np.ndarray:
    """`count` iid N(0, 1) variates, fully determined by `seed`.

    Box-Muller on Philox uniforms: each uniform pair (u1, u2) yields
    sqrt(-2 ln(1 - u1)) * (cos, sin)(2 pi u2); 1 - u1 keeps the log argument
    in (0, 1].  Pairs are consumed in a fixed order, so the first n variates
    of a stream do not depend on how many are requested.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if count == 0:
        return np.empty(0)
    gen = np.random.Generator(np.random.Philox(key=int(seed) & _MASK64))
    pairs = (count + 1) // 2
    # one uniform pair per variate pair, interleaved, so the first n variates
    # do not depend on how many were requested
    u = gen.random((pairs, 2))
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:count]
