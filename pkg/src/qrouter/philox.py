"""Vectorized Philox4x32-10 counter-based generator.

Salmon et al., "Parallel random numbers: as easy as 1, 2, 3" (SC11). Output
depends only on (key, counter), so any trial can be regenerated without
replaying the ones before it. Matches the Random123 known-answer vectors.
"""
from __future__ import annotations

import numpy as np

ALGORITHM = "philox4x32-10"

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_MASK = np.uint64(0xFFFFFFFF)
_SHIFT = np.uint64(32)
ROUNDS = 10


def philox4x32(counter, key, rounds: int = ROUNDS) -> np.ndarray:
    """Encrypt counters.

    counter: array of shape (..., 4) with uint32 words.
    key: pair of uint32 words.
    Returns uint32 array with the same shape as ``counter``.
    """
    ctr = np.asarray(counter, dtype=np.uint64)
    c0, c1, c2, c3 = (ctr[..., k].copy() for k in range(4))
    k0, k1 = int(key[0]) & 0xFFFFFFFF, int(key[1]) & 0xFFFFFFFF
    for r in range(rounds):
        if r:
            k0 = (k0 + _W0) & 0xFFFFFFFF
            k1 = (k1 + _W1) & 0xFFFFFFFF
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0, lo0 = p0 >> _SHIFT, p0 & _MASK
        hi1, lo1 = p1 >> _SHIFT, p1 & _MASK
        c0 = hi1 ^ c1 ^ np.uint64(k0)
        c1 = lo1
        c2 = hi0 ^ c3 ^ np.uint64(k1)
        c3 = lo0
    return np.stack([c0, c1, c2, c3], axis=-1).astype(np.uint32)


def split_seed(seed: int) -> tuple[int, int]:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return seed & 0xFFFFFFFF, seed >> 32


def trial_uniforms(seed: int, start: int, stop: int, count: int) -> np.ndarray:
    """Doubles in [0, 1) for trials ``start..stop-1``, ``count`` per trial.

    Trial t uses counters (t_lo, t_hi, block, 0) for block = 0, 1, ...;
    each 53-bit double is built from two consecutive 32-bit words. Returns
    shape (stop - start, count).
    """
    key = split_seed(seed)
    trials = np.arange(start, stop, dtype=np.uint64)
    blocks = (count + 1) // 2
    ctr = np.zeros((len(trials), blocks, 4), dtype=np.uint64)
    ctr[..., 0] = (trials & _MASK)[:, None]
    ctr[..., 1] = (trials >> _SHIFT)[:, None]
    ctr[..., 2] = np.arange(blocks, dtype=np.uint64)[None, :]
    words = philox4x32(ctr, key).reshape(len(trials), blocks * 2, 2).astype(np.uint64)
    hi = words[..., 0] >> np.uint64(5)
    lo = words[..., 1] >> np.uint64(6)
    u = (hi * np.uint64(67108864) + lo).astype(np.float64) * (1.0 / 9007199254740992.0)
    return u[:, :count]
