"""Seeded PCG64 stream and polar Box-Muller standard normals.

The generator is the reference PCG64 (128-bit LCG, XSL-RR 64-bit output).
It is seeded the way the reference ``pcg64_srandom_r(initstate, initseq)``
does, with ``initstate = seed`` and ``initseq = STREAM``, so the stream does
not depend on numpy's SeedSequence hashing. numpy's ``PCG64`` only supplies
the fast raw-word generation after the state has been placed.
"""
import numpy as np

from ._backend import polar_normals

MULTIPLIER = 0x2360ED051FC65DA44385DF649FCCF645
MASK128 = (1 << 128) - 1
MASK64 = (1 << 64) - 1
STREAM = 0


def seeded_state(seed: int, stream: int = STREAM) -> tuple[int, int]:
    """Return ``(state, inc)`` after reference PCG seeding."""
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    inc = ((stream << 1) | 1) & MASK128
    state = (inc + seed) & MASK128  # one step from state 0, then add seed
    state = (state * MULTIPLIER + inc) & MASK128
    return state, inc


def reference_raw(seed: int, n: int, stream: int = STREAM) -> list[int]:
    """Pure-integer PCG64 output, one word at a time (slow; for checking)."""
    state, inc = seeded_state(seed, stream)
    out = []
    for _ in range(n):
        state = (state * MULTIPLIER + inc) & MASK128
        x = ((state >> 64) ^ state) & MASK64
        rot = state >> 122
        out.append(((x >> rot) | (x << ((-rot) & 63))) & MASK64)
    return out


def bit_generator(seed: int, stream: int = STREAM) -> np.random.PCG64:
    state, inc = seeded_state(seed, stream)
    bg = np.random.PCG64()
    bg.state = {
        "bit_generator": "PCG64",
        "state": {"state": state, "inc": inc},
        "has_uint32": 0,
        "uinteger": 0,
    }
    return bg


def standard_normals(seed: int, n: int) -> np.ndarray:
    """``n`` standard normals via the polar method, in stream order."""
    bg = bit_generator(seed)
    out = np.empty(n, dtype=np.float64)
    filled = 0
    while filled < n:
        # acceptance rate is pi/4 per pair of words
        words = 2 * ((n - filled) // 2 + 1)
        words = int(words * 1.3) + 64
        words += words % 2
        raw = bg.random_raw(words)
        filled, consumed = polar_normals(raw, out, filled)
        if filled < n and consumed != raw.size:
            raise RuntimeError("normal sampler stalled")
    return out
