"""Deterministic random-number substreams.

Every stochastic quantity in a drop is drawn from a generator keyed by
(root seed, *path-of-keys), so drops are reproducible bit-for-bit and
independent per link/segment regardless of evaluation order or worker
count.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _key_to_u32s(key) -> tuple[int, ...]:
    if isinstance(key, (int, np.integer)):
        v = int(key) & 0xFFFFFFFFFFFFFFFF
        return (v & 0xFFFFFFFF, v >> 32)
    if isinstance(key, str):
        digest = hashlib.sha256(key.encode("utf-8")).digest()
        return tuple(int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4))
    if isinstance(key, (tuple, list)):
        out: list[int] = []
        for k in key:
            out.extend(_key_to_u32s(k))
        return tuple(out)
    raise TypeError(f"unsupported stream key type: {type(key)!r}")


def substream(root_seed: int, *keys) -> np.random.Generator:
    """Independent generator for (root_seed, keys...).

    Keys may be ints, strings, or nested tuples of those; string keys are
    hashed with SHA-256 so the mapping is stable across processes and
    platforms (no dependence on PYTHONHASHSEED).
    """
    spawn: tuple[int, ...] = ()
    for key in keys:
        spawn = spawn + _key_to_u32s(key)
    seq = np.random.SeedSequence(entropy=int(root_seed) & (2**64 - 1), spawn_key=spawn)
    return np.random.Generator(np.random.PCG64(seq))
