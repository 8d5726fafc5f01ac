"""Stable sub-seed derivation.

Every stochastic act in a run draws from its own generator, seeded by a hash
of (master seed, purpose tag, indices). Results therefore do not depend on
the order in which work is scheduled.
"""

import hashlib

import numpy as np


def derive_seed(master, tag, *indices):
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(master)).encode())
    h.update(b"\x00" + tag.encode())
    for i in indices:
        h.update(b"\x00" + str(int(i)).encode())
    return int.from_bytes(h.digest(), "little")


def rng_for(master, tag, *indices):
    return np.random.default_rng(derive_seed(master, tag, *indices))
