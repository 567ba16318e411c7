"""Named-stream seed derivation.

All randomness in the package flows from one root seed.  Components derive
their own independent streams by hashing the root seed together with a
sequence of string/int labels, so adding a component never perturbs the
stream of another.
"""

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(root_seed: int, *labels) -> int:
    """Derive a 64-bit child seed from ``root_seed`` and a label path."""
    h = hashlib.sha256()
    h.update(str(int(root_seed)).encode())
    for label in labels:
        h.update(b"\x1f")
        h.update(str(label).encode())
    return int.from_bytes(h.digest()[:8], "little") & _MASK64


def generator(root_seed: int, *labels) -> np.random.Generator:
    """A numpy Generator seeded from the derived stream for ``labels``."""
    return np.random.default_rng(derive_seed(root_seed, *labels))
