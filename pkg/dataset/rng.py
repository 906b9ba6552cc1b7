"""
Deterministic random streams.

All randomness in the package flows through `DeterministicStream`, a thin
wrapper over numpy's PCG64 bit generator that only consumes its raw
64-bit outputs. numpy keeps bit-generator output stable across releases
(unlike `Generator` methods), so splits and initialisations are
reproducible across platforms and versions.

Algorithm:
  state     PCG64(SeedSequence(entropy=seed, spawn_key=(stream,)))
  u64       bitgen.random_raw()
  bounded   rejection sampling: threshold = 2**64 mod bound; draw u64
            until u64 >= threshold; return u64 mod bound (unbiased)
  uniform   (u64 >> 11) * 2**-53, in [0, 1)
  shuffle   Fisher-Yates from the top index down: for i = n-1 .. 1,
            swap(i, bounded(i + 1))
"""
import numpy as np
from numpy.random import PCG64, SeedSequence

from errors import ConfigurationError

# Named streams
STREAM_SPLIT = 0
STREAM_INIT = 1
STREAM_HOLDOUT = 2
STREAM_SHUFFLE = 3

_U64 = 1 << 64


def validate_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ConfigurationError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < _U64:
        raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


class DeterministicStream:
    """One named, seeded stream of 64-bit outputs"""

    def __init__(self, seed: int, stream: int):
        self.seed = validate_seed(seed)
        self.stream = stream
        self._bitgen = PCG64(SeedSequence(entropy=self.seed, spawn_key=(stream,)))

    def next_u64(self) -> int:
        return int(self._bitgen.random_raw())

    def bounded(self, bound: int) -> int:
        """Uniform integer in [0, bound)"""
        if bound <= 0:
            raise ConfigurationError(f"bound must be positive, got {bound}")
        threshold = _U64 % bound
        while True:
            r = self.next_u64()
            if r >= threshold:
                return r % bound

    def uniform(self, size: int) -> np.ndarray:
        """`size` uniforms in [0, 1)"""
        raw = np.asarray(self._bitgen.random_raw(size), dtype=np.uint64)
        return (raw >> np.uint64(11)).astype(np.float64) * 2.0 ** -53

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates shuffle of range(n)"""
        indices = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.bounded(i + 1)
            indices[i], indices[j] = indices[j], indices[i]
        return indices
