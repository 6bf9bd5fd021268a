"""Counter-based random streams.

Each purpose (design sampling, bootstrap resampling) owns a stream, and each
unit of work inside a stream (a bootstrap replication, say) owns a child key,
so draws never depend on evaluation order or worker count.
"""

import numpy as np

from .errors import ConfigError

DESIGN_STREAM = 0
BOOTSTRAP_STREAM = 1

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    """Validate an unsigned 64-bit seed.

    :raises ConfigError: if the seed is negative, too large or not an integer
    """
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ConfigError("seed must be an integer", seed=seed)
    if not 0 <= int(seed) <= MAX_SEED:
        raise ConfigError("seed must fit in an unsigned 64-bit integer", seed=seed)
    return int(seed)


def generator(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    """Philox generator keyed by ``(seed, stream, index)``."""
    sequence = np.random.SeedSequence(check_seed(seed), spawn_key=(stream, index))
    return np.random.Generator(np.random.Philox(sequence))
