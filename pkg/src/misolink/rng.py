"""Counter-based random number streams.

Every random quantity in the simulator is drawn from a stream identified by
a ``(seed, stream_id)`` pair.  A stream is a pure function of its identity
and a draw counter, so replaying any stream reproduces the exact same
values regardless of execution order or worker count, and distinct stream
ids give statistically independent sequences.  The generator is the
splitmix64 output function applied to a golden-ratio counter walk; complex
Gaussians use Box-Muller on consecutive uniform pairs (exactly two
uniforms per complex draw, so draw positions never depend on the values).
"""

from dataclasses import dataclass, field

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_SEED_SALT = 0x6A09E667F3BCC909
_STREAM_SALT = 0xBB67AE8584CAA73B

# Stream-id layout used by the per-trial simulation: trial t, stage s maps
# to stream id t * STREAMS_PER_TRIAL + s.  Stages own private streams so a
# stage that draws nothing (e.g. noiseless estimation) never shifts any
# other stage's values.
STREAMS_PER_TRIAL = 8
ST_CHANNEL = 0
ST_ESTIMATE = 1
ST_EVOLVE = 2
ST_EFFECTIVE = 3
ST_BITS = 4
ST_NOISE = 5

_INV_2_53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return (z ^ (z >> 31)) & _MASK


def stream_key(seed: int, stream_id: int) -> int:
    """Derive the 64-bit state key of stream (seed, stream_id)."""
    a = mix64((seed ^ _SEED_SALT) & _MASK)
    b = mix64((stream_id ^ _STREAM_SALT) & _MASK)
    return mix64(a + b)


def raw64(key: int, counter: int) -> int:
    """The counter-th 64-bit output word of the stream with state `key`."""
    return mix64(key + ((counter + 1) * _GOLDEN & _MASK))


def raw64_block(key: np.ndarray | int, counters: np.ndarray) -> np.ndarray:
    """Vectorized raw64: broadcasts uint64 key(s) against uint64 counters."""
    z = np.uint64(key) + (counters + np.uint64(1)) * np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def uniform53(key: int, counter: int) -> float:
    """Uniform double in [0, 1) with 53 random bits."""
    return (raw64(key, counter) >> 11) * _INV_2_53


@dataclass
class RngStream:
    """A consumable view of one random stream.

    The (seed, stream_id) pair fixes the entire sequence; `counter` tracks
    how many 64-bit words have been consumed.  Streams are cheap values:
    give every Monte Carlo worker its own and never share one.
    """

    seed: int
    stream_id: int = 0
    counter: int = 0
    _key: int = field(default=-1, repr=False, compare=False)

    def __post_init__(self):
        self._key = stream_key(self.seed, self.stream_id)

    @property
    def key(self) -> int:
        return self._key

    def advance(self, n: int) -> int:
        """Reserve the next n counter positions; returns the first one."""
        c = self.counter
        self.counter += n
        return c

    def uniforms(self, n: int) -> np.ndarray:
        """Next n uniform doubles in [0, 1), advancing the counter."""
        counters = np.arange(self.counter, self.counter + n, dtype=np.uint64)
        self.counter += n
        words = raw64_block(self._key, counters)
        return (words >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def integers(self, n: int) -> np.ndarray:
        """Next n raw 64-bit words as uint64, advancing the counter."""
        counters = np.arange(self.counter, self.counter + n, dtype=np.uint64)
        self.counter += n
        return raw64_block(self._key, counters)


def trial_stream(master_seed: int, trial_id: int, stage: int) -> RngStream:
    """Stream owned by (trial, stage) under a master seed."""
    return RngStream(master_seed, trial_id * STREAMS_PER_TRIAL + stage)


def gauss_pairs_from_uniforms(u: np.ndarray) -> np.ndarray:
    """Box-Muller: 2n uniforms -> n complex CN(0,1) samples.

    Component variances are 1/2 each so E|z|^2 = 1.  Uses log(1-u) so the
    argument stays in (0, 1] and never hits log(0).
    """
    u = u.reshape(-1, 2)
    r = np.sqrt(-np.log(1.0 - u[:, 0]))
    th = (2.0 * np.pi) * u[:, 1]
    return r * np.cos(th) + 1j * (r * np.sin(th))


def cgauss_block(key: np.ndarray | int, n: int, counter0: int = 0) -> np.ndarray:
    """n complex CN(0,1) draws per key from counters [counter0, counter0+2n).

    With a scalar key returns shape (n,); with a key array of shape (m,)
    returns shape (m, n).  Draw i always consumes counters 2i and 2i+1, the
    same layout the compiled kernels use.
    """
    keys = np.atleast_1d(np.asarray(key, dtype=np.uint64))
    counters = np.arange(counter0, counter0 + 2 * n, dtype=np.uint64)
    words = raw64_block(keys[:, None], counters[None, :])
    u = (words >> np.uint64(11)).astype(np.float64) * _INV_2_53
    z = gauss_pairs_from_uniforms(u.reshape(-1, 2)).reshape(len(keys), n)
    if np.isscalar(key) or np.asarray(key).ndim == 0:
        return z[0]
    return z
