"""Counter-based random streams (Philox4x64-10) vectorised over stream ids.

A stream is identified by ``(seed, stream_id)``; the Philox key is exactly that
pair and the counter is the block position inside the stream.  Any draw is a
pure function of ``(seed, stream_id, position)``, so Monte Carlo results do not
depend on how trajectories are split between workers.
"""

from __future__ import annotations

import numpy as np

__all__ = ["RngStream", "philox4x64"]

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_MASK64 = (1 << 64) - 1


def _mulhilo(a: np.uint64, b: np.ndarray):
    # 64x64 -> 128 bit product assembled from 32-bit limbs
    a_lo, a_hi = a & _LO32, a >> _S32
    b_lo, b_hi = b & _LO32, b >> _S32
    ll = a_lo * b_lo
    lh = a_lo * b_hi
    hl = a_hi * b_lo
    hh = a_hi * b_hi
    mid = (ll >> _S32) + (lh & _LO32) + (hl & _LO32)
    hi = hh + (lh >> _S32) + (hl >> _S32) + (mid >> _S32)
    return hi, a * b


def philox4x64(counter, key, rounds: int = 10):
    """Philox4x64 bijection.

    ``counter`` is a sequence of four uint64 arrays (broadcastable), ``key`` a
    pair.  Returns four uint64 arrays.
    """
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) for c in counter)
    k0, k1 = (np.asarray(k, dtype=np.uint64) for k in key)
    with np.errstate(over="ignore"):
        for r in range(rounds):
            if r:
                k0 = k0 + _W0
                k1 = k1 + _W1
            hi0, lo0 = _mulhilo(_M0, c0)
            hi1, lo1 = _mulhilo(_M1, c2)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return c0, c1, c2, c3


class RngStream:
    """One or many independent random streams sharing a seed.

    ``stream_id`` may be an integer or a 1-D array of integers; with an array,
    every draw gets a leading axis of length ``len(stream_id)`` and all streams
    advance in lockstep.  Instances carry a position and must not be shared
    between concurrent tasks.
    """

    def __init__(self, seed: int, stream_id=0, position: int = 0):
        self.seed = int(seed) & _MASK64
        ids = np.asarray(stream_id)
        self._vector = ids.ndim > 0
        self.stream_id = ids.astype(np.uint64) if self._vector else int(stream_id) & _MASK64
        self.position = int(position)

    def __repr__(self):
        ids = f"{len(self.stream_id)} streams" if self._vector else self.stream_id
        return f"RngStream(seed={self.seed}, stream_id={ids}, position={self.position})"

    @property
    def n_streams(self) -> int | None:
        return len(self.stream_id) if self._vector else None

    def subset(self, index) -> "RngStream":
        """Streams ``stream_id[index]`` at the current position."""
        if not self._vector:
            raise TypeError("subset needs a vector of stream ids")
        return RngStream(self.seed, self.stream_id[index], self.position)

    def raw(self, n: int) -> np.ndarray:
        """``n`` uint64 words per stream; consumes ``ceil(n/4)`` counter blocks."""
        blocks = -(-n // 4)
        ctr = np.arange(self.position, self.position + blocks, dtype=np.uint64)
        self.position += blocks
        zero = np.uint64(0)
        if self._vector:
            ids = self.stream_id[:, None]
            out = philox4x64((ctr[None, :], zero, zero, zero), (np.uint64(self.seed), ids))
            words = np.stack(np.broadcast_arrays(*out), axis=-1).reshape(len(self.stream_id), -1)
            return words[:, :n]
        out = philox4x64((ctr, zero, zero, zero), (np.uint64(self.seed), np.uint64(self.stream_id)))
        return np.stack(out, axis=-1).reshape(-1)[:n]

    def _shape(self, size):
        size = (size,) if np.isscalar(size) else tuple(size)
        lead = (len(self.stream_id),) if self._vector else ()
        return lead, size

    def uniform(self, size=()) -> np.ndarray:
        """Doubles in the open interval (0, 1), 53 random bits each."""
        lead, size = self._shape(size)
        n = int(np.prod(size, dtype=np.int64))
        words = self.raw(n)
        u = ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
        return u.reshape(lead + size)

    def normal(self, size=()) -> np.ndarray:
        """Standard normals by the Box-Muller transform."""
        lead, size = self._shape(size)
        n = int(np.prod(size, dtype=np.int64))
        m = -(-n // 2)
        u = self.uniform((2, m))
        u1, u2 = (u[..., 0, :], u[..., 1, :])
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)], axis=-1)[..., :n]
        return z.reshape(lead + size)

    def exponential(self, size=()) -> np.ndarray:
        """Unit-rate exponentials by inversion."""
        return -np.log(self.uniform(size))

    def gamma_int(self, shape: int, size=()) -> np.ndarray:
        """Gamma(shape, 1) draws for a positive integer ``shape`` (sum of exponentials)."""
        if shape < 1 or int(shape) != shape:
            raise ValueError("gamma_int needs a positive integer shape")
        lead, size = self._shape(size)
        e = self.exponential(size + (int(shape),))
        return e.sum(axis=-1)
