"""Simulation of the Laguerre unitary process and LUE characteristic functions."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .matrixcore import HermitianMatrix, eigenvalues_hermitian, jacobi_eigh, sample_lue_batch
from .rng import RngStream

__all__ = [
    "Trajectory",
    "simulate_lup",
    "simulate_lup_eigenvalues",
    "simulate_lup_traces",
    "characteristic_function_lue",
    "empirical_characteristic",
    "sample_sum_pair",
    "sample_sum_pairs",
    "chunked_map",
]

DEFAULT_CHUNK = 20000


@dataclass
class Trajectory:
    """Recorded states of one LUP path at ascending integer times."""

    N: int
    times: list[int]
    states: list[HermitianMatrix]
    eigen_cache: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states must have equal length")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        if not self.eigen_cache:
            self.eigen_cache = [eigenvalues_hermitian(h) for h in self.states]

    def state_at(self, t: int) -> HermitianMatrix:
        return self.states[self.times.index(t)]

    def eigenvalues_at(self, t: int) -> np.ndarray:
        return self.eigen_cache[self.times.index(t)]


def _check_times(t_max, record_times):
    if int(t_max) != t_max or t_max < 1:
        raise ValueError(f"t_max must be a positive integer, got {t_max}")
    rec = sorted(set(record_times))
    if not rec:
        raise ValueError("record_times must be nonempty")
    for t in rec:
        if int(t) != t or not 1 <= t <= t_max:
            raise ValueError(f"record time {t} not an integer in [1, {t_max}]")
    return int(t_max), [int(t) for t in rec]


def simulate_lup(N: int, t_max: int, record_times: Sequence[int], rng: RngStream) -> Trajectory:
    """One LUP path ``L(t) = L(t-1) + X(t)`` with ``X(t) ~ LUE(0, 1)`` and ``L(0) = 0``."""
    t_max, rec = _check_times(t_max, record_times)
    if rng.n_streams is not None:
        raise TypeError("simulate_lup takes a single stream")
    state = np.zeros((N, N), dtype=complex)
    states = []
    for t in range(1, t_max + 1):
        state = state + sample_lue_batch(N, 0, 1.0, rng)
        if t in rec:
            states.append(HermitianMatrix(state))
    return Trajectory(N, rec, states)


def chunked_map(fn, n_items: int, chunk: int = DEFAULT_CHUNK, workers: int = 1):
    """Apply ``fn(start, stop)`` over index chunks and concatenate in index order.

    Chunk boundaries do not depend on ``workers``, so results are identical for
    any worker count.
    """
    bounds = [(i, min(i + chunk, n_items)) for i in range(0, n_items, chunk)]
    if workers <= 1 or len(bounds) == 1:
        parts = [fn(a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: fn(*ab), bounds))
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(p, axis=0) for p in zip(*parts))
    return np.concatenate(parts, axis=0)


def _lup_paths(N, t_max, rec, seed, ids, want):
    rng = RngStream(seed, ids)
    state = np.zeros((len(ids), N, N), dtype=complex)
    out = []
    for t in range(1, t_max + 1):
        state = state + sample_lue_batch(N, 0, 1.0, rng)
        if t in rec:
            out.append(want(state))
    return np.stack(out, axis=1)


def simulate_lup_eigenvalues(
    N: int,
    t_max: int,
    record_times: Sequence[int],
    n_traj: int,
    seed: int,
    stream_offset: int = 0,
    workers: int = 1,
) -> np.ndarray:
    """Ascending eigenvalues of many independent paths, shape ``(n_traj, len(record_times), N)``.

    Path ``i`` uses stream id ``stream_offset + i``.
    """
    t_max, rec = _check_times(t_max, record_times)

    def run(a, b):
        ids = np.arange(stream_offset + a, stream_offset + b)
        return _lup_paths(N, t_max, rec, seed, ids, jacobi_eigh)

    return chunked_map(run, n_traj, workers=workers)


def simulate_lup_traces(N, t_max, record_times, n_traj, seed, stream_offset=0, workers=1) -> np.ndarray:
    """Traces ``tr L(t)`` of many paths, shape ``(n_traj, len(record_times))``."""
    t_max, rec = _check_times(t_max, record_times)

    def run(a, b):
        ids = np.arange(stream_offset + a, stream_offset + b)
        return _lup_paths(N, t_max, rec, seed, ids, lambda m: np.trace(m, axis1=1, axis2=2).real)

    return chunked_map(run, n_traj, workers=workers)


def characteristic_function_lue(eigs_T: Sequence[float], N: int, a: float, b: float) -> complex:
    """``prod_j (1 - i t_j / b)^{-(N+a)}`` over the eigenvalues ``t_j`` of ``T``."""
    t = np.asarray(eigs_T, dtype=float)
    if t.shape != (N,):
        raise ValueError(f"expected {N} eigenvalues of T, got shape {t.shape}")
    return complex(np.exp(-(N + a) * np.sum(np.log(1.0 - 1j * t / b))))


def empirical_characteristic(samples, T) -> tuple[complex, complex]:
    """Sample mean of ``exp(i tr(X T))`` and its standard error.

    The error is returned as ``complex(se_real, se_imag)``: the standard errors
    of the real and imaginary parts separately.
    """
    x = np.asarray([np.asarray(s) for s in samples]) if isinstance(samples, (list, tuple)) else np.asarray(samples)
    if x.ndim == 2:
        x = x[None]
    t = np.asarray(T, dtype=complex)
    if x.shape[0] == 0:
        raise ValueError("need at least one sample")
    if x.shape[1:] != t.shape:
        raise ValueError(f"dimension mismatch: samples {x.shape[1:]} vs T {t.shape}")
    phase = np.einsum("bij,ji->b", x, t).real
    z = np.exp(1j * phase)
    n = len(z)
    mean = complex(z.mean())
    if n < 2:
        return mean, 0j
    se = complex(z.real.std(ddof=1) / np.sqrt(n), z.imag.std(ddof=1) / np.sqrt(n))
    return mean, se


def sample_sum_pairs(N: int, a: int, a2: int, b: float, rng: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """Batched ``(X + Y, R)`` with ``X ~ LUE(a,b)``, ``Y ~ LUE(a2,b)``, ``R ~ LUE(a+a2+N, b)``."""
    x = sample_lue_batch(N, a, b, rng)
    y = sample_lue_batch(N, a2, b, rng)
    ref = sample_lue_batch(N, a + a2 + N, b, rng)
    return x + y, ref


def sample_sum_pair(N: int, a: int, a2: int, b: float, rng: RngStream) -> tuple[HermitianMatrix, HermitianMatrix]:
    """One independent sum ``LUE(a) + LUE(a2)`` and one fresh ``LUE(a+a2+N)`` reference."""
    if rng.n_streams is not None:
        raise TypeError("sample_sum_pair takes a single stream; use sample_sum_pairs")
    s, r = sample_sum_pairs(N, a, a2, b, rng)
    return HermitianMatrix(s), HermitianMatrix(r)
