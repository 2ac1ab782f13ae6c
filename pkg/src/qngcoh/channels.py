"""Decoherence channels and the dephasing depth of a certified coherence.

Two reservoir couplings matter for a trapped-ion oscillator near the ground
state: pure phase diffusion, which multiplies each off-diagonal element by
``exp(-Gamma (j-k)^2 / 2)``, and amplitude thermalization in the
infinite-temperature limit, modelled as a Lindblad pair of raising and
lowering jumps with equal rates calibrated so the mean phonon number grows
linearly at the configured heating rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .fock import DensityMatrix, FockPair, ideal_superposition
from .thresholds import DEFAULT_MAX_FOCK, ThresholdKind, threshold

#: completely-positive integration step cap for thermalization
MAX_THERMAL_STEP = 1e-5


class TruncationError(RuntimeError):
    """Heating pushed population into the truncation guard band."""


@dataclass(frozen=True)
class DephasingParams:
    """Accumulated phase variance Gamma = <phi^2> of the diffusion."""

    gamma: float

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise ValueError("phase variance must be non-negative")


@dataclass(frozen=True)
class HeatingParams:
    rate: float      # phonons per second
    duration: float  # seconds

    def __post_init__(self) -> None:
        if self.rate < 0 or self.duration < 0:
            raise ValueError("heating rate and duration must be non-negative")


@dataclass(frozen=True)
class DepthResult:
    pair: FockPair
    kind: ThresholdKind
    depth: float
    threshold: float
    measured: float

    @property
    def certified(self) -> bool:
        return self.depth > 0.0


# ---------------------------------------------------------------------------
# pure dephasing
# ---------------------------------------------------------------------------


def dephasing_factors(dim: int, gamma: float) -> np.ndarray:
    """Element-wise damping matrix ``exp(-Gamma (j-k)^2 / 2)``."""
    k = np.arange(dim)
    offsets = k[:, None] - k[None, :]
    return np.exp(-0.5 * gamma * offsets.astype(float) ** 2)


def dephase_matrix(mat: np.ndarray, gamma: float) -> np.ndarray:
    return mat * dephasing_factors(mat.shape[0], gamma)


def dephase(rho: DensityMatrix, p: DephasingParams) -> DensityMatrix:
    """Phase-diffusion channel; diagonal untouched, coherences damped by
    ``exp(-Gamma (j-k)^2 / 2)``."""
    return DensityMatrix(dephase_matrix(rho.matrix, p.gamma))


# ---------------------------------------------------------------------------
# thermalization (infinite-temperature amplitude reservoir)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def _offset_generator(dim: int, offset: int) -> np.ndarray:
    """Tridiagonal generator of one (j-k)=offset diagonal under the
    equal-rate raising/lowering reservoir at unit rate.

    The reservoir couples only elements of equal index offset, so each
    diagonal evolves under its own small linear system:
    ``dx_i = sqrt((i+q+1)(i+1)) x_{i+1} + sqrt((i+q) i) x_{i-1}
    - (2i + q + 1) x_i``.  Built from the truncated ladder operators, so the
    top level has no upward loss channel and the map preserves trace exactly
    (the tail guard in :func:`thermalize` polices the physical validity).
    """
    size = dim - offset

    def up_weight(level: int) -> float:
        # diag of a a^+ with the truncated raising operator
        return level + 1.0 if level < dim - 1 else 0.0

    gen = np.zeros((size, size))
    for i in range(size):
        j = i + offset
        gen[i, i] = -0.5 * (j + i) - 0.5 * (up_weight(j) + up_weight(i))
        if i + 1 < size and j + 1 < dim:
            gen[i, i + 1] = math.sqrt((j + 1) * (i + 1))
        if i > 0:
            gen[i, i - 1] = math.sqrt(j * i)
    return gen


def thermalize_matrix(mat: np.ndarray, rate: float, duration: float,
                      max_step: float = MAX_THERMAL_STEP) -> np.ndarray:
    """Evolve an operator matrix under the infinite-temperature reservoir.

    The reservoir couples only matrix elements of equal index offset, so each
    diagonal propagates under its own small generator.  Completely-positive
    propagation composed from fixed steps of at most ``max_step``; each step
    is the exact exponential of the per-diagonal generators, so halving the
    step is a no-op (covered by tests) and the calibration ``d<n>/dt = rate``
    holds to solver precision.  Hermiticity is not assumed (the Ramsey
    simulator feeds spin-block slices through here), only preserved.
    """
    dim = mat.shape[0]
    if rate == 0.0 or duration == 0.0:
        return mat.copy()
    n_steps = max(1, math.ceil(duration / max_step))
    dt = duration / n_steps
    out = np.zeros_like(mat, dtype=complex)
    idx_all = np.arange(dim)
    for q in range(dim):
        step = expm(_offset_generator(dim, q) * (rate * dt))
        prop = np.linalg.matrix_power(step, n_steps)
        idx = idx_all[: dim - q]
        out[idx + q, idx] = prop @ np.diagonal(mat, offset=-q).astype(complex)
        if q:
            out[idx, idx + q] = prop @ np.diagonal(mat, offset=q).astype(complex)
    return out


def thermalize(rho: DensityMatrix, h: HeatingParams,
               max_step: float = MAX_THERMAL_STEP,
               tail_tol: float = 1e-6) -> DensityMatrix:
    """Heating channel with mean-phonon growth ``d<n>/dt`` equal to ``h.rate``.

    Raises ``TruncationError`` when the evolved population in the top
    truncation levels exceeds ``tail_tol``.
    """
    out = thermalize_matrix(rho.matrix, h.rate, h.duration, max_step=max_step)
    if h.rate * h.duration > 0.0:
        dim = out.shape[0]
        guard = min(8, max(2, dim // 8))
        tail = float(np.real(np.trace(out[dim - guard:, dim - guard:])))
        if tail > tail_tol:
            raise TruncationError(
                f"population {tail:.3e} in the top {guard} levels after "
                "heating; increase the truncation dimension")
    return DensityMatrix(out)


def mean_phonons(rho: DensityMatrix | np.ndarray) -> float:
    mat = rho.matrix if isinstance(rho, DensityMatrix) else rho
    return float(np.real(np.sum(np.arange(mat.shape[0]) * np.diagonal(mat))))


# ---------------------------------------------------------------------------
# dephasing depth
# ---------------------------------------------------------------------------


def depth_value(measured: float, threshold_value: float, delta: int) -> float:
    """Phase variance that dephases ``measured`` down to the threshold:
    ``(2 / delta^2) ln(measured / threshold)``."""
    return (2.0 / delta ** 2) * math.log(measured / threshold_value)


def depth(measured: float, pair: FockPair, kind: ThresholdKind,
          max_fock: int = DEFAULT_MAX_FOCK) -> DepthResult:
    """Dephasing depth of a measured coherence above a threshold kind.

    Negative values mean the coherence already sits below the threshold and
    is reported as not certified.
    """
    if not 0.0 < measured <= 1.0:
        raise ValueError(f"measured coherence must lie in (0, 1], got {measured}")
    thr = threshold(kind, pair, max_fock=max_fock).value
    return DepthResult(pair=pair, kind=kind,
                       depth=depth_value(measured, thr, pair.delta),
                       threshold=thr, measured=measured)


def thermal_depth_limit(pair: FockPair, h_rate: float, times, kind: ThresholdKind,
                        dim: int | None = None,
                        max_fock: int = DEFAULT_MAX_FOCK) -> list[tuple[float, float]]:
    """Depth reachable without any dephasing, limited by heating alone.

    Thermalizes the ideal balanced superposition for each requested time and
    converts the surviving coherence to a depth; an upper envelope for any
    experiment at the same heating rate.
    """
    times = list(times)
    if any(t2 < t1 for t1, t2 in zip(times, times[1:])):
        raise ValueError("times must be sorted ascending")
    if dim is None:
        dim = pair.n + 16 + int(math.ceil(4.0 * h_rate * (times[-1] if times else 0.0)))
    rho = ideal_superposition(pair, dim).density_matrix()
    thr = threshold(kind, pair, max_fock=max_fock).value
    out = []
    prev_t = 0.0
    mat = rho.matrix
    for t in times:
        mat = thermalize_matrix(mat, h_rate, t - prev_t)
        prev_t = t
        c = 2.0 * float(np.abs(mat[pair.m, pair.n]))
        d = depth_value(c, thr, pair.delta) if c > 0 else float("-inf")
        out.append((float(t), d))
    return out
