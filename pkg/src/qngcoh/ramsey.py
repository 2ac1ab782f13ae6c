"""Pulse-level simulation of the spin-oscillator Ramsey interferometer.

A single trapped ion: electronic levels {g, e, shelf} tensored with a
truncated oscillator mode.  Carrier pulses rotate g <-> e at fixed phonon
number; blue/red sidebands exchange an electronic flip against a phonon with
the usual sqrt(k+1) / sqrt(k) couplings (first order in the Lamb-Dicke
expansion); shelving swaps the ground row with the shelf row to park
population out of the way of ladder pulses.

Pulses are instantaneous for channel purposes: dephasing, heating and an
optional constant detuning act only during the free-precession delay.
Composite-pulse imperfections enter through per-pulse area jitter and an
optional config-driven contrast penalty (finite electronic coherence,
shelving losses).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import nnls

from . import channels
from .channels import TruncationError, dephasing_factors, thermalize_matrix
from .fock import DensityMatrix, FockPair
from .thresholds import DEFAULT_MAX_FOCK, ThresholdKind

ROW_G, ROW_E, ROW_SHELF = 0, 1, 2

#: mapping-condition scan: largest half-cycle index tried and the
#: near-integer tolerance on the return-branch cycle count
MAPPING_J_MAX = 200
MAPPING_TOL = 0.02


class FitError(RuntimeError):
    """Fringe fit is degenerate (too few distinct phases or singular fit)."""


class MappingConditionError(RuntimeError):
    """No admissible sideband mapping pulse below the half-cycle cap."""


class ConditioningError(RuntimeError):
    """Population fit design matrix is too ill-conditioned to invert."""


class PulseKind(enum.Enum):
    CARRIER = "carrier"
    BSB = "bsb"
    RSB = "rsb"
    SHELVE = "shelve"
    UNSHELVE = "unshelve"


@dataclass(frozen=True)
class PulseSpec:
    """One laser pulse: kind, bare area (radians) and optical phase.

    The effective rotation angle on a sideband rung k is ``area * sqrt(k+1)``;
    ``detuning`` is reserved (pulses are instantaneous in this model) and must
    stay zero.
    """

    kind: PulseKind
    area: float
    phase: float = 0.0
    detuning: float = 0.0

    def __post_init__(self) -> None:
        if self.area < 0:
            raise ValueError("pulse area must be non-negative")

    def inverse(self) -> "PulseSpec":
        if self.kind == PulseKind.SHELVE:
            return replace(self, kind=PulseKind.UNSHELVE)
        if self.kind == PulseKind.UNSHELVE:
            return replace(self, kind=PulseKind.SHELVE)
        return replace(self, phase=self.phase + math.pi)


@dataclass(frozen=True)
class NoiseConfig:
    """Imperfection budget for one Ramsey run.

    ``pulse_duration`` and ``shelving_contrast_loss`` are config inputs, not
    predictions: the protocol specifies pulse areas, not wall-clock lengths,
    so electronic-coherence and shelving penalties must be supplied by the
    user as effective numbers.
    """

    initial_thermal_nbar: float = 0.0
    heating_rate: float = 0.0          # phonons / s
    dephasing_rate: float = 0.0        # phase variance / s
    pulse_error: float = 0.0           # fractional rms area error per pulse
    electronic_coherence_time: float = math.inf   # seconds
    pulse_duration: float = 0.0        # seconds of electronic superposition per pulse
    shelving_contrast_loss: float = 0.0  # per shelve/unshelve pair
    delay_detuning: float = 0.0        # rad/s during the delay

    def __post_init__(self) -> None:
        for name in ("initial_thermal_nbar", "heating_rate", "dephasing_rate",
                     "pulse_error", "electronic_coherence_time",
                     "pulse_duration", "shelving_contrast_loss"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class SpinOscState:
    """Pure state on {g, e, shelf} x Fock, stored as a (3, dim) array."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 2 or amps.shape[0] != 3:
            raise ValueError(f"expected shape (3, dim), got {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[1]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @classmethod
    def ground(cls, dim: int) -> "SpinOscState":
        amps = np.zeros((3, dim), dtype=complex)
        amps[ROW_G, 0] = 1.0
        return cls(amps)


@dataclass
class RamseyFringe:
    """Scanned-phase interference record and its fitted contrast."""

    points: list[tuple[float, float, int | None]]
    contrast: float
    contrast_err: float
    fit_phase_offset: float


@dataclass
class RamseySequence:
    """Preparation pulses, their analysis mirror, and scan-pulse bookkeeping."""

    pair: FockPair
    prep: list[PulseSpec]
    analysis: list[PulseSpec]
    scan_index: int
    meta: dict = field(default_factory=dict)

    def analysis_with(self, scan_phase: float) -> list[PulseSpec]:
        pulses = list(self.analysis)
        p = pulses[self.scan_index]
        pulses[self.scan_index] = replace(p, phase=p.phase + scan_phase)
        return pulses

    @property
    def top_level(self) -> int:
        return self.meta.get("top_level", self.pair.n)

    def shelve_pairs(self) -> int:
        kinds = [p.kind for p in self.prep + self.analysis]
        return (kinds.count(PulseKind.SHELVE)
                + kinds.count(PulseKind.UNSHELVE)) // 2


# ---------------------------------------------------------------------------
# pulse action
# ---------------------------------------------------------------------------


def _rotate(amps: np.ndarray, pulse: PulseSpec) -> np.ndarray:
    """Apply one pulse to an array of shape (3, dim, ...) of state columns."""
    dim = amps.shape[1]
    out = amps.copy()
    phase = np.exp(1j * pulse.phase)

    if pulse.kind == PulseKind.CARRIER:
        theta = pulse.area
        c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
        g, e = amps[ROW_G], amps[ROW_E]
        out[ROW_G] = c * g - 1j * phase * s * e
        out[ROW_E] = -1j * np.conj(phase) * s * g + c * e
        return out

    if pulse.kind in (PulseKind.SHELVE, PulseKind.UNSHELVE):
        ph = phase if pulse.kind == PulseKind.SHELVE else -phase
        theta = pulse.area
        c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
        g, a = amps[ROW_G], amps[ROW_SHELF]
        out[ROW_G] = c * g - 1j * ph * s * a
        out[ROW_SHELF] = -1j * np.conj(ph) * s * g + c * a
        return out

    # sidebands: rung k = 1..dim-1 couples {g,k} <-> {e,k-1} (red) or
    # {g,k-1} <-> {e,k} (blue) with strength sqrt(k)
    k = np.arange(1, dim)
    theta = pulse.area * np.sqrt(k)
    shape = (dim - 1,) + (1,) * (amps.ndim - 2)
    c = np.cos(theta / 2.0).reshape(shape)
    s = np.sin(theta / 2.0).reshape(shape)
    if pulse.kind == PulseKind.BSB:
        g, e = amps[ROW_G, :-1], amps[ROW_E, 1:]
        out[ROW_G, :-1] = c * g - 1j * phase * s * e
        out[ROW_E, 1:] = -1j * np.conj(phase) * s * g + c * e
    else:  # RSB
        g, e = amps[ROW_G, 1:], amps[ROW_E, :-1]
        out[ROW_G, 1:] = c * g - 1j * phase * s * e
        out[ROW_E, :-1] = -1j * np.conj(phase) * s * g + c * e
    return out


def apply_pulse(state: SpinOscState, pulse: PulseSpec) -> SpinOscState:
    """Apply one pulse to a pure state; norm is preserved exactly.

    Raises ``TruncationError`` when a sideband would push population past the
    truncation edge (blue sideband with the top ground level occupied, red
    sideband with the top excited level occupied).
    """
    if pulse.detuning != 0.0:
        raise ValueError("pulse detuning is reserved; pulses are instantaneous "
                         "in this model (use NoiseConfig.delay_detuning)")
    amps = state.amplitudes
    edge = None
    if pulse.kind == PulseKind.BSB:
        edge = abs(amps[ROW_G, -1]) ** 2
    elif pulse.kind == PulseKind.RSB:
        edge = abs(amps[ROW_E, -1]) ** 2
    if edge is not None and edge > 1e-12:
        raise TruncationError(
            f"{pulse.kind.value} pulse with population {edge:.2e} at the "
            "truncation edge; increase the dimension")
    return SpinOscState(_rotate(amps[:, :, None], pulse)[:, :, 0])


def pulse_unitary(pulse: PulseSpec, dim: int) -> np.ndarray:
    """Dense (3 dim x 3 dim) unitary of one pulse, for density-matrix runs."""
    if pulse.detuning != 0.0:
        raise ValueError("pulse detuning is reserved; pulses are instantaneous "
                         "in this model (use NoiseConfig.delay_detuning)")
    eye = np.eye(3 * dim, dtype=complex).reshape(3, dim, 3 * dim)
    return _rotate(eye, pulse).reshape(3 * dim, 3 * dim)


# ---------------------------------------------------------------------------
# sequence construction
# ---------------------------------------------------------------------------


def _climb(level_from: int, level_to: int, row: int) -> tuple[list[PulseSpec], int]:
    """Pi pulses walking one joint-ladder branch up by one phonon per pulse."""
    pulses = []
    for s in range(level_from, level_to):
        area = math.pi / math.sqrt(s + 1)
        if row == ROW_E:
            pulses.append(PulseSpec(PulseKind.RSB, area))
            row = ROW_G
        else:
            pulses.append(PulseSpec(PulseKind.BSB, area))
            row = ROW_E
    return pulses, row


def build_sequence_0n(n: int, phase_offset: float = 0.0) -> RamseySequence:
    """Composite effective pi/2 between |0> and |n>, and its analysis mirror.

    A blue-sideband pi/2 splits |g,0> into the spin-motional superposition;
    alternating red/blue pi pulses then climb the excited branch one phonon
    per pulse.  Above n = 2 the resting |g,0> branch is shelved around the
    ladder; an odd ladder parks the moving branch in |e,n> and a carrier pi
    (protected by the shelving) folds it back to the ground row.  The
    analysis half is the exact pulse-by-pulse inverse, with the scanned
    offset carried by the closing blue-sideband pi/2.
    """
    if not 1 <= n <= 8:
        raise ValueError(f"supported superposition range is 1 <= n <= 8, got {n}")
    prep: list[PulseSpec] = [PulseSpec(PulseKind.BSB, math.pi / 2.0)]
    shelved = n > 2
    if shelved:
        prep.append(PulseSpec(PulseKind.SHELVE, math.pi))
    ladder, row = _climb(1, n, ROW_E)
    prep.extend(ladder)
    if row == ROW_E and n > 1:
        prep.append(PulseSpec(PulseKind.CARRIER, math.pi))
    if shelved:
        prep.append(PulseSpec(PulseKind.UNSHELVE, math.pi))

    analysis = [p.inverse() for p in reversed(prep)]
    scan_index = len(analysis) - 1
    p = analysis[scan_index]
    analysis[scan_index] = replace(p, phase=p.phase + phase_offset)
    return RamseySequence(pair=FockPair(0, n), prep=prep, analysis=analysis,
                          scan_index=scan_index,
                          meta={"top_level": n, "shelved": shelved,
                                "prep_pulses": len(prep)})


def find_mapping_pulse(m: int, n: int, j_max: int = MAPPING_J_MAX,
                       tol: float = MAPPING_TOL) -> dict:
    """Smallest red-sideband mapping pulse transferring |e,n-1> -> |g,n>
    while returning the |g,m> spectator to itself.

    The moving rung (coupling sqrt(n)) must see an odd number ``2j+1`` of
    half cycles; the spectator rung (coupling sqrt(m)) then sees
    ``l = (2j+1) sqrt(m/n) / 2`` full cycles, which must land near an integer
    within ``tol``.  The two rungs are incommensurate in general, so j is
    scanned upward and the first admissible value kept.
    """
    if m == 0:
        return {"j": 0, "l": 0.0, "area": math.pi / math.sqrt(n),
                "return_cycle_error": 0.0}
    for j in range(j_max):
        l = (2 * j + 1) * math.sqrt(m / n) / 2.0
        err = abs(l - round(l))
        if err <= tol:
            return {"j": j, "l": l, "area": (2 * j + 1) * math.pi / math.sqrt(n),
                    "return_cycle_error": err}
    raise MappingConditionError(
        f"no admissible mapping pulse for pair ({m},{n}) below j = {j_max} "
        f"at tolerance {tol}")


def build_sequence_mn(m: int, n: int, phase_offset: float = 0.0) -> RamseySequence:
    """Ramsey sequence for a superposition of |m> and |n>, m >= 1.

    Sideband pi pulses prepare |g,m>; a carrier (|n-m| = 1) or blue-sideband
    (|n-m| = 2) pi/2 opens the interferometer; a red-sideband pulse
    satisfying the near-commensurate mapping condition transfers the excited
    branch to |g,n>, closing the preparation with a purely motional
    superposition.  The scanned offset rides on the analysis pi/2.
    """
    pair = FockPair(m, n)
    m, n = pair.m, pair.n
    delta = pair.delta
    if delta not in (1, 2):
        raise ValueError(f"supported level differences are 1 and 2, got {delta}")

    prep, row = _climb(0, m, ROW_G)
    if row == ROW_E:
        prep.append(PulseSpec(PulseKind.CARRIER, math.pi))

    if delta == 1:
        variant = "carrier"
        prep.append(PulseSpec(PulseKind.CARRIER, math.pi / 2.0))
    else:
        variant = "bsb"
        prep.append(PulseSpec(PulseKind.BSB, math.pi / (2.0 * math.sqrt(m + 1))))

    mapping = find_mapping_pulse(m, n)
    prep.append(PulseSpec(PulseKind.RSB, mapping["area"]))

    # detection composite: invert only the interferometer half (un-map, then
    # the closing pi/2).  Undoing the Fock preparation as well would scramble
    # the bright/dark ports, since those pi pulses are exact only on their
    # original rungs.
    analysis = [p.inverse() for p in reversed(prep[-2:])]
    scan_index = 1
    p = analysis[scan_index]
    analysis[scan_index] = replace(p, phase=p.phase + phase_offset)
    return RamseySequence(pair=pair, prep=prep, analysis=analysis,
                          scan_index=scan_index,
                          meta={"top_level": n, "variant": variant,
                                "mapping": mapping, "prep_pulses": len(prep)})


# ---------------------------------------------------------------------------
# running the interferometer
# ---------------------------------------------------------------------------


def thermal_spin_osc(nbar: float, dim: int) -> np.ndarray:
    """Thermal motional state in the electronic ground row, as a 3dim matrix."""
    rho = np.zeros((3 * dim, 3 * dim), dtype=complex)
    rho[:dim, :dim] = DensityMatrix.thermal(nbar, dim).matrix
    return rho


def _apply_unitaries(rho: np.ndarray, pulses: list[PulseSpec], dim: int,
                     jitter: np.ndarray | None) -> np.ndarray:
    for i, pulse in enumerate(pulses):
        if jitter is not None:
            pulse = replace(pulse, area=pulse.area * max(0.0, 1.0 + jitter[i]))
        if pulse.kind == PulseKind.BSB and abs(rho[dim - 1, dim - 1]) > 1e-12:
            raise TruncationError("blue sideband at the truncation edge")
        if pulse.kind == PulseKind.RSB and abs(rho[2 * dim - 1, 2 * dim - 1]) > 1e-12:
            raise TruncationError("red sideband at the truncation edge")
        u = pulse_unitary(pulse, dim)
        rho = u @ rho @ u.conj().T
    return rho


def _delay_channels(rho: np.ndarray, delay: float, noise: NoiseConfig,
                    dim: int) -> np.ndarray:
    """Free-precession channels applied block-wise on the motional indices."""
    if delay == 0.0:
        return rho
    factors = dephasing_factors(dim, noise.dephasing_rate * delay)
    if noise.delay_detuning != 0.0:
        k = np.arange(dim)
        factors = factors * np.exp(-1j * noise.delay_detuning * delay
                                   * (k[:, None] - k[None, :]))
    out = rho.copy()
    for s1 in range(3):
        for s2 in range(3):
            block = out[s1 * dim:(s1 + 1) * dim, s2 * dim:(s2 + 1) * dim]
            block *= factors
            if noise.heating_rate > 0.0:
                block[:] = thermalize_matrix(block, noise.heating_rate, delay)
    return out


def _excited_probability(rho: np.ndarray, dim: int) -> float:
    """Fluorescence-dark probability 1 - P(g); shelf counts as dark."""
    pg = float(np.real(np.trace(rho[:dim, :dim])))
    return min(1.0, max(0.0, 1.0 - pg))


def fit_fringe(phases: np.ndarray, pe: np.ndarray,
               shots: int | None = None) -> tuple[float, float, float]:
    """Least-squares fit of ``P(phi) = (1 + C cos(phi - phi0)) / 2``.

    Linear in (C cos phi0, C sin phi0); returns (contrast, standard error,
    phase offset).  With ``shots`` given, points are weighted by their known
    binomial variance and the error bar comes from that model; otherwise the
    error bar is residual-based.  Raises ``FitError`` for degenerate scans.
    """
    phases = np.asarray(phases, dtype=float)
    pe = np.asarray(pe, dtype=float)
    if len(np.unique(np.round(phases % (2 * math.pi), 12))) < 3:
        raise FitError("need at least 3 distinct scan phases")
    design = 0.5 * np.stack([np.cos(phases), np.sin(phases)], axis=1)
    y = pe - 0.5

    if shots is not None:
        p_safe = (pe * shots + 0.5) / (shots + 1.0)
        weights = shots / (p_safe * (1.0 - p_safe))
    else:
        weights = np.ones_like(pe)
    gram = design.T @ (weights[:, None] * design)
    if np.linalg.cond(gram) > 1e12:
        raise FitError("degenerate phase scan")
    rhs = design.T @ (weights * y)
    coef = np.linalg.solve(gram, rhs)
    a, b = coef
    contrast = math.hypot(a, b)
    offset = math.atan2(b, a)

    cov = np.linalg.inv(gram)
    if shots is None:
        resid = y - design @ coef
        dof = max(1, len(y) - 2)
        cov = cov * float(resid @ resid) / dof
    if contrast > 0:
        grad = np.array([a, b]) / contrast
        err = math.sqrt(max(0.0, grad @ cov @ grad))
    else:
        err = math.sqrt(max(0.0, float(np.trace(cov))))
    return contrast, err, offset


def run_ramsey(seq: RamseySequence, delay: float, noise: NoiseConfig,
               phases, shots: int | None = None, seed: int = 0,
               dim: int | None = None) -> RamseyFringe:
    """Simulate one full Ramsey fringe at a fixed delay.

    Thermal initialization, jittered preparation pulses, free-precession
    channels, then one analysis run per scan phase; the excited-state
    probability is fitted to a cosine fringe.  ``shots=None`` reads P_e
    exactly, otherwise binomial projection noise is added.
    """
    phases = np.asarray(list(phases), dtype=float)
    if phases.size == 0:
        raise ValueError("need a non-empty phase scan")
    if shots is not None and shots < 1:
        raise ValueError("shots must be positive (or None for exact readout)")
    if dim is None:
        dim = seq.top_level + 12 + math.ceil(8.0 * noise.heating_rate * delay)

    root = np.random.SeedSequence((seed, 0x52414D))
    children = root.spawn(phases.size + 1)
    rng_shots = np.random.default_rng(children[-1])

    n_prep = len(seq.prep)
    n_analysis = len(seq.analysis)
    jittered = noise.pulse_error > 0.0

    rho0 = thermal_spin_osc(noise.initial_thermal_nbar, dim)
    rho_stored = None
    if not jittered:
        rho_stored = _delay_channels(
            _apply_unitaries(rho0, seq.prep, dim, None), delay, noise, dim)

    penalty = 1.0
    if noise.pulse_duration > 0.0 and math.isfinite(noise.electronic_coherence_time):
        t_sup = noise.pulse_duration * (n_prep + n_analysis)
        penalty *= math.exp(-t_sup / noise.electronic_coherence_time)
    penalty *= (1.0 - noise.shelving_contrast_loss) ** seq.shelve_pairs()

    points = []
    pes = np.empty(phases.size)
    for i, phi in enumerate(phases):
        if jittered:
            rng = np.random.default_rng(children[i])
            jit = noise.pulse_error * rng.standard_normal(n_prep + n_analysis)
            rho = _apply_unitaries(rho0, seq.prep, dim, jit[:n_prep])
            rho = _delay_channels(rho, delay, noise, dim)
            rho = _apply_unitaries(rho, seq.analysis_with(phi), dim, jit[n_prep:])
        else:
            rho = _apply_unitaries(rho_stored, seq.analysis_with(phi), dim, None)
        pe = 0.5 + penalty * (_excited_probability(rho, dim) - 0.5)
        if shots is not None:
            pe = rng_shots.binomial(shots, pe) / shots
        pes[i] = pe
        points.append((float(phi), float(pe), shots))

    contrast, err, offset = fit_fringe(phases, pes, shots=shots)
    return RamseyFringe(points=points, contrast=min(1.0, max(0.0, contrast)),
                        contrast_err=err, fit_phase_offset=offset)


def prepared_state(seq: RamseySequence, noise: NoiseConfig,
                   dim: int | None = None) -> np.ndarray:
    """Density matrix right after the preparation half (no delay, no jitter)."""
    if dim is None:
        dim = seq.top_level + 12
    rho0 = thermal_spin_osc(noise.initial_thermal_nbar, dim)
    return _apply_unitaries(rho0, seq.prep, dim, None)


def motional_populations(rho: np.ndarray, dim: int) -> np.ndarray:
    """Phonon-number populations traced over the electronic rows."""
    diag = np.real(np.diagonal(rho))
    return diag[:dim] + diag[dim:2 * dim] + diag[2 * dim:]


# ---------------------------------------------------------------------------
# Rabi-oscillation population fitting
# ---------------------------------------------------------------------------


@dataclass
class PopulationFit:
    populations: np.ndarray
    residual: float
    condition_number: float
    degenerate: bool


def fit_populations(signal, carrier_rabi: float, eta: float, gamma0: float,
                    x_exp: float, n_max: int) -> PopulationFit:
    """Phonon distribution from ground-state Rabi oscillations.

    Non-negative least squares of
    ``P_g(t) = (1 + sum_n P(n) cos(Omega eta sqrt(n+1) t) e^{-gamma(n) t}) / 2``
    with ``gamma(n) = (n+1)^x gamma0``.  The recovered distribution is
    renormalized to unit sum; a near-zero recovered weight marks the fit
    degenerate (no oscillation information in the signal).
    """
    data = np.asarray(signal, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError("signal must be an (npts, 2) array of (time, P_g)")
    t, pg = data[:, 0], data[:, 1]
    if len(t) < 4 * n_max:
        raise ConditioningError(
            f"need at least {4 * n_max} samples for n_max = {n_max}")
    base_period = 2.0 * math.pi / (carrier_rabi * eta)
    if t.max() - t.min() < 2.0 * base_period:
        raise ConditioningError(
            "signal spans less than two Rabi periods; record a longer trace")

    ns = np.arange(n_max + 1)
    omega = carrier_rabi * eta * np.sqrt(ns + 1.0)
    gamma = gamma0 * (ns + 1.0) ** x_exp
    design = 0.5 * np.cos(np.outer(t, omega)) * np.exp(-np.outer(t, gamma))
    cond = float(np.linalg.cond(design))
    if cond > 1e8:
        raise ConditioningError(
            f"design matrix condition number {cond:.2e}; record a longer trace")

    coeffs, resid = nnls(design, pg - 0.5)
    total = float(coeffs.sum())
    degenerate = total < 0.05
    pops = coeffs / total if not degenerate else coeffs
    return PopulationFit(populations=pops, residual=float(resid),
                         condition_number=cond, degenerate=degenerate)


# ---------------------------------------------------------------------------
# decay scans
# ---------------------------------------------------------------------------


def decay_scan(pair: FockPair, delays, noise: NoiseConfig, kind: ThresholdKind,
               n_phases: int = 16, shots: int | None = None, seed: int = 0,
               dim: int | None = None, max_fock: int = DEFAULT_MAX_FOCK,
               fringe_sink=None) -> list[tuple[float, float, float]]:
    """Contrast and threshold depth versus Ramsey delay.

    Balanced |0>,|n> superpositions use the composite-ladder sequence, mixed
    pairs the mapping-pulse sequence.  Returns (delay, contrast, depth)
    tuples; depth is ``-inf`` once the contrast hits zero.  ``fringe_sink``,
    when given, receives ``(delay, fringe)`` for every completed point.
    """
    delays = list(delays)
    if any(t2 < t1 for t1, t2 in zip(delays, delays[1:])):
        raise ValueError("delays must be sorted ascending")
    if pair.m == 0:
        seq = build_sequence_0n(pair.n)
    else:
        seq = build_sequence_mn(pair.m, pair.n)
    phases = np.linspace(0.0, 2.0 * math.pi, n_phases, endpoint=False)
    out = []
    for i, delay in enumerate(delays):
        sub_seed = int(np.random.SeedSequence((seed, i)).generate_state(1)[0])
        fringe = run_ramsey(seq, delay, noise, phases, shots=shots,
                            seed=sub_seed, dim=dim)
        if fringe_sink is not None:
            fringe_sink(float(delay), fringe)
        c = fringe.contrast
        if c > 0.0:
            d = channels.depth(c, pair, kind, max_fock=max_fock).depth
        else:
            d = float("-inf")
        out.append((float(delay), c, d))
    return out
