"""Monte-Carlo soundness checks of the threshold hierarchy.

Draws random admissible states for a threshold kind, evaluates their
coherence, and counts violations of the reported threshold.  A sound
threshold admits no violations beyond the fixed slack; the closest approach
is reported as evidence that the admissible family actually crowds the
threshold rather than sitting far below it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import FockPair, sdf_amplitude_raw
from .thresholds import (ALPHA_BOUND, DEFAULT_MAX_FOCK, XI_BOUND,
                         ThresholdKind, threshold)

#: samples counting as violations must exceed threshold by this slack
VIOLATION_SLACK = 1e-3

#: coherent-state energy scale floor for the classical sampler
_MIN_ENERGY_SCALE = 1.0


@dataclass(frozen=True)
class McReport:
    kind: ThresholdKind
    pair: FockPair
    samples: int
    seed: int
    max_observed: float
    threshold: float
    violations: int
    closest_approach: float
    margin_histogram: tuple[tuple[float, float, int], ...]

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.name, "pair": [self.pair.m, self.pair.n],
            "samples": self.samples, "seed": self.seed,
            "max_observed": self.max_observed, "threshold": self.threshold,
            "violations": self.violations,
            "closest_approach": self.closest_approach,
            "margin_histogram": [
                {"lo": lo, "hi": hi, "count": c}
                for lo, hi, c in self.margin_histogram],
        }


def _sample_coherences(kind: ThresholdKind, pair: FockPair, samples: int,
                       rng: np.random.Generator) -> np.ndarray:
    """Coherences of random pure extreme points of the admissible family."""
    m, n = pair.m, pair.n
    if kind == ThresholdKind.CLASSICAL:
        # exponential energy distribution concentrated near the optimum scale
        scale = max(_MIN_ENERGY_SCALE, 0.5 * (m + n))
        amag = np.sqrt(rng.exponential(scale=scale, size=samples))
        am = sdf_amplitude_raw(m, 0, 0.0, 0.0, amag, 0.0)
        an = sdf_amplitude_raw(n, 0, 0.0, 0.0, amag, 0.0)
        return 2.0 * np.abs(am * np.conj(an))

    r = rng.uniform(0.0, XI_BOUND, size=samples)
    th = rng.uniform(0.0, 2.0 * math.pi, size=samples)
    amag = rng.uniform(0.0, ALPHA_BOUND, size=samples)

    if kind == ThresholdKind.GAUSSIAN_MIN:
        ks = np.zeros(samples, dtype=int)
    elif kind == ThresholdKind.GAUSSIAN_INTRINSIC:
        ks = rng.integers(0, DEFAULT_MAX_FOCK + 1, size=samples)
    elif kind == ThresholdKind.GENUINE_N:
        d = pair.n
        u = np.stack([sdf_amplitude_raw(m, j, r, th, amag, 0.0) for j in range(d)])
        v = np.stack([sdf_amplitude_raw(n, j, r, th, amag, 0.0) for j in range(d)])
        # Haar-random core states on the complex d-sphere
        c = rng.normal(size=(d, samples)) + 1j * rng.normal(size=(d, samples))
        c /= np.sqrt(np.sum(np.abs(c) ** 2, axis=0))
        return 2.0 * np.abs(np.sum(u * c, axis=0) * np.conj(np.sum(v * c, axis=0)))
    else:
        raise ValueError(f"unknown kind {kind!r}")

    out = np.empty(samples)
    for k in np.unique(ks):
        sel = ks == k
        am = sdf_amplitude_raw(m, int(k), r[sel], th[sel], amag[sel], 0.0)
        an = sdf_amplitude_raw(n, int(k), r[sel], th[sel], amag[sel], 0.0)
        out[sel] = 2.0 * np.abs(am * np.conj(an))
    return out


def mc_verify(kind: ThresholdKind, pair: FockPair, samples: int, seed: int,
              max_fock: int = DEFAULT_MAX_FOCK, n_bins: int = 20) -> McReport:
    """Sample the admissible family and count threshold violations.

    Deterministic in ``(kind, pair, samples, seed)``: the same call returns a
    bit-identical report.
    """
    if samples < 1000:
        raise ValueError("need at least 1e3 samples for a meaningful report")
    thr = threshold(kind, pair, max_fock=max_fock).value
    rng = np.random.default_rng(seed)
    coh = _sample_coherences(kind, pair, samples, rng)

    margins = thr - coh
    violations = int(np.sum(coh > thr + VIOLATION_SLACK))
    edges = np.linspace(0.0, thr, n_bins + 1)
    counts, _ = np.histogram(np.clip(margins, 0.0, thr), bins=edges)
    hist = tuple((float(edges[i]), float(edges[i + 1]), int(counts[i]))
                 for i in range(n_bins))
    return McReport(kind=kind, pair=pair, samples=samples, seed=seed,
                    max_observed=float(np.max(coh)), threshold=thr,
                    violations=violations,
                    closest_approach=float(np.min(margins)),
                    margin_histogram=hist)
