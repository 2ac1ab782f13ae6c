"""Derivative-free bounded maximization shared by all threshold searches.

Coarse grid seeding over the box, then Nelder-Mead refinement from the best
seeds.  Deterministic: no randomness enters the search, so identical specs
give identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize


class NonConvergenceError(RuntimeError):
    """Search failed to improve or to stabilize; carries the full trace."""

    def __init__(self, message: str, trace: dict):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class SearchSpec:
    """Box bounds and effort knobs for one maximization run."""

    bounds: tuple[tuple[float, float], ...]
    grid_density: int = 12
    n_starts: int = 16
    tol: float = 1e-9

    def __post_init__(self) -> None:
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        object.__setattr__(self, "bounds", bounds)
        for lo, hi in bounds:
            if not lo < hi:
                raise ValueError(f"invalid interval ({lo}, {hi})")
        if self.n_starts < 8:
            raise ValueError("need at least 8 refinement starts")
        if self.tol > 1e-6:
            raise ValueError("convergence tolerance must be <= 1e-6")
        if self.grid_density < 2:
            raise ValueError("grid density must be >= 2")

    @property
    def ndim(self) -> int:
        return len(self.bounds)


@dataclass
class MaximizeResult:
    argmax: np.ndarray
    value: float
    trace: dict = field(repr=False)

    @property
    def converged(self) -> bool:
        return bool(self.trace.get("converged", False))


def _grid_points(spec: SearchSpec) -> np.ndarray:
    axes = [np.linspace(lo, hi, spec.grid_density) for lo, hi in spec.bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def maximize(objective: Callable[[np.ndarray], float], spec: SearchSpec,
             batch_objective: Callable[[np.ndarray], np.ndarray] | None = None,
             extra_seeds: Sequence[np.ndarray] = ()) -> MaximizeResult:
    """Maximize ``objective`` over the box in ``spec``.

    ``batch_objective``, if given, evaluates a whole ``(npts, ndim)`` array at
    once and is used for the grid stage only.  ``extra_seeds`` are appended to
    the grid before start selection (e.g. analytically motivated points).

    Raises ``NonConvergenceError`` when no refinement start reaches the best
    grid seed; trace records per-start outcomes either way.
    """
    pts = _grid_points(spec)
    if len(extra_seeds) > 0:
        lo = np.array([b[0] for b in spec.bounds])
        hi = np.array([b[1] for b in spec.bounds])
        extras = np.clip(np.atleast_2d(np.asarray(extra_seeds, dtype=float)), lo, hi)
        pts = np.vstack([pts, extras])

    if batch_objective is not None:
        vals = np.asarray(batch_objective(pts), dtype=float)
    else:
        vals = np.array([objective(p) for p in pts], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("objective not finite on the search box")

    order = np.argsort(vals)[::-1]
    seeds = pts[order[: spec.n_starts]]
    grid_best = float(vals[order[0]])

    neg = lambda x: -float(objective(np.asarray(x, dtype=float)))
    starts = []
    for x0 in seeds:
        res = minimize(neg, x0, method="Nelder-Mead", bounds=spec.bounds,
                       options=dict(xatol=1e-10, fatol=1e-13,
                                    maxiter=4000, maxfev=8000))
        starts.append({
            "x0": np.asarray(x0, dtype=float),
            "x": np.asarray(res.x, dtype=float),
            "value": -float(res.fun),
            "nfev": int(res.nfev),
            "success": bool(res.success),
        })

    starts_sorted = sorted(starts, key=lambda s: s["value"], reverse=True)
    best = starts_sorted[0]
    runner_up = starts_sorted[1]["value"] if len(starts_sorted) > 1 else best["value"]
    converged = abs(best["value"] - runner_up) <= max(spec.tol, spec.tol * abs(best["value"]))

    trace = {
        "grid_points": int(len(pts)),
        "grid_best": grid_best,
        "starts": [{k: (v.tolist() if isinstance(v, np.ndarray) else v)
                    for k, v in s.items()} for s in starts_sorted],
        "best_value": best["value"],
        "runner_up_value": runner_up,
        "converged": converged,
    }

    if best["value"] < grid_best - 1e-12:
        raise NonConvergenceError(
            f"no refinement start reached the grid seed value {grid_best!r}", trace)

    lo = np.array([b[0] for b in spec.bounds])
    hi = np.array([b[1] for b in spec.bounds])
    argmax = np.clip(best["x"], lo, hi)
    # report the objective exactly as evaluated at the returned point
    value = float(objective(argmax))
    return MaximizeResult(argmax=argmax, value=value, trace=trace)
