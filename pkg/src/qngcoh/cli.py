"""Command-line surface: thresholds, certification, simulation, MC soundness.

Every command writes machine-readable output (JSON for structured results,
CSV for curves) stamped with a run manifest: command, full parameter echo,
package version, seeds, wall time and truncation dimension.  Exit codes are
part of the contract so CI can gate on them:

* ``thresholds``: 0 ok, 1 usage error, 2 optimizer non-convergence
  (partial results are still written, with per-entry status);
* ``certify``: 0 some verdict true, 3 all false, 1 domain error,
  2 threshold failure;
* ``simulate``: 0 ok, 2 simulation error (failing delay identified);
* ``mc-verify``: 0 sound, 4 threshold violations (release blocker).
"""

from __future__ import annotations

import csv
import json
import math
import sys
import time
from pathlib import Path

import click
import numpy as np
import yaml

from . import __version__, fock
from .fock import FockPair
from .mc import mc_verify
from .optimize import NonConvergenceError
from .ramsey import NoiseConfig, decay_scan
from .thresholds import (KIND_NAMES, ORDERED_KINDS, certify, parse_kind,
                         threshold)


def _parse_pair(text: str) -> FockPair:
    parts = text.replace("(", "").replace(")", "").split(",")
    if len(parts) != 2:
        raise ValueError(f"pair must look like 'm,n', got {text!r}")
    return FockPair(int(parts[0]), int(parts[1]))


def _manifest(command: str, params: dict, t0: float, seeds=None,
              trunc_dim: int | None = None) -> dict:
    return {
        "command": command,
        "parameters": params,
        "tool_version": __version__,
        "seeds": seeds,
        "wall_time_s": round(time.monotonic() - t0, 3),
        "truncation_dim": trunc_dim if trunc_dim is not None else fock.DEFAULT_TRUNC,
    }


def _sanitize(obj):
    """Make numpy types and non-finite floats JSON-safe."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.ndarray):
        return _sanitize(obj.tolist())
    return obj


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_sanitize(payload), indent=1, sort_keys=True))


@click.group()
@click.version_option(version=__version__)
def main() -> None:
    """Quantum non-Gaussian coherence toolbox."""


@main.command("thresholds")
@click.option("--pair", "pairs", multiple=True,
              help="Fock pair 'm,n' (repeatable).")
@click.option("--kind", "kinds", multiple=True,
              type=click.Choice(sorted(KIND_NAMES.values())),
              help="Threshold kind (repeatable; default: all four).")
@click.option("--max-fock", default=10, show_default=True,
              help="Fock scan cap for the intrinsic threshold.")
@click.option("--out", type=click.Path(path_type=Path), required=True)
def cmd_thresholds(pairs, kinds, max_fock, out: Path) -> int:
    """Compute thresholds for the given pairs and write a JSON table."""
    t0 = time.monotonic()
    if not pairs:
        click.echo("usage error: provide at least one --pair m,n", err=True)
        sys.exit(1)
    try:
        pair_objs = [_parse_pair(p) for p in pairs]
    except ValueError as exc:
        click.echo(f"usage error: {exc}", err=True)
        sys.exit(1)
    kind_objs = [parse_kind(k) for k in kinds] if kinds else list(ORDERED_KINDS)

    results: dict = {}
    failed = False
    for pair in pair_objs:
        row: dict = {}
        for kind in kind_objs:
            try:
                res = threshold(kind, pair, max_fock=max_fock)
                entry = {"status": "ok", "value": res.value,
                         "argmax": {"xi_mag": res.argmax.xi_mag,
                                    "xi_phase": res.argmax.xi_phase,
                                    "alpha_mag": res.argmax.alpha_mag,
                                    "alpha_phase": res.argmax.alpha_phase}}
                if res.fock_index is not None:
                    entry["fock_index"] = res.fock_index
                if res.core_state is not None:
                    entry["core_state"] = {
                        "re": res.core_state.coeffs.real.tolist(),
                        "im": res.core_state.coeffs.imag.tolist()}
            except NonConvergenceError as exc:
                failed = True
                entry = {"status": "non-convergence", "error": str(exc)}
            row[KIND_NAMES[kind]] = entry
        results[str(pair)] = row

    payload = {"schema": "qngcoh/threshold-table/v1", "results": results,
               "manifest": _manifest("thresholds",
                                     {"pairs": [str(p) for p in pair_objs],
                                      "kinds": [KIND_NAMES[k] for k in kind_objs],
                                      "max_fock": max_fock}, t0)}
    _write_json(out, payload)
    sys.exit(2 if failed else 0)


@main.command("certify")
@click.option("--pair", required=True, help="Fock pair 'm,n'.")
@click.option("--measured", type=float, required=True)
@click.option("--uncertainty", type=float, default=0.0, show_default=True)
@click.option("--max-fock", default=10, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
def cmd_certify(pair, measured, uncertainty, max_fock, out: Path) -> int:
    """Certify a measured coherence against the full hierarchy."""
    t0 = time.monotonic()
    try:
        pair_obj = _parse_pair(pair)
        if not 0.0 <= measured <= 1.0 or uncertainty < 0.0:
            raise ValueError(
                f"measured must lie in [0,1] and uncertainty be >= 0, "
                f"got {measured}, {uncertainty}")
    except ValueError as exc:
        click.echo(f"domain error: {exc}", err=True)
        sys.exit(1)
    try:
        report = certify(pair_obj, measured, uncertainty, max_fock=max_fock)
    except NonConvergenceError as exc:
        click.echo(f"threshold failure: {exc}", err=True)
        sys.exit(2)

    payload = {
        "schema": "qngcoh/certification/v1",
        "pair": [pair_obj.m, pair_obj.n],
        "measured": measured,
        "uncertainty": uncertainty,
        "kinds": {
            KIND_NAMES[k]: {
                "threshold": report.thresholds[k],
                "margin": report.margins[k],
                "verdict": report.verdicts[k],
                "marginal": report.marginal[k],
                "depth": report.depths[k],
            } for k in ORDERED_KINDS},
        "manifest": _manifest("certify",
                              {"pair": str(pair_obj), "measured": measured,
                               "uncertainty": uncertainty,
                               "max_fock": max_fock}, t0),
    }
    _write_json(out, payload)
    sys.exit(0 if any(report.verdicts.values()) else 3)


def _noise_from_config(blob: dict) -> NoiseConfig:
    allowed = {"initial_thermal_nbar", "heating_rate", "dephasing_rate",
               "pulse_error", "electronic_coherence_time", "pulse_duration",
               "shelving_contrast_loss", "delay_detuning"}
    unknown = set(blob) - allowed
    if unknown:
        raise ValueError(f"unknown noise keys: {sorted(unknown)}")
    return NoiseConfig(**blob)


@main.command("simulate")
@click.option("--config", "config_path", type=click.Path(path_type=Path),
              required=True, help="YAML/JSON scenario file.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--trunc-dim", type=int, default=None,
              help="Override the oscillator truncation for the simulator.")
def cmd_simulate(config_path: Path, out_dir: Path, trunc_dim) -> int:
    """Run Ramsey decay scans from a scenario config.

    Config keys: ``pairs`` (list of [m, n]) or ``pair``, ``delays`` (seconds),
    ``noise`` (NoiseConfig fields), ``phases`` (scan points), ``shots``
    (null for exact readout), ``seed``, ``kind`` (depth threshold).
    """
    t0 = time.monotonic()
    try:
        blob = yaml.safe_load(config_path.read_text())
        raw_pairs = blob.get("pairs") or ([blob["pair"]] if "pair" in blob else None)
        if not raw_pairs:
            raise ValueError("config needs 'pair' or 'pairs'")
        pairs = [FockPair(int(p[0]), int(p[1])) for p in raw_pairs]
        delays = [float(t) for t in blob["delays"]]
        noise = _noise_from_config(blob.get("noise", {}))
        n_phases = int(blob.get("phases", 16))
        shots = blob.get("shots")
        shots = int(shots) if shots else None
        seed = int(blob.get("seed", 0))
        kind = parse_kind(blob.get("kind", "genuine"))
    except (KeyError, ValueError, TypeError, yaml.YAMLError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)

    out_dir.mkdir(parents=True, exist_ok=True)
    summary: dict = {}
    for pair in pairs:
        fringes: list = []

        def sink(delay: float, fringe) -> None:
            fringes.append((delay, fringe))

        try:
            scan = decay_scan(pair, delays, noise, kind, n_phases=n_phases,
                              shots=shots, seed=seed, dim=trunc_dim,
                              fringe_sink=sink)
        except Exception as exc:  # noqa: BLE001 - identify the failing delay
            done = len(fringes)
            failing = delays[done] if done < len(delays) else delays[-1]
            click.echo(f"simulation error for pair {pair} at delay "
                       f"{failing}: {exc}", err=True)
            sys.exit(2)

        tag = f"{pair.m}_{pair.n}"
        with open(out_dir / f"fringes_{tag}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["delay_s", "phase_rad", "p_excited"])
            for delay, fringe in fringes:
                for phi, pe, _ in fringe.points:
                    writer.writerow([delay, phi, pe])
        with open(out_dir / f"depth_{tag}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["delay_s", "contrast", "depth"])
            for delay, contrast, depth_val in scan:
                writer.writerow([delay, contrast,
                                 depth_val if math.isfinite(depth_val) else ""])
        summary[str(pair)] = [
            {"delay_s": d, "contrast": c,
             "depth": depth_val if math.isfinite(depth_val) else None,
             "certified": depth_val > 0.0}
            for d, c, depth_val in scan]

    payload = {"schema": "qngcoh/simulation-summary/v1", "scans": summary,
               "kind": KIND_NAMES[kind],
               "manifest": _manifest("simulate",
                                     {"config": str(config_path),
                                      "pairs": [str(p) for p in pairs],
                                      "delays": delays, "phases": n_phases,
                                      "shots": shots, "kind": KIND_NAMES[kind]},
                                     t0, seeds=[seed], trunc_dim=trunc_dim)}
    _write_json(out_dir / "summary.json", payload)
    sys.exit(0)


@main.command("mc-verify")
@click.option("--kind", required=True,
              type=click.Choice(sorted(KIND_NAMES.values())))
@click.option("--pair", required=True, help="Fock pair 'm,n'.")
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), required=True)
def cmd_mc_verify(kind, pair, samples, seed, out: Path) -> int:
    """Monte-Carlo soundness check of one threshold."""
    t0 = time.monotonic()
    try:
        pair_obj = _parse_pair(pair)
        report = mc_verify(parse_kind(kind), pair_obj, samples, seed)
    except ValueError as exc:
        click.echo(f"usage error: {exc}", err=True)
        sys.exit(1)

    payload = {"schema": "qngcoh/mc-report/v1", **report.as_dict(),
               "manifest": _manifest("mc-verify",
                                     {"kind": kind, "pair": str(pair_obj),
                                      "samples": samples}, t0, seeds=[seed])}
    _write_json(out, payload)
    if report.violations:
        click.echo(f"SOUNDNESS FAILURE: {report.violations} samples above "
                   f"threshold {report.threshold:.6f}", err=True)
        sys.exit(4)
    sys.exit(0)


if __name__ == "__main__":
    main()
