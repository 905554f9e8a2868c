"""Experiment drivers: purity sweeps, collapse runs, phase-space comparison,
environment decoherence, and the classical estimator commands.

Scheduling is deterministic. Sweep cells run in config order, initial-state
replicas are evolved as one batched array, and every reduction (state means,
Gram sums, histogram fills) happens in a fixed order, so identical config +
seed reproduces each output byte. Per-purpose RNG streams are derived as
``default_rng([seed, stream, *value_tags])`` where the tags are the cell's
physical values scaled to integers (``round(value * 1e6)``), never sweep
positions: a cell's results do not depend on which sweep contains it.

Manifests list every written file with its byte count (and row count for
CSVs). Wall-clock timing lives under the single top-level ``timing`` key so
determinism checks can drop it; everything else in the manifest is a pure
function of config + seed.
"""

from __future__ import annotations

import math
import os
import time
import warnings
from pathlib import Path

import numpy as np

from . import emit
from .classical import (
    NoChaoticSeaError,
    draw_chaotic_points,
    evolve_ensemble,
    histogram,
    lyapunov_exponent,
    lyapunov_exponent_separation,
    sample_gaussian_ensemble,
    wrap,
)
from .config import ConfigError, ExperimentConfig, config_as_dict
from .observables import (
    PuritySeries,
    ReducedDensity,
    correspondence_distance,
    husimi,
    kernel_smooth,
    purity_from_state,
    wigner,
)
from .theory import (
    GAMMA_OVER_EPS_SQ,
    InsufficientDecayError,
    SemiclassicalParams,
    classify_regime,
    fit_decay,
    g_correlator,
    gamma_from_correlator,
    onset_time,
    predict_rate,
)
from .torus import (
    CouplingParams,
    GaussianSpec,
    RotorParams,
    TorusGrid,
    make_gaussian,
    two_particle_plan,
)

OUTPUT_ROOT_ENV = "ROTORPAIR_OUTPUT_ROOT"

# One comparison time for the phase-space study: after five kicks the
# uncoupled quantum moments already deviate from the classical ensemble
# while the coupled runs still track it, which is the effect under test.
COMPARE_KICKS = 5

ENV_MIN_SEPARATION_SIGMAS = 6.0
ENV_MAX_OVERLAP = 1e-6

# RNG stream tags (see module docstring for the derivation scheme)
_STREAM_CENTERS1 = 1
_STREAM_CENTERS2 = 2
_STREAM_LYAPUNOV = 3
_STREAM_GAMMA = 4
_STREAM_ENV = 5
_STREAM_CLASSICAL = 6
_STREAM_CORRELATOR = 7


class RegimeRefusalError(RuntimeError):
    """Requested run is outside the regime the experiment is defined for."""


class ResourceRefusalError(RuntimeError):
    """Run would exceed the configured memory budget; carries the estimate."""

    def __init__(self, required_bytes: int, budget_bytes: int):
        self.required_bytes = int(required_bytes)
        self.budget_bytes = int(budget_bytes)
        super().__init__(
            f"run needs ~{required_bytes / 1e6:.0f} MB but the budget is "
            f"{budget_bytes / 1e6:.0f} MB; raise run.memory_budget_mb "
            "or shrink the grids"
        )


def _tag(value: float) -> int:
    return int(round(float(value) * 1_000_000))


def _stream(cfg: ExperimentConfig, stream: int, *values: float):
    return np.random.default_rng([cfg.seed, stream, *(_tag(v) for v in values)])


def resolve_output_dir(cfg: ExperimentConfig, output_root: str | None = None) -> Path:
    """Config output_dir, optionally re-rooted by arg or ROTORPAIR_OUTPUT_ROOT."""
    root = output_root if output_root is not None else os.environ.get(OUTPUT_ROOT_ENV)
    out = Path(root) / cfg.output_dir if root else Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require_memory(required_bytes: float, cfg: ExperimentConfig) -> None:
    budget = cfg.memory_budget_mb * 1_000_000
    if required_bytes > budget:
        raise ResourceRefusalError(int(required_bytes), budget)


def _record_output(outputs: list, out_dir: Path, name: str, rows: int | None = None) -> None:
    entry = {"path": name, "bytes": os.path.getsize(out_dir / name)}
    if rows is not None:
        entry["rows"] = rows
    outputs.append(entry)


def _pairs(cfg: ExperimentConfig) -> list[tuple[float, float]]:
    if len(cfg.k1) != len(cfg.k2):
        raise ConfigError(
            f"experiment.k1 and experiment.k2 must pair up ({len(cfg.k1)} vs {len(cfg.k2)} values)"
        )
    return list(zip(cfg.k1, cfg.k2))


def _grids(cfg: ExperimentConfig, n1: int | None = None, n2: int | None = None):
    g1 = TorusGrid(n1 or cfg.n1, cfg.x_offset, cfg.p_offset)
    g2 = TorusGrid(n2 or cfg.n2, cfg.x_offset, cfg.p_offset)
    return g1, g2


def _lyapunov_table(cfg: ExperimentConfig, ks) -> dict:
    table = {}
    for k in sorted(set(float(k) for k in ks)):
        est = lyapunov_exponent(
            k, cfg.lyap_samples, cfg.lyap_steps, seed=[cfg.seed, _STREAM_LYAPUNOV, _tag(k)]
        )
        table[k] = est
    return table


def _lyapunov_records(table: dict) -> dict:
    return {
        repr(k): {
            "lam": est.lam,
            "std_error": est.std_error,
            "n_samples": est.n_samples,
            "n_steps": est.n_steps,
            "n_excluded": est.n_excluded,
        }
        for k, est in table.items()
    }


def _simulate_cell(cfg: ExperimentConfig, k_pair: tuple[float, float], eps: float,
                   n_kicks: int | None = None) -> PuritySeries:
    """Batched purity evolution for one (K1, K2, eps) cell."""
    kicks = cfg.n_kicks if n_kicks is None else n_kicks
    g1, g2 = _grids(cfg)
    sigma1 = cfg.sigma_scale * math.sqrt(g1.hbar_eff)
    sigma2 = cfg.sigma_scale * math.sqrt(g2.hbar_eff)
    m = cfg.n_initial_states
    x1, p1 = draw_chaotic_points(k_pair[0], m, _stream(cfg, _STREAM_CENTERS1, k_pair[0], eps))
    x2, p2 = draw_chaotic_points(k_pair[1], m, _stream(cfg, _STREAM_CENTERS2, k_pair[1], eps))
    state_bytes = m * cfg.n1 * cfg.n2 * 16
    _require_memory(3 * state_bytes + 3 * cfg.n1 * cfg.n2 * 16, cfg)
    states = np.stack(
        [
            np.outer(
                make_gaussian(g1, GaussianSpec(float(a), float(b), sigma1)).amplitudes,
                make_gaussian(g2, GaussianSpec(float(c), float(d), sigma2)).amplitudes,
            )
            for a, b, c, d in zip(x1, p1, x2, p2)
        ]
    )
    plan = two_particle_plan(
        g1, g2, RotorParams(k_pair[0]), RotorParams(k_pair[1]),
        CouplingParams(eps, cfg.phase_offset),
    )
    pur = np.empty((kicks + 1, m))
    pur[0] = 1.0
    for t in range(1, kicks + 1):
        states = plan.apply(states)
        pur[t] = [purity_from_state(a) for a in states]
    mean = np.minimum(pur.mean(axis=1), 1.0)
    if m > 1:
        se = pur.std(axis=1, ddof=1) / math.sqrt(m)
    else:
        se = np.zeros(kicks + 1)
    return PuritySeries(
        times=np.arange(kicks + 1), values=mean, stderr=se,
        n1=cfg.n1, n2=cfg.n2, k1=k_pair[0], k2=k_pair[1], eps=eps,
        seed=cfg.seed, n_initial_states=m,
    )


def _build_params(cfg: ExperimentConfig, lam_table: dict, k_pair: tuple[float, float],
                  eps: float) -> SemiclassicalParams:
    lam1 = lam_table[float(k_pair[0])].lam
    lam2 = lam_table[float(k_pair[1])].lam
    g1, g2 = _grids(cfg)
    sigma1 = cfg.sigma_scale * math.sqrt(g1.hbar_eff)
    sigma2 = cfg.sigma_scale * math.sqrt(g2.hbar_eff)
    if eps > 0.0:
        g_sum = max(
            g_correlator(
                k_pair[0], k_pair[1], eps, cfg.phase_offset,
                n_traj=cfg.gamma_pairs,
                seed=[cfg.seed, _STREAM_CORRELATOR, _tag(k_pair[0]), _tag(k_pair[1]), _tag(eps)],
            ),
            0.0,
        )
        tau1 = onset_time(lam1, sigma1, g_sum)
        tau2 = onset_time(lam2, sigma2, g_sum)
        # G <= 0 means the channel never activates; keep manifests JSON-safe
        if not math.isfinite(tau1):
            tau1 = 0.0
        if not math.isfinite(tau2):
            tau2 = 0.0
    else:
        tau1 = tau2 = 0.0
    return SemiclassicalParams(
        lambda1=lam1, lambda2=lam2, gamma=GAMMA_OVER_EPS_SQ * eps * eps,
        n1=cfg.n1, n2=cfg.n2, tau1=tau1, tau2=tau2,
    )


def _fit_with_fallback(series: PuritySeries, params: SemiclassicalParams):
    """Default onset window first; onset-free retry when saturation leaves < 4 points."""
    try:
        return fit_decay(series, params), False, None
    except InsufficientDecayError:
        pass
    except ValueError as err:
        # too-short series: the retry cannot add points, record and move on
        return None, False, str(err)
    try:
        return fit_decay(series, params, tau_onset=0.0), True, None
    except InsufficientDecayError as err:
        return None, True, str(err)


def _fit_record(fit, fallback: bool, fit_error: str | None) -> dict:
    rec = {"onset_fallback": fallback}
    if fit is None:
        rec["error"] = fit_error
    else:
        rec.update(
            rate=fit.rate, rate_error=fit.rate_error,
            window=[int(fit.window[0]), int(fit.window[1])],
            saturation=fit.saturation,
        )
    return rec


def _regime_record(report) -> dict:
    return {
        "gamma": report.gamma,
        "delta2": report.delta2,
        "b2": report.b2,
        "classification": report.classification,
    }


def _params_record(params: SemiclassicalParams) -> dict:
    return {
        "lambda1": params.lambda1, "lambda2": params.lambda2,
        "gamma": params.gamma, "tau1": params.tau1, "tau2": params.tau2,
        "tauE1": params.tauE1, "tauE2": params.tauE2,
    }


def run_purity_sweep(cfg: ExperimentConfig, output_root: str | None = None) -> dict:
    """P(t) per (K, eps) cell with decay fits, regime reports, CSV + manifest."""
    t0 = time.time()
    out = resolve_output_dir(cfg, output_root)
    pairs = _pairs(cfg)
    valid_pairs = [p for p in pairs if min(p) >= 1.0]
    lam_table = _lyapunov_table(cfg, [k for pair in valid_pairs for k in pair])
    outputs: list = []
    cells = []
    for k_pair in pairs:
        for eps in cfg.eps:
            cell: dict = {"k1": k_pair[0], "k2": k_pair[1], "eps": eps}
            if min(k_pair) < 1.0:
                cell["error"] = (
                    f"no chaotic sea at K={min(k_pair):g} < 1; "
                    "island exclusion cannot run, cell aborted"
                )
                cells.append(cell)
                continue
            params = _build_params(cfg, lam_table, k_pair, eps)
            report = classify_regime(
                eps, cfg.n1, cfg.n2, lambda1=params.lambda1, lambda2=params.lambda2
            )
            cell["regime"] = _regime_record(report)
            cell["params"] = _params_record(params)
            if report.classification in ("below-validity", "above-validity"):
                warnings.warn(
                    f"cell K={k_pair}, eps={eps} is {report.classification}",
                    RuntimeWarning, stacklevel=2,
                )
            try:
                series = _simulate_cell(cfg, k_pair, eps)
            except NoChaoticSeaError as err:
                cell["error"] = str(err)
                cells.append(cell)
                continue
            name = f"purity_K{k_pair[0]:g}_K{k_pair[1]:g}_eps{eps:g}.csv"
            rows = emit.write_purity_csv(out / name, series)
            _record_output(outputs, out, name, rows)
            fit, fallback, fit_error = _fit_with_fallback(series, params)
            cell["csv"] = name
            cell["fit"] = _fit_record(fit, fallback, fit_error)
            cell["predicted_rate"] = predict_rate(params)
            cell["saturation_last5_mean"] = float(np.mean(series.values[-5:]))
            cells.append(cell)
    manifest = {
        "kind": "purity-sweep",
        "code_version": _code_version(),
        "config": config_as_dict(cfg),
        "rng_scheme": _RNG_SCHEME,
        "lambda": _lyapunov_records(lam_table),
        "cells": cells,
        "outputs": outputs,
        "timing": {"wall_seconds": time.time() - t0},
    }
    emit.write_manifest(out / "manifest.json", manifest)
    return manifest


def _decade_mask(values: np.ndarray, psat: float):
    return (values > 3.0 * psat) & (values < 30.0 * psat)


def _collapse_statistics(curves: list[dict], psat: float) -> dict:
    """Pooled slope and binned spread of the rescaled curves.

    Restricted to the decade above the fit floor (P in (3, 30) x P_sat),
    where every curve is past onset and not yet saturated. Spread bins are
    0.5 wide in rescaled time and only bins fed by at least two different
    curves count, so a single curve reports spread 0.
    """
    pooled_t, pooled_ln, pooled_id = [], [], []
    for i, curve in enumerate(curves):
        mask = _decade_mask(curve["values"], psat)
        pooled_t.append(curve["rescaled_times"][mask])
        pooled_ln.append(np.log(curve["values"][mask]))
        pooled_id.append(np.full(int(mask.sum()), i))
    t = np.concatenate(pooled_t)
    y = np.concatenate(pooled_ln)
    ids = np.concatenate(pooled_id)
    if len(t) < 2:
        return {"slope": None, "slope_error": None, "spread": 0.0, "n_points": int(len(t))}
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    dof = len(t) - 2
    var_t = float(np.sum((t - t.mean()) ** 2))
    slope_err = float(np.sqrt(np.sum(resid**2) / dof / var_t)) if dof > 0 else 0.0
    spread = 0.0
    edges = np.arange(t.min(), t.max() + 0.5, 0.5)
    for lo in edges:
        sel = (t >= lo) & (t < lo + 0.5)
        if len(np.unique(ids[sel])) >= 2:
            spread = max(spread, float(y[sel].max() - y[sel].min()))
    return {
        "slope": float(slope),
        "slope_error": slope_err,
        "spread": spread,
        "n_points": int(len(t)),
    }


def run_lyapunov_collapse(cfg: ExperimentConfig, output_root: str | None = None) -> dict:
    """Rescaled-time purity curves across K plus master-curve statistics."""
    t0 = time.time()
    if len(cfg.eps) != 1:
        raise ConfigError("lyapunov-collapse expects a single eps value")
    eps = cfg.eps[0]
    out = resolve_output_dir(cfg, output_root)
    pairs = _pairs(cfg)
    lam_table = _lyapunov_table(cfg, [k for pair in pairs for k in pair])
    gamma = GAMMA_OVER_EPS_SQ * eps * eps
    lam_max = max(est.lam for est in lam_table.values())
    if not 2.0 * gamma > lam_max:
        report = classify_regime(eps, cfg.n1, cfg.n2)
        raise RegimeRefusalError(
            f"eps={eps} is not Lyapunov-saturated: 2*Gamma = {2 * gamma:.3g} "
            f"<= max lambda = {lam_max:.3g} (regime: {report.classification})"
        )
    psat = 1.0 / cfg.n1 + 1.0 / cfg.n2
    outputs: list = []
    cells = []
    curves = []
    for k_pair in pairs:
        params = _build_params(cfg, lam_table, k_pair, eps)
        lam_r = min(params.lambda1, params.lambda2)
        tau_r = params.tau1 if params.lambda1 <= params.lambda2 else params.tau2
        series = _simulate_cell(cfg, k_pair, eps)
        rescaled = lam_r * (series.times.astype(float) - tau_r)
        name = f"purity_K{k_pair[0]:g}_K{k_pair[1]:g}_eps{eps:g}.csv"
        rows = emit.write_purity_csv(out / name, series)
        _record_output(outputs, out, name, rows)
        rname = f"rescaled_K{k_pair[0]:g}_K{k_pair[1]:g}_eps{eps:g}.csv"
        rrows = emit.write_rescaled_csv(out / rname, rescaled, series.values, series.stderr)
        _record_output(outputs, out, rname, rrows)
        fit, fallback, fit_error = _fit_with_fallback(series, params)
        sat5 = float(np.mean(series.values[-5:]))
        cells.append(
            {
                "k1": k_pair[0], "k2": k_pair[1], "eps": eps,
                "csv": name, "rescaled_csv": rname,
                "lambda_rescale": lam_r, "tau_rescale": tau_r,
                "params": _params_record(params),
                "fit": _fit_record(fit, fallback, fit_error),
                "saturation_last5_mean": sat5,
                "saturation_ratio": sat5 / psat,
            }
        )
        curves.append(
            {"rescaled_times": rescaled, "values": series.values, "k_pair": k_pair}
        )
    master = _collapse_statistics(curves, psat)
    manifest = {
        "kind": "lyapunov-collapse",
        "code_version": _code_version(),
        "config": config_as_dict(cfg),
        "rng_scheme": _RNG_SCHEME,
        "lambda": _lyapunov_records(lam_table),
        "cells": cells,
        "master": master,
        "saturation_target": psat,
        "outputs": outputs,
        "timing": {"wall_seconds": time.time() - t0},
    }
    emit.write_manifest(out / "manifest.json", manifest)
    return manifest


def _phase_space_memory_bytes(n_large: int) -> int:
    # plan (3 arrays) + state and FFT workspace (~3x) + reduced density +
    # Wigner build (complex N x 2N plus the real 2N x 2N output)
    return n_large * n_large * (6 * 16 + 16 + 2 * 16) + (2 * n_large) ** 2 * 8


def run_wigner_compare(cfg: ExperimentConfig, output_root: str | None = None) -> dict:
    """Classical vs quantum phase-space study after five kicks.

    Three quantum runs (eps=0 and eps=cfg.eps[0] at N=n1, eps=cfg.eps[0] at
    N=n_quantum_large) reduced to particle 1, rendered as Husimi grids and
    compared against kernel-smoothed classical histograms started from the
    matching initial packet; raw Wigner grids are emitted for figures.
    """
    t0 = time.time()
    out = resolve_output_dir(cfg, output_root)
    eps = cfg.eps[0]
    k1, k2 = cfg.k1[0], cfg.k2[0]
    n_small, n_large = cfg.n1, cfg.n_quantum_large
    _require_memory(_phase_space_memory_bytes(max(n_small, n_large)), cfg)
    res = cfg.husimi_resolution
    # one particle-2 packet reused across runs so only (N, eps) varies
    c2x, c2p = draw_chaotic_points(k2, 1, _stream(cfg, _STREAM_CENTERS2, k2))
    center2 = (float(c2x[0]), float(c2p[0]))

    classical_refs = {}
    classical_hists = {}
    for n in sorted({n_small, n_large}):
        hbar = 2.0 * math.pi / n
        sigma = cfg.sigma_scale * math.sqrt(hbar)
        ens = sample_gaussian_ensemble(
            GaussianSpec(1.0, 2.0, sigma), cfg.n_classical,
            seed=[cfg.seed, _STREAM_CLASSICAL, _tag(n)], hbar_eff=hbar,
        )
        ens = evolve_ensemble(ens, k1, COMPARE_KICKS)
        hist = histogram(ens, res, res)
        classical_hists[n] = hist
        smooth_sigma = math.sqrt(hbar)
        classical_refs[n] = kernel_smooth(
            hist, hist.x_centers, hist.p_centers, smooth_sigma, hbar
        )

    outputs: list = []
    runs = []
    distance_rows = []
    grid_name = f"grid_classical_N{max(n_small, n_large)}.lewg"
    emit.write_grid(out / grid_name, classical_hists[max(n_small, n_large)].values, "classical")
    _record_output(outputs, out, grid_name)
    for n, run_eps in ((n_small, 0.0), (n_small, eps), (n_large, eps)):
        g1, g2 = _grids(cfg, n1=n, n2=n)
        sigma = cfg.sigma_scale * math.sqrt(g1.hbar_eff)
        psi1 = make_gaussian(g1, GaussianSpec(1.0, 2.0, sigma))
        psi2 = make_gaussian(g2, GaussianSpec(center2[0], center2[1], sigma))
        plan = two_particle_plan(
            g1, g2, RotorParams(k1), RotorParams(k2), CouplingParams(run_eps, cfg.phase_offset)
        )
        state = np.outer(psi1.amplitudes, psi2.amplitudes)
        for _ in range(COMPARE_KICKS):
            state = plan.apply(state)
        rho1 = ReducedDensity(state @ state.conj().T)
        hus = husimi(rho1, g1, resolution=res)
        dist = correspondence_distance(hus, classical_refs[n])
        label = f"husimi_N{n}_eps{run_eps:g}"
        distance_rows.append((label, n, run_eps, dist))
        wig = wigner(rho1, g1)
        wname = f"grid_wigner_N{n}_eps{run_eps:g}.lewg"
        emit.write_grid(out / wname, wig.values, "wigner")
        _record_output(outputs, out, wname)
        runs.append(
            {
                "n": n, "eps": run_eps, "distance": dist, "label": label,
                "sigma_packet": sigma, "sigma_smooth": math.sqrt(g1.hbar_eff),
                "wigner_grid": wname,
            }
        )
    rows = emit.write_distances_csv(out / "distances.csv", distance_rows)
    _record_output(outputs, out, "distances.csv", rows)
    manifest = {
        "kind": "wigner-compare",
        "code_version": _code_version(),
        "config": config_as_dict(cfg),
        "rng_scheme": _RNG_SCHEME,
        "compare_kicks": COMPARE_KICKS,
        "center1": [1.0, 2.0],
        "center2": list(center2),
        "runs": runs,
        "reduced_large_n": n_large < 2048,
        "memory_estimate_bytes": _phase_space_memory_bytes(max(n_small, n_large)),
        "outputs": outputs,
        "timing": {"wall_seconds": time.time() - t0},
    }
    emit.write_manifest(out / "manifest.json", manifest)
    return manifest


def _place_env_packets(cfg: ExperimentConfig, grid: TorusGrid, sigma: float):
    """Well-separated environment packets; shrinks the count if needed."""
    n_request = cfg.n_env_states
    if n_request < 1:
        raise ConfigError("experiment.n_env_states must be >= 1")
    if n_request < 4:
        warnings.warn(
            f"n_env_states={n_request} < 4 gives a sparse environment ensemble",
            RuntimeWarning, stacklevel=2,
        )
    rng = _stream(cfg, _STREAM_ENV)
    n = n_request
    while n >= 1:
        centers: list[tuple[float, float]] = []
        packets: list[np.ndarray] = []
        tries = 0
        while len(packets) < n and tries < 200 * n:
            tries += 1
            cx = float(rng.uniform(-math.pi, math.pi))
            cp = float(rng.uniform(-math.pi, math.pi))
            cand = make_gaussian(grid, GaussianSpec(cx, cp, sigma)).amplitudes
            ok = True
            for (ox, op), packet in zip(centers, packets):
                d = math.hypot(float(wrap(cx - ox)), float(wrap(cp - op)))
                if d < ENV_MIN_SEPARATION_SIGMAS * sigma or abs(np.vdot(packet, cand)) >= ENV_MAX_OVERLAP:
                    ok = False
                    break
            if ok:
                centers.append((cx, cp))
                packets.append(cand)
        if len(packets) == n:
            if n < n_request:
                warnings.warn(
                    f"could only place {n} nonoverlapping environment packets "
                    f"(requested {n_request})",
                    RuntimeWarning, stacklevel=2,
                )
            return centers, packets
        n -= 1
    raise RuntimeError("failed to place even one environment packet")


def run_env_decoherence(cfg: ExperimentConfig, output_root: str | None = None) -> dict:
    """Purity of the environment-averaged reduced density vs kick count.

    The environment is an equal-weight mixture of well-separated packets in
    the fast rotor; each product state evolves separately and rho_1 is
    averaged before taking the purity, so the decay saturates at 1/N1
    instead of the pure-state 2/N1.
    """
    t0 = time.time()
    k1, k2 = cfg.k1[0], cfg.k2[0]
    if not k2 > k1:
        raise RegimeRefusalError(
            f"environment run needs a fast environment rotor: K2={k2:g} <= K1={k1:g}"
        )
    if k2 < 10.0 * k1:
        warnings.warn(
            f"K2={k2:g} is less than 10x K1={k1:g}; timescale separation is weak",
            RuntimeWarning, stacklevel=2,
        )
    eps = cfg.eps[0]
    out = resolve_output_dir(cfg, output_root)
    g1, g2 = _grids(cfg)
    sigma1 = cfg.sigma_scale * math.sqrt(g1.hbar_eff)
    sigma2 = cfg.sigma_scale * math.sqrt(g2.hbar_eff)
    centers, packets = _place_env_packets(cfg, g2, sigma2)
    n_env = len(packets)
    _require_memory((4 * n_env + 1) * cfg.n1 * cfg.n2 * 16, cfg)
    lam_table = _lyapunov_table(cfg, [k1, k2])
    plan = two_particle_plan(
        g1, g2, RotorParams(k1), RotorParams(k2), CouplingParams(eps, cfg.phase_offset)
    )
    m = cfg.n_initial_states
    x1, p1 = draw_chaotic_points(k1, m, _stream(cfg, _STREAM_CENTERS1, k1, eps))
    pur = np.empty((cfg.n_kicks + 1, m))
    pur[0] = 1.0
    env_block = np.stack(packets)
    for i in range(m):
        psi1 = make_gaussian(g1, GaussianSpec(float(x1[i]), float(p1[i]), sigma1)).amplitudes
        states = psi1[None, :, None] * env_block[:, None, :]
        for t in range(1, cfg.n_kicks + 1):
            states = plan.apply(states)
            # rho_avg = M M^H / n with M the branches side by side, so
            # Tr[rho_avg^2] = ||M^H M||_F^2 / n^2; one branch reduces to the
            # pure pipeline's purity computation verbatim
            stacked = states.transpose(1, 0, 2).reshape(cfg.n1, n_env * cfg.n2)
            pur[t, i] = purity_from_state(stacked) / (n_env * n_env)
    mean = np.minimum(pur.mean(axis=1), 1.0)
    se = pur.std(axis=1, ddof=1) / math.sqrt(m) if m > 1 else np.zeros(cfg.n_kicks + 1)
    series = PuritySeries(
        times=np.arange(cfg.n_kicks + 1), values=mean, stderr=se,
        n1=cfg.n1, n2=cfg.n2, k1=k1, k2=k2, eps=eps, seed=cfg.seed, n_initial_states=m,
    )
    outputs: list = []
    name = f"purity_env_K{k1:g}_K{k2:g}_eps{eps:g}.csv"
    rows = emit.write_purity_csv(out / name, series)
    _record_output(outputs, out, name, rows)
    # Averaged-density model: single lambda_1 channel, no onset shift. The
    # standard fit window applies; the mixture's own floor (1/N1 instead of
    # the pure-state 2/N) is reported separately as saturation_ratio_inv_n1.
    params = SemiclassicalParams(
        lambda1=lam_table[float(k1)].lam, lambda2=lam_table[float(k2)].lam,
        gamma=GAMMA_OVER_EPS_SQ * eps * eps, n1=cfg.n1, n2=cfg.n2,
    )
    fit, fallback, fit_error = _fit_with_fallback(series, params)
    sat5 = float(np.mean(series.values[-5:]))
    manifest = {
        "kind": "env-decoherence",
        "code_version": _code_version(),
        "config": config_as_dict(cfg),
        "rng_scheme": _RNG_SCHEME,
        "lambda": _lyapunov_records(lam_table),
        "env_centers": [list(c) for c in centers],
        "psi1_centers": [[float(a), float(b)] for a, b in zip(x1, p1)],
        "n_env_requested": cfg.n_env_states,
        "n_env_placed": n_env,
        "params": _params_record(params),
        "fit": _fit_record(fit, fallback, fit_error),
        "csv": name,
        "saturation_last5_mean": sat5,
        "saturation_ratio_inv_n1": sat5 * cfg.n1,
        "outputs": outputs,
        "timing": {"wall_seconds": time.time() - t0},
    }
    emit.write_manifest(out / "manifest.json", manifest)
    return manifest


def run_gamma_estimate(cfg: ExperimentConfig, output_root: str | None = None) -> dict:
    """Golden-rule rate from the classical coupling correlator."""
    t0 = time.time()
    out = resolve_output_dir(cfg, output_root)
    k1, k2 = cfg.k1[0], cfg.k2[0]
    eps = cfg.eps[0]
    gamma_hat = gamma_from_correlator(
        k1, k2, eps, cfg.phase_offset, n_traj=cfg.gamma_pairs,
        seed=[cfg.seed, _STREAM_GAMMA, _tag(k1), _tag(k2), _tag(eps)],
    )
    g_hat = g_correlator(
        k1, k2, eps, cfg.phase_offset, n_traj=cfg.gamma_pairs,
        seed=[cfg.seed, _STREAM_CORRELATOR, _tag(k1), _tag(k2), _tag(eps)],
    )
    manifest = {
        "kind": "gamma-estimate",
        "code_version": _code_version(),
        "config": config_as_dict(cfg),
        "rng_scheme": _RNG_SCHEME,
        "gamma_hat": gamma_hat,
        "gamma_over_eps_sq": (gamma_hat / (eps * eps)) if eps > 0 else None,
        "g_hat": g_hat,
        "n_pairs": cfg.gamma_pairs,
        "outputs": [],
        "timing": {"wall_seconds": time.time() - t0},
    }
    emit.write_manifest(out / "manifest.json", manifest)
    return manifest


def run_lyapunov_estimate(cfg: ExperimentConfig, output_root: str | None = None) -> dict:
    """Benettin and separation estimates for every configured kick strength."""
    t0 = time.time()
    out = resolve_output_dir(cfg, output_root)
    rows = []
    for k in cfg.k1:
        est = lyapunov_exponent(
            k, cfg.lyap_samples, cfg.lyap_steps, seed=[cfg.seed, _STREAM_LYAPUNOV, _tag(k)]
        )
        sep = lyapunov_exponent_separation(
            k, cfg.lyap_samples, min(cfg.lyap_steps, 200),
            seed=[cfg.seed, _STREAM_LYAPUNOV, _tag(k), 1],
        )
        rows.append(
            {
                "k": k,
                "benettin": est.lam, "benettin_error": est.std_error,
                "separation": sep.lam, "separation_error": sep.std_error,
                "formula_log_half_k": math.log(k / 2.0) if k > 2.0 else None,
                "n_excluded": est.n_excluded,
            }
        )
    manifest = {
        "kind": "lyapunov-estimate",
        "code_version": _code_version(),
        "config": config_as_dict(cfg),
        "rng_scheme": _RNG_SCHEME,
        "estimates": rows,
        "outputs": [],
        "timing": {"wall_seconds": time.time() - t0},
    }
    emit.write_manifest(out / "manifest.json", manifest)
    return manifest


_RNG_SCHEME = (
    "default_rng([seed, stream, round(value*1e6) tags]); streams: "
    "centers1=1, centers2=2, lyapunov=3, gamma=4, env=5, classical=6, correlator=7"
)


def _code_version() -> str:
    from . import __version__

    return __version__


RUNNERS = {
    "purity-sweep": run_purity_sweep,
    "lyapunov-collapse": run_lyapunov_collapse,
    "wigner-compare": run_wigner_compare,
    "env-decoherence": run_env_decoherence,
    "gamma-estimate": run_gamma_estimate,
    "lyapunov-estimate": run_lyapunov_estimate,
}
