"""Monte Carlo sweeps and CSV exports.

Work is split into chunks of frames.  Chunk ``c`` of grid point ``g`` always
draws from ``substream(seed, g, c)`` and chunks are reduced in index order, with
early stopping decided in that order too, so results do not depend on the
number of worker processes.
"""
from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from pathlib import Path

import numpy as np

from .bounds import sumrate_curves
from .channel import substream
from .codes.qam import real_to_complex
from .codes.wrapping import wrap
from .config import build_scenario, load_config
from .scheme import (InvariantViolation, estimator_variance, nomographic_postprocess,
                     nomographic_preprocess, socc_round)

BER_COLUMNS = ["noise_power_dB", "digital_ber", "digital_fer", "analog_mse", "analog_mse_theory",
               "frames", "bits", "bit_errors", "frame_errors"]


@lru_cache(maxsize=4)
def _scenario(cfg_json: str):
    return build_scenario(json.loads(cfg_json))


def _draw_sources(rng, K: int, L: int, B: int, mode: str):
    if mode == "uniform-sum":
        S = rng.uniform(-K, K, size=(B, L))
        return np.repeat((S / K)[:, None, :], K, axis=1)
    return rng.uniform(-1.0, 1.0, size=(B, K, L))


def simulate_chunk(cfg_json: str, grid_index: int, chunk: int, frames: int):
    """Simulate ``frames`` rounds of one chunk; returns additive counters."""
    sc = _scenario(cfg_json)
    cfg = sc.cfg
    noise_db = cfg["sweep"]["noise_power_dB"][grid_index]
    config = sc.socc_config(noise_db)
    rng = substream(cfg["seed"], grid_index, chunk)
    K, L = config.K_a, config.partition.L
    s = _draw_sources(rng, K, L, frames, cfg["analog"]["sources"])
    s_pre = np.stack([nomographic_preprocess(s[:, k], k, sc.fn) for k in range(K)], axis=1)
    msgs = [sc.code.random_messages(0, rng, frames)]
    res = socc_round(config, s_pre, msgs, rng)
    f_hat = nomographic_postprocess(res.estimates, sc.fn, K)
    sq = (f_hat - sc.fn(s)) ** 2
    return dict(frames=frames, frame_errors=int(res.frame_errors.sum()),
                bit_errors=int(res.bit_errors.sum()), bits=frames * sc.code.base.message_bits,
                sq_error=float(sq.sum()), values=int(sq.size))


def _theory_mse(sc, noise_db) -> float | str:
    if sc.fn.name not in ("sum", "weighted-sum"):
        return ""
    config = sc.socc_config(noise_db)
    v = estimator_variance(config)
    return float(np.mean(v) * (sc.fn.delta_max / 2.0) ** 2)


def run_ber_sweep(cfg, workers: int | None = None) -> list[dict]:
    """One row per noise level: BER, FER and analog MSE with frame/bit counts."""
    cfg = load_config(cfg)
    cfg_json = json.dumps(cfg, sort_keys=True)
    sc = _scenario(cfg_json)
    workers = workers or cfg["workers"]
    t = cfg["trials"]
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    rows = []
    try:
        for g, noise_db in enumerate(cfg["sweep"]["noise_power_dB"]):
            sizes = [min(t["batch"], t["max_frames"] - c * t["batch"])
                     for c in range(-(-t["max_frames"] // t["batch"]))]
            tot = dict(frames=0, frame_errors=0, bit_errors=0, bits=0, sq_error=0.0, values=0)
            c = 0
            done = False
            while c < len(sizes) and not done:
                wave = range(c, min(c + workers, len(sizes)))
                if pool is None:
                    results = [simulate_chunk(cfg_json, g, i, sizes[i]) for i in wave]
                else:
                    results = list(pool.map(simulate_chunk, [cfg_json] * len(wave),
                                            [g] * len(wave), list(wave),
                                            [sizes[i] for i in wave]))
                for r in results:
                    for k in tot:
                        tot[k] += r[k]
                    c += 1
                    if tot["frame_errors"] >= t["max_frame_errors"]:
                        done = True
                        break
            rows.append({
                "noise_power_dB": "-inf" if noise_db is None else float(noise_db),
                "digital_ber": tot["bit_errors"] / tot["bits"],
                "digital_fer": tot["frame_errors"] / tot["frames"],
                "analog_mse": tot["sq_error"] / tot["values"],
                "analog_mse_theory": _theory_mse(sc, noise_db),
                "frames": tot["frames"], "bits": tot["bits"],
                "bit_errors": tot["bit_errors"], "frame_errors": tot["frame_errors"],
            })
    finally:
        if pool is not None:
            pool.shutdown()
    return rows


def amplitude_ratios(cfg, codewords: int | None = None):
    """Per-codeword peak ratios (wrapped / base) and power ratios.

    Returns a dict with ``complex`` (ratio of largest complex-symbol moduli),
    ``real`` (ratio of largest real components) and ``power`` arrays.
    """
    cfg = load_config(cfg)
    sc = _scenario(json.dumps(cfg, sort_keys=True))
    h = cfg["histogram"]
    N = codewords or h["codewords"]
    base, part = sc.code.base, sc.code.partition
    out = {"complex": [], "real": [], "power": []}
    for c in range(-(-N // h["batch"])):
        B = min(h["batch"], N - c * h["batch"])
        rng = substream(cfg["seed"], 0, c)
        xb = base.encode_batch(0, base.random_messages(0, rng, B))
        xw = wrap(part, xb)
        out["real"].append(np.abs(xw).max(1) / np.abs(xb).max(1))
        out["complex"].append(np.abs(real_to_complex(xw)).max(1)
                              / np.abs(real_to_complex(xb)).max(1))
        out["power"].append((xw**2).sum(1) / (xb**2).sum(1))
    res = {k: np.concatenate(v) for k, v in out.items()}
    bound = part.peak_factor()
    if np.any(res["real"] > bound * (1 + 1e-12)):
        raise InvariantViolation(f"wrapped peak exceeds {bound:.6f} times the base peak")
    if np.any(np.abs(res["power"] - 1.0) > 1e-9):
        raise InvariantViolation("wrapping changed a codeword's total power")
    return res


def run_amplitude_histogram(cfg) -> list[dict]:
    """Histogram of complex peak-amplitude ratios: rows ``(bin_left, relative_frequency)``."""
    cfg = load_config(cfg)
    r = amplitude_ratios(cfg)["complex"]
    bw = cfg["histogram"]["bin_width"]
    lo = np.floor(r.min() / bw)
    hi = np.floor(r.max() / bw) + 1
    edges = np.arange(lo, hi + 1) * bw
    counts, _ = np.histogram(r, bins=edges)
    return [{"bin_left": round(float(e), 12), "relative_frequency": float(n / r.size)}
            for e, n in zip(edges[:-1], counts)]


def run_bounds_export(cfg) -> list[dict]:
    """Sum-rate bounds over ``K_d`` or ``beta`` with the scheme's MSE ``beta' sigma^2 / A_a^2``."""
    cfg = load_config(cfg)
    b = cfg["bounds"]
    P = 10 ** (b["power_dB"] / 10)
    A = b["amplitude_factor"] * np.sqrt(P)
    A_a = np.sqrt(10 ** (b["analog_amplitude_dB"] / 10))
    sigma2 = 10 ** (b["noise_power_dB"] / 10)
    K_d = np.atleast_1d(b["K_d"]).astype(int)
    betas = np.atleast_1d(b["beta"]).astype(float)
    if b["sweep"] == "K_d" and betas.size != 1 or b["sweep"] == "beta" and K_d.size != 1:
        raise ValueError("the non-swept parameter must be a single value")
    rows = sumrate_curves(K_d, betas, P, A, A_a, sigma2, K_a=b["K_a"], G=b["grid_points"])
    key = b["sweep"]
    out = []
    for kd, beta, ach, conv, triv in rows:
        if not ach <= conv + 1e-12 <= triv + 2e-12:
            raise InvariantViolation(f"bound ordering violated at K_d={kd}, beta={beta}")
        out.append({key: int(kd) if key == "K_d" else float(beta),
                    "achievable_sum_rate_nats": float(ach),
                    "converse_sum_rate_nats": float(conv),
                    "trivial_converse_nats": float(triv)})
    return out


def write_csv(rows: list[dict], path, columns=None) -> None:
    columns = columns or (list(rows[0]) if rows else [])
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: repr(float(v)) if isinstance(v, (float, np.floating)) else v
                        for k, v in row.items()})

