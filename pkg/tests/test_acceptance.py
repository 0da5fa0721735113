"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import time

import numpy as np
import pytest

from socc_lab.bounds import (sumrate_defaults, gaussian_capacity, nomographic_tail, socc_mse,
                             sumrate_curves, timeshare_mse, trivial_converse)
from socc_lab.capacity import ba_constrained_capacity
from socc_lab.channel import GaussianNoise, MiddletonClassA
from socc_lab.codes import BlockPartition, LdpcCode, LdpcQamCode, RandomCodebookCode, WrappedCode
from socc_lab.codes.wrapping import unwrap, wrap
from socc_lab.config import build_scenario, load_config
from socc_lab.experiments import amplitude_ratios, run_ber_sweep
from socc_lab.scheme import (SoccConfig, effective_analog_amplitude, fading_nomographic_round,
                             p_norm_function, socc_round, sum_function)
from socc_lab.zerosum import PEAK_FACTOR_BOUND, build_planemap, induction_bound, invariant_report


def test_criterion_01_planemap_algebra(acceptance):
    t0 = time.perf_counter()
    worst = dict(orth=0.0, colsum=0.0, margin=np.inf)
    for n in range(2, 513):
        rep = invariant_report(build_planemap(n))
        worst["orth"] = max(worst["orth"], rep["orthogonality_residual"])
        worst["colsum"] = max(worst["colsum"], rep["max_column_sum"])
        # the induction bound is attained for some n; compare at the criterion's tolerance
        limit = min(3.4143, induction_bound(n) + 1e-10)
        worst["margin"] = min(worst["margin"], limit - rep["inf_norm"])
    dt = time.perf_counter() - t0
    ok = worst["orth"] <= 1e-10 and worst["colsum"] <= 1e-10 and worst["margin"] >= 0 and dt < 10
    assert acceptance(1, ok, f"orth {worst['orth']:.1e}, colsum {worst['colsum']:.1e}, "
                             f"min slack {worst['margin']:.2e}, {dt:.2f} s")


def test_criterion_02_u10_norm(acceptance):
    t0 = time.perf_counter()
    build_planemap.cache_clear()
    v = invariant_report(build_planemap(10))["inf_norm"]
    dt = time.perf_counter() - t0
    assert acceptance(2, abs(v - 1.75) <= 0.01 and dt < 1, f"||U_10|| = {v:.6f}, {dt:.3f} s")


def _random_partition(rng, base_length):
    lengths, left = [], base_length
    while left > 0:
        m = int(min(rng.integers(2, 13), left + 1))
        lengths.append(m)
        left -= m - 1
    return BlockPartition(tuple(lengths))


def test_criterion_03_emulation_equivalence(acceptance):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    ldpc = LdpcCode.regular(96, 0.5, col_weight=3, seed=5)
    worst, same = 0.0, True
    for trial in range(100):
        if trial % 2:
            base = RandomCodebookCode(tuple(rng.integers(2, 6, size=rng.integers(1, 4))),
                                      n_code=int(rng.integers(6, 40)), amplitude=1.0,
                                      seed=int(rng.integers(1 << 31)))
        else:
            base = LdpcQamCode(ldpc, symbol_power=float(rng.uniform(0.5, 2.0)))
        part = _random_partition(rng, base.n_code)
        code = WrappedCode(base, part)
        B = 4
        msgs = [base.random_messages(k, rng, B) for k in range(base.num_users)]
        noise_var = float(rng.uniform(0.05, 1.0))
        noise = rng.normal(0.0, np.sqrt(noise_var), size=(B, part.n))
        bias = np.repeat(rng.normal(0.0, 3.0, size=(B, part.L)), part.lengths, axis=1)
        y_w = sum(code.encode_batch(k, msgs[k]) for k in range(base.num_users)) + bias + noise
        y_b = sum(base.encode_batch(k, msgs[k]) for k in range(base.num_users)) + unwrap(part, noise)
        worst = max(worst, float(np.abs(unwrap(part, y_w) - y_b).max()))
        dec_w = code.decode_batch(y_w, noise_var)
        dec_b = base.decode_batch(y_b, noise_var)
        same &= all(np.array_equal(a, b) for a, b in zip(dec_w, dec_b))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and same and dt < 30
    assert acceptance(3, ok, f"max decoder-input deviation {worst:.1e}, "
                             f"decisions identical: {same}, {dt:.1f} s")


def test_criterion_04_estimator_law(acceptance):
    t0 = time.perf_counter()
    part = BlockPartition((10,) * 10)
    base = RandomCodebookCode((4, 4), n_code=part.base_length, amplitude=1.0, seed=3)
    code = WrappedCode(base, part)
    cfg = SoccConfig(K_a=3, A_a=1.0, partition=part, noise=GaussianNoise(1.0), code=code)
    err_on, err_off, dev = [], [], 0.0
    for c in range(10):
        rng = np.random.default_rng([4, c])
        s = rng.uniform(-1, 1, size=(10_000, 3, part.L))
        msgs = [base.random_messages(k, rng, 10_000) for k in range(2)]
        state = rng.bit_generator.state
        on = socc_round(cfg, s, msgs, rng)
        rng.bit_generator.state = state
        off = socc_round(cfg, s, msgs, rng, digital_active=False)
        err_on.append(on.estimates - s.sum(1))
        err_off.append(off.estimates - s.sum(1))
        dev = max(dev, float(np.abs(on.estimates - off.estimates).max()))
    e_on, e_off = np.concatenate(err_on).ravel(), np.concatenate(err_off).ravel()
    rounds = e_on.size // part.L
    se = np.sqrt(0.1 / e_on.size)
    dt = time.perf_counter() - t0
    ok = (abs(e_on.mean()) <= 3 * se and abs(e_on.var() / 0.1 - 1) <= 0.05
          and abs(e_off.var() / 0.1 - 1) <= 0.05 and dev <= 1e-12 and dt < 60)
    assert acceptance(4, ok, f"{rounds} rounds, mean {e_on.mean():+.1e} (3SE {3 * se:.1e}), "
                             f"var {e_on.var():.4f} / silenced {e_off.var():.4f}, "
                             f"max on/off deviation {dev:.1e}, {dt:.1f} s")


def test_criterion_05_digital_unaffected_by_analog(acceptance):
    t0 = time.perf_counter()
    sc = build_scenario(load_config({}))
    cfg = sc.socc_config(-10.0)
    identical, frames, errors, dev = True, 0, 0, 0.0
    for c in range(4):
        rng = np.random.default_rng([5, c])
        s = rng.uniform(-1, 1, size=(10, 10, cfg.partition.L))
        msgs = [sc.code.random_messages(0, rng, 10)]
        state = rng.bit_generator.state
        on = socc_round(cfg, s, msgs, rng, keep_decoder_input=True)
        rng.bit_generator.state = state
        off = socc_round(cfg, s, msgs, rng, analog_active=False, keep_decoder_input=True)
        identical &= np.array_equal(on.decoded[0], off.decoded[0])
        identical &= np.array_equal(on.bit_errors, off.bit_errors)
        dev = max(dev, float(np.abs(on.decoder_input - off.decoder_input).max()))
        frames += 10
        errors += int(on.frame_errors.sum())
    dt = time.perf_counter() - t0
    ok = identical and dt < 60
    assert acceptance(5, ok, f"{frames} frames at -10 dB ({errors} in error), per-frame decisions "
                             f"identical: {identical}, decoder-input deviation {dev:.1e}, {dt:.1f} s")


def test_criterion_06_amplitude_histogram(acceptance):
    t0 = time.perf_counter()
    r = amplitude_ratios({"seed": 6, "histogram": {"codewords": 10_000, "batch": 1000}})
    dt = time.perf_counter() - t0
    frac = float(np.mean(r["complex"] <= 1.65))
    ok = (r["complex"].size >= 10_000 and r["complex"].max() <= 1.75 and r["real"].max() <= 1.75
          and frac >= 0.95 and dt < 120)
    assert acceptance(6, ok, f"{r['complex'].size} codewords, max ratio {r['complex'].max():.4f} "
                             f"(real component {r['real'].max():.4f}), "
                             f"{100 * frac:.1f}% <= 1.65, {dt:.1f} s")


def test_criterion_07_mse_noise_invariance(acceptance):
    t0 = time.perf_counter()
    part = BlockPartition((10,) * 148)
    A_a, sigma2 = np.sqrt(0.05), 0.05
    theory = sigma2 / (10 * A_a**2)
    mses = {}
    for name, noise in [("gaussian", GaussianNoise(sigma2)),
                        ("middleton 1.5", MiddletonClassA(1.5, 1.5, sigma2)),
                        ("middleton 0.1", MiddletonClassA(0.1, 0.1, sigma2))]:
        cfg = SoccConfig(K_a=10, A_a=A_a, partition=part, noise=noise)
        rng = np.random.default_rng(7)
        S = rng.uniform(-10, 10, size=(2000, 1, part.L))
        s = np.repeat(S / 10, 10, axis=1)
        mses[name] = float(socc_round(cfg, s, rng=rng).analog_sq_error.mean())
    dt = time.perf_counter() - t0
    g = mses["gaussian"]
    ok = all(abs(v / g - 1) <= 0.05 and abs(v / theory - 1) <= 0.05 for v in mses.values())
    ok &= dt < 120
    detail = ", ".join(f"{k} {v:.5f}" for k, v in mses.items())
    assert acceptance(7, ok, f"theory {theory:.5f}; {detail}, {dt:.1f} s")


def _jump(curve, at, eps=1e-9):
    return abs(curve(at + eps) - curve(at - eps))


def test_criterion_08_rate_bounds(acceptance):
    t0 = time.perf_counter()
    fp = sumrate_defaults()
    triv = trivial_converse(np.full(7, fp["P"]), fp["sigma2"])
    args = (fp["P"], fp["A"], fp["A_a"], fp["sigma2"])
    rows = sumrate_curves(range(1, 11), [0.0999], *args)
    betas = np.concatenate([np.linspace(0.005, 0.5, 300),
                            [1 / m + d for m in range(2, 11) for d in (-1e-9, 1e-9)]])
    rows += sumrate_curves([7], np.sort(betas[betas < 0.5]), *args)
    ordered = all(a <= c + 1e-12 and c <= t + 1e-12 for _, _, a, c, t in rows)

    def curve(i):
        return lambda b: sumrate_curves([7], [b], *args)[0][i]

    jumps_at = min(min(_jump(curve(2), 1 / m), _jump(curve(3), 1 / m)) for m in range(2, 11))
    mids = [0.5 * (1 / m + 1 / (m + 1)) for m in range(2, 10)]
    flat_between = max(max(_jump(curve(2), b), _jump(curve(3), b)) for b in mids)
    dt = time.perf_counter() - t0
    ok = abs(triv - 1.9051835) <= 1e-6 and ordered and jumps_at > 1e-3 \
        and flat_between < 1e-6 and dt < 300
    assert acceptance(8, ok, f"trivial {triv:.7f}, ordering on {len(rows)} rows: {ordered}, "
                             f"smallest jump at 1/m {jumps_at:.2e}, largest step elsewhere "
                             f"{flat_between:.1e}, {dt:.1f} s")


def test_criterion_09_mse_comparison(acceptance):
    fp = sumrate_defaults()
    ts = timeshare_mse(fp["sigma2"], fp["A_a"])
    so = socc_mse(0.5 - 1e-9, fp["sigma2"], fp["A_a"])
    ok = abs(ts - 0.316) <= 0.005 and abs(so - 0.158) <= 0.005
    assert acceptance(9, ok, f"time-share {ts:.4f}, scheme at beta=0.5- {so:.4f}")


@pytest.mark.xfail(strict=True, reason="target two-user corner rates lie below the computable lower bound "
                                       "at amplitude 2 sqrt(P); analysis in the decisions ledger")
def test_criterion_10_capacity_sanity(acceptance):
    t0 = time.perf_counter()
    big = [abs(ba_constrained_capacity(P, 10 * np.sqrt(P)).value / gaussian_capacity(P) - 1)
           for P in (10**0.1, 10**0.4, 10**0.8)]
    P = np.array([10**0.1, 10**0.4])
    corners = [ba_constrained_capacity(p, 2 * np.sqrt(p)).value for p in P]
    dt = time.perf_counter() - t0
    ok = (max(big) <= 0.01 and abs(corners[0] - 0.4040) <= 0.002
          and abs(corners[1] - 0.6150) <= 0.002 and dt < 120)
    assert acceptance(10, ok, f"A=10 sqrt(P) max rel dev {max(big):.1e}; corner rates "
                              f"{corners[0]:.4f}, {corners[1]:.4f} vs 0.4040, 0.6150, {dt:.1f} s")


def test_capacity_large_amplitude_and_corner_amplitude_reading():
    # the large-amplitude half of criterion 10 holds on its own, and the target
    # corner rates are reproduced when the amplitude is sqrt(2 P)
    for P in (10**0.1, 10**0.4, 10**0.8):
        assert ba_constrained_capacity(P, 10 * np.sqrt(P)).value == \
            pytest.approx(gaussian_capacity(P), rel=0.01)
    P = np.array([10**0.1, 10**0.4])
    lit = [ba_constrained_capacity(p, 2 * np.sqrt(p)) for p in P]
    alt = [ba_constrained_capacity(p, np.sqrt(2 * p)).value for p in P]
    assert abs(alt[0] - 0.4040) <= 0.002 and abs(alt[1] - 0.6150) <= 0.002
    # grid values are lower bounds, so the literal reading cannot come down to the targets
    assert lit[0].value - 0.4040 > 0.002 and lit[1].value - 0.6150 > 0.002


def test_criterion_11_fading_tail(acceptance):
    t0 = time.perf_counter()
    K, amp, sigma2 = 10, np.sqrt(0.1), 0.1
    part = BlockPartition((10,) * 10)
    rng = np.random.default_rng(11)
    h = np.exp(2j * np.pi * rng.uniform(size=K))
    A_real = effective_analog_amplitude(h, amp)
    ok, parts = True, []
    for fn, eps in [(sum_function(K), [0.3, 0.45, 0.6, 0.75, 0.9]),
                    (p_norm_function(K, 2.0), [0.45, 0.5, 0.55, 0.6, 0.65])]:
        s = rng.uniform(-1, 1, size=(10_000, K, part.L))
        est, exact = fading_nomographic_round(fn, s, h, amp, sigma2, part, rng)
        err = np.abs(est - exact).ravel()
        slack = []
        for e in eps:
            f = float(np.mean(err > e))
            se = np.sqrt(max(f * (1 - f), 1.0 / err.size) / err.size)
            pred = float(nomographic_tail(e, fn, 10, A_real, sigma2 / 2))
            ok &= f <= pred + 3 * se
            slack.append(pred + 3 * se - f)
        parts.append(f"{fn.name} min slack {min(slack):.2e}")
    dt = time.perf_counter() - t0
    ok &= dt < 120
    assert acceptance(11, ok, f"{err.size} trials each; " + "; ".join(parts) + f", {dt:.1f} s")


def test_criterion_12_waterfall(acceptance):
    t0 = time.perf_counter()
    grid = [-9.0, -10.0, -11.0, -12.0, -13.0]
    rows = run_ber_sweep({"seed": 1, "sweep": {"noise_power_dB": grid},
                          "trials": {"batch": 50, "max_frames": 200, "max_frame_errors": 200}})
    ber = [r["digital_ber"] for r in rows]
    dt = time.perf_counter() - t0
    monotone = all(b <= a for a, b in zip(ber, ber[1:]))
    ok = monotone and ber[grid.index(-11.0)] < 1e-3
    detail = ", ".join(f"{g:g} dB: {b:.2e}" for g, b in zip(grid, ber))
    assert acceptance(12, ok, f"BER {detail}; monotone {monotone}, {dt:.1f} s")
