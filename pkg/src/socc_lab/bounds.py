"""Rate and error bounds for simultaneous computation and communication.

Rates are in nats per real channel use.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy import integrate

from .capacity import constrained_region_inner, per_user_capacities
from .codes.wrapping import beta_prime
from .zerosum import PEAK_FACTOR_BOUND


def gaussian_capacity(x):
    """``C(x) = log(1 + x) / 2``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("capacity argument must be nonnegative")
    out = 0.5 * np.log1p(x)
    return float(out) if out.ndim == 0 else out


def trivial_converse(powers, sigma2: float = 1.0) -> float:
    """Sum capacity of the power-constrained Gaussian MAC without analog users."""
    return gaussian_capacity(np.sum(powers) / sigma2)


def converse_terms(powers, K_a: int, A_a: float, sigma2: float, beta: float, V: float):
    """The ``K_a + 1`` candidate bounds whose minimum is the converse sum rate."""
    if V <= 0:
        raise ValueError("V must be positive")
    k = np.arange(K_a + 1, dtype=float)
    cap = 0.5 * np.log1p((np.sum(powers) + k**2 * A_a**2) / sigma2)
    with np.errstate(divide="ignore"):
        pen = 0.5 * beta * np.log(2 * k**2 / (np.pi * np.e * V))
    pen = np.maximum(np.nan_to_num(pen, neginf=0.0), 0.0)
    return cap - pen


def outer_bound_sumrate(powers, K_a: int, A_a: float, sigma2: float, beta: float,
                        V: float) -> float:
    """Converse on the digital sum rate of the users with the given ``powers``."""
    return float(np.min(converse_terms(powers, K_a, A_a, sigma2, beta, V)))


def socc_mse(beta: float, sigma2: float, A_a: float) -> float:
    """Analog MSE ``beta' sigma^2 / A_a^2`` of the block-repetition scheme."""
    return float(beta_prime(beta)) * sigma2 / A_a**2


def timeshare_mse(sigma2: float, A_a: float) -> float:
    """MSE with one dedicated channel use per computation."""
    return sigma2 / A_a**2


def rescaled_constraints(powers, amplitudes, beta: float):
    """Per-user power and amplitude seen by the base code inside the wrapper."""
    P = np.asarray(powers, dtype=float) / (1.0 - beta)
    A = np.asarray(amplitudes, dtype=float) / PEAK_FACTOR_BOUND
    return P, A


def achievable_sumrate(powers, amplitudes, sigma2: float, beta: float, G: int = 201,
                       results=None) -> float:
    """``(1 - beta')`` times the inner-region sum rate at the rescaled constraints."""
    P, A = rescaled_constraints(powers, amplitudes, beta)
    val = constrained_region_inner(P, A, sigma2, G=G, results=results)
    return (1.0 - float(beta_prime(beta))) * val


def inner_bound_membership(rates, powers, amplitudes, sigma2: float, beta: float,
                           oracle=None, G: int = 201, tol: float = 1e-12) -> bool:
    """Whether ``rates / (1 - beta')`` lies in the inner region at rescaled constraints.

    ``oracle(J)`` returns the sum-rate limit for the user subset ``J``; by
    default it is computed from per-user optimal inputs.
    """
    R = np.asarray(rates, dtype=float) / (1.0 - float(beta_prime(beta)))
    if np.any(R < 0):
        return False
    if oracle is None:
        P, A = rescaled_constraints(powers, amplitudes, beta)
        results = per_user_capacities(P, A, sigma2, G)
        oracle = lambda J: constrained_region_inner(P, A, sigma2, J, results=results)  # noqa: E731
    K = R.size
    for size in range(1, K + 1):
        for J in combinations(range(K), size):
            if R[list(J)].sum() > oracle(J) + tol:
                return False
    return True


def constrained_region_outer(powers, amplitudes, sigma2: float = 1.0, G: int = 201):
    """Per-user caps and the unconstrained sum-rate function.

    Returns ``(caps, unconstrained)`` where ``unconstrained(J)`` is
    ``C(sum_J P_k / sigma^2)``.
    """
    P = np.atleast_1d(np.asarray(powers, dtype=float))
    caps = np.array([r.value for r in per_user_capacities(P, amplitudes, sigma2, G)])

    def unconstrained(J):
        return gaussian_capacity(P[list(J)].sum() / sigma2)

    return caps, unconstrained


def in_outer_region(rates, caps, unconstrained, tol: float = 1e-12) -> bool:
    R = np.asarray(rates, dtype=float)
    if np.any(R > caps + tol):
        return False
    K = R.size
    return all(R[list(J)].sum() <= unconstrained(J) + tol
               for size in range(1, K + 1) for J in combinations(range(K), size))


# -- approximation criteria ----------------------------------------------------

def gaussian_tail(eps, V: float = 1.0):
    """Tail level ``delta`` for a Gaussian error of variance ``V``.

    ``delta = sqrt(2/pi) exp(-u^2/2) / u`` with ``u = eps / sqrt(V)``.
    """
    u = np.asarray(eps, dtype=float) / np.sqrt(V)
    return np.sqrt(2 / np.pi) * np.exp(-0.5 * u**2) / u


def mse_to_tail(V: float, eps):
    """Chebyshev: an MSE-``V`` estimate exceeds ``eps`` with probability at most ``V / eps^2``."""
    return V / np.asarray(eps, dtype=float) ** 2


def tail_to_mse(delta, e_max: float = np.inf, envelope=None):
    """MSE bound ``int_0^inf min(1, delta(sqrt(e))) de``.

    The integral is cut at ``e_max``; ``envelope(e_max)`` (if given) must bound
    the neglected tail integral.  Returns ``(estimate, quad_error, tail_bound)``.
    Raises ``ValueError`` if the integral diverges.
    """
    f = lambda e: min(1.0, float(delta(np.sqrt(e)))) if e > 0 else 1.0  # noqa: E731
    if np.isfinite(e_max):
        val, err = integrate.quad(f, 0.0, e_max, limit=200)
        tail = float(envelope(e_max)) if envelope is not None else np.nan
        return val, err, tail
    with np.errstate(all="ignore"):
        val, err, info = integrate.quad(f, 0.0, np.inf, limit=200, full_output=1)[:3]
    if not np.isfinite(val) or "message" in info or err > 1e-6 * max(1.0, abs(val)):
        raise ValueError("tail integral does not converge")
    return val, err, 0.0


def approx_convert(source: str, target: str, V: float = 1.0, eps=None, delta=None, **kw):
    """Convert between approximation criteria.

    ``gaussian -> tail`` and ``mse -> tail`` need ``eps``; ``tail -> mse`` needs
    a callable ``delta``.  ``gaussian -> mse`` is the identity on ``V``.
    """
    key = (source, target)
    if key == ("gaussian", "tail"):
        return gaussian_tail(eps, V)
    if key == ("mse", "tail"):
        return mse_to_tail(V, eps)
    if key == ("tail", "mse"):
        return tail_to_mse(delta, **kw)
    if key == ("gaussian", "mse"):
        return V
    raise ValueError(f"unsupported conversion {source} -> {target}")


def nomographic_tail(eps, fn, n_l: int, A_a: float, sigma2: float):
    """Predicted ``P(|f - f_hat| > eps)`` for a nomographic function.

    ``A_a`` and ``sigma2`` are the amplitude and per-use noise variance of the
    real channel carrying the block of ``n_l`` uses.
    """
    x = 2.0 * np.asarray(fn.omega_inv(eps), dtype=float) ** 2 / fn.delta_max**2 \
        * A_a**2 / sigma2 * n_l
    return np.exp(-x) / np.sqrt(np.pi * x)


# -- sweeps ------------------------------------------------------------------

def sumrate_defaults():
    """Reference sum-rate setting: sigma^2 = 0 dB, A_a = 2.5 dB, P_k = 8 dB, A_k = 2 sqrt(2 P_k)."""
    P = 10 ** 0.8
    return dict(sigma2=1.0, A_a=10 ** 0.25, P=P, A=2 * np.sqrt(2 * P), K_a=10)


def sumrate_curves(K_d_values, beta_values, P: float, A: float, A_a: float, sigma2: float,
                   K_a: int = 10, G: int = 201):
    """Rows ``(K_d, beta, achievable, converse, trivial)`` over a grid.

    ``V`` follows the scheme's MSE ``beta' sigma^2 / A_a^2``.  All users share
    the same constraints, so one per-user capacity serves the whole grid
    whenever the rescaled power constraint is slack.
    """
    rows = []
    cache: dict = {}
    for K_d in K_d_values:
        for beta in beta_values:
            Pr, Ar = rescaled_constraints(P, A, beta)
            key = (float(min(Pr, Ar**2)), float(Ar))
            if key not in cache:
                cache[key] = per_user_capacities([key[0]], [key[1]], sigma2, G)[0]
            res = [cache[key]] * K_d
            ach = (1 - float(beta_prime(beta))) * constrained_region_inner(
                np.full(K_d, Pr), np.full(K_d, Ar), sigma2, results=res)
            V = socc_mse(beta, sigma2, A_a)
            conv = outer_bound_sumrate(np.full(K_d, P), K_a, A_a, sigma2, beta, V)
            rows.append((K_d, beta, ach, conv, trivial_converse(np.full(K_d, P), sigma2)))
    return rows
