"""Amplitude- and power-constrained Gaussian channel capacities.

Inputs are restricted to a symmetric equispaced grid on ``[-A, A]`` and the
capacity-achieving distribution on that grid is found by Blahut-Arimoto with a
Lagrange multiplier for the power constraint.  All output-space integrals use
composite Gauss-Legendre quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

_TINY = 1e-300


def gauss_grid(lo: float, hi: float, panel: float, order: int = 10):
    """Nodes and weights of composite Gauss-Legendre quadrature on ``[lo, hi]``."""
    n_panels = max(1, int(np.ceil((hi - lo) / panel)))
    edges = np.linspace(lo, hi, n_panels + 1)
    t, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * t).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def _normal_pdf(z, sigma):
    return np.exp(-0.5 * (z / sigma) ** 2) / (np.sqrt(2 * np.pi) * sigma)


def gaussian_entropy(sigma2: float) -> float:
    return 0.5 * np.log(2 * np.pi * np.e * sigma2)


def mixture_entropy(atoms, probs, sigma2: float, refine: int = 1) -> float:
    """Differential entropy (nats) of ``X + N`` with discrete ``X`` and ``N ~ N(0, sigma2)``."""
    atoms = np.asarray(atoms, dtype=float)
    probs = np.asarray(probs, dtype=float)
    keep = probs > 0
    atoms, probs = atoms[keep], probs[keep] / probs[keep].sum()
    sigma = np.sqrt(sigma2)
    y, w = gauss_grid(atoms.min() - 8 * sigma, atoms.max() + 8 * sigma, sigma / (2 * refine))
    p = np.zeros_like(y)
    for chunk in np.array_split(np.arange(atoms.size), max(1, atoms.size // 256)):
        p += probs[chunk] @ _normal_pdf(y[None, :] - atoms[chunk, None], sigma)
    return float(-np.sum(w * p * np.log(np.maximum(p, _TINY))))


@dataclass
class CapacityResult:
    """Numerical capacity on a finite input grid.

    Attributes
    ----------
    value : float
        Mutual information (nats per real channel use) of ``probs``.
    upper : float
        Dual upper bound for the same input grid.
    atoms, probs : ndarray
        Input distribution (symmetric about 0).
    multiplier : float
        Lagrange multiplier of the power constraint (0 when slack).
    residual : float
        Final Blahut-Arimoto gap; ``converged`` is False if it exceeds ``tol``.
    """

    value: float
    upper: float
    atoms: np.ndarray
    probs: np.ndarray
    multiplier: float
    residual: float
    converged: bool
    power: float

    @property
    def spacing(self) -> float:
        return float(self.atoms[1] - self.atoms[0]) if self.atoms.size > 1 else 0.0


class _Channel:
    def __init__(self, atoms, sigma2):
        sigma = np.sqrt(sigma2)
        self.atoms = atoms
        self.x2 = atoms**2
        self.y, self.w = gauss_grid(atoms[0] - 8 * sigma, atoms[-1] + 8 * sigma, sigma / 2)
        K = _normal_pdf(self.y[None, :] - atoms[:, None], sigma)
        self.K = K
        self.Kw = K * self.w
        self.c = np.sum(self.Kw * np.log(np.maximum(K, _TINY)), axis=1)

    def divergences(self, p):
        q = p @ self.K
        return self.c - self.Kw @ np.log(np.maximum(q, _TINY))


def _tilted_power(logp, x2, s):
    e = logp - s * x2
    q = np.exp(e - e.max())
    return (q @ x2) / q.sum()


def _multiplier(logp, x2, P):
    """Smallest ``s >= 0`` whose tilted distribution meets ``E X^2 <= P``."""
    if _tilted_power(logp, x2, 0.0) <= P:
        return 0.0
    hi = 1.0
    while _tilted_power(logp, x2, hi) > P:
        hi *= 2.0
    return brentq(lambda s: _tilted_power(logp, x2, s) - P, 0.0, hi, xtol=1e-14, rtol=1e-13)


def _ba_step(ch: _Channel, p, P):
    """One power-constrained Blahut-Arimoto update.

    Returns the updated distribution, the mutual information of ``p`` and the
    duality gap at ``p``.
    """
    D = ch.divergences(p)
    lower = p @ D
    s = _multiplier(np.log(np.maximum(p, _TINY)) + D, ch.x2, P)
    a = D - s * ch.x2
    gap = a.max() + s * P - lower
    q = p * np.exp(a - a.max())
    q = 0.5 * (q + q[::-1])
    return q / q.sum(), lower, gap, s


def ba_constrained_capacity(P: float, A: float, sigma2: float = 1.0, G: int = 201,
                            tol: float = 5e-5, max_iter: int = 20000) -> CapacityResult:
    """Capacity of ``Y = X + N`` with ``|X| <= A`` and ``E X^2 <= P`` on a ``G``-point grid.

    Each Blahut-Arimoto update picks the power multiplier that makes the new
    distribution meet the power constraint, so a single loop handles both
    constraints.  Updates are accelerated by squared extrapolation (SQUAREM)
    with a monotonicity safeguard.  Iteration stops once the duality gap (dual
    upper bound minus achieved mutual information) is below ``tol`` or after
    ``max_iter`` updates; the mutual information itself converges much faster
    than the gap.  ``value`` belongs to a feasible distribution, hence is a lower
    bound on the continuous-alphabet capacity.
    """
    if not (P > 0 and A > 0 and sigma2 > 0):
        raise ValueError("P, A and sigma2 must be positive")
    if G < 3 or G % 2 == 0:
        raise ValueError("G must be an odd integer >= 3")
    atoms = np.linspace(-A, A, G)
    ch = _Channel(atoms, sigma2)
    p, *_ = _ba_step(ch, np.full(G, 1.0 / G), P)
    it = 0
    while True:
        p1, lower, gap, s = _ba_step(ch, p, P)
        it += 1
        if gap < tol or it >= max_iter:
            break
        p2, lower1, *_ = _ba_step(ch, p1, P)
        it += 1
        r = p1 - p
        v = p2 - p1 - r
        nv = np.linalg.norm(v)
        p = p2
        if nv > 0:
            alpha = min(-np.linalg.norm(r) / nv, -1.0)
            # keep the support: multiplicative updates cannot revive a zero mass
            trial = np.maximum(p - 2 * alpha * r + alpha**2 * v, 1e-2 * p)
            trial = 0.5 * (trial + trial[::-1])
            trial /= trial.sum()
            p3, lower3, *_ = _ba_step(ch, trial, P)
            it += 1
            # an infeasible trial can look better than any feasible point
            if lower3 >= lower1 and trial @ ch.x2 <= P * (1 + 1e-12):
                p = p3
    return CapacityResult(value=float(lower), upper=float(lower + gap), atoms=atoms, probs=p,
                          multiplier=float(s), residual=float(gap), converged=bool(gap < tol),
                          power=float(p @ ch.x2))


def binary_antipodal_information(A: float, sigma2: float = 1.0) -> float:
    """``I(X; X + N)`` for equiprobable ``X = +-A``."""
    return mixture_entropy([-A, A], [0.5, 0.5], sigma2, refine=4) - gaussian_entropy(sigma2)


def sum_distribution(results) -> tuple[np.ndarray, np.ndarray]:
    """Distribution of the sum of independent inputs from :class:`CapacityResult` s.

    Equal grid spacings are convolved exactly; otherwise atoms with negligible
    mass are pruned and all sums are enumerated.
    """
    atoms, probs = np.array([0.0]), np.array([1.0])
    for r in results:
        if atoms.size > 1 and np.isclose(r.spacing, atoms[1] - atoms[0], rtol=1e-12) \
                or atoms.size == 1:
            step = r.spacing
            probs = np.convolve(probs, r.probs)
            start = atoms[0] + r.atoms[0]
            atoms = start + step * np.arange(probs.size)
        else:
            keep_a = probs > 1e-15
            keep_r = r.probs > 1e-15
            a = (atoms[keep_a, None] + r.atoms[None, keep_r]).ravel()
            q = (probs[keep_a, None] * r.probs[None, keep_r]).ravel()
            order = np.argsort(a)
            atoms, probs = a[order], q[order]
    return atoms, probs


def constrained_region_inner(P, A, sigma2: float = 1.0, J=None, G: int = 201,
                             results=None) -> float:
    """Sum rate over the users in ``J`` with independent per-user optimal inputs.

    ``I(sum_J X_k; Y | X_{J^c}) = h(sum_J X_k + N) - h(N)``.  ``results`` may pass
    precomputed per-user :class:`CapacityResult` s.
    """
    P = np.atleast_1d(np.asarray(P, dtype=float))
    A = np.broadcast_to(np.asarray(A, dtype=float), P.shape)
    J = range(P.size) if J is None else list(J)
    if len(J) == 0:
        return 0.0
    if results is None:
        results = per_user_capacities(P, A, sigma2, G)
    chosen = [results[k] for k in J]
    if len(chosen) == 1:
        return chosen[0].value
    atoms, probs = sum_distribution(chosen)
    return mixture_entropy(atoms, probs, sigma2) - gaussian_entropy(sigma2)


def per_user_capacities(P, A, sigma2: float = 1.0, G: int = 201) -> list[CapacityResult]:
    """One capacity computation per distinct ``(P_k, A_k)`` pair, reused across users."""
    cache: dict = {}
    out = []
    for p, a in zip(np.atleast_1d(P), np.broadcast_to(A, np.shape(np.atleast_1d(P)))):
        key = (float(p), float(a))
        if key not in cache:
            cache[key] = ba_constrained_capacity(key[0], key[1], sigma2, G)
        out.append(cache[key])
    return out
