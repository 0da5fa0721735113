"""Memoryless MAC channels: (biased) AWGN, complex fading, Middleton Class A noise."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats


def substream(master_seed: int, *key: int) -> np.random.Generator:
    """Counter-based generator for the work item ``key`` under ``master_seed``.

    Streams depend only on ``(master_seed, key)``, never on execution order.
    """
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class GaussianNoise:
    power: float

    def __post_init__(self):
        if not self.power >= 0:
            raise ValueError("noise power must be nonnegative")

    def sample(self, rng, size):
        if self.power == 0:
            return np.zeros(size)
        return rng.normal(0.0, np.sqrt(self.power), size=size)

    def kurtosis(self) -> float:
        return 3.0

    def pdf(self, x):
        return stats.norm.pdf(x, scale=np.sqrt(self.power))


@dataclass(frozen=True)
class MiddletonClassA:
    """Poisson mixture of zero-mean Gaussians with total variance ``power``.

    Parameters
    ----------
    A : float
        Impulsive index (mean number of active impulses).
    gamma : float
        Gaussian-to-impulsive power ratio.
    power : float
        Total noise variance.
    """

    A: float
    gamma: float
    power: float

    def __post_init__(self):
        if not (self.A > 0 and self.gamma > 0 and self.power > 0):
            raise ValueError("Middleton parameters must be positive")

    def component_variance(self, m):
        return self.power * (np.asarray(m) / self.A + self.gamma) / (1.0 + self.gamma)

    def sample(self, rng, size):
        m = rng.poisson(self.A, size=size)
        return rng.standard_normal(size) * np.sqrt(self.component_variance(m))

    def kurtosis(self) -> float:
        # E[var_m^2] / E[var_m]^2 = 1 + Var(m) / (A (1 + gamma))^2
        return 3.0 * (1.0 + 1.0 / (self.A * (1.0 + self.gamma) ** 2))

    def _terms(self, tail: float = 1e-12):
        m_max = int(stats.poisson.isf(tail, self.A)) + 1
        m = np.arange(m_max + 1)
        return stats.poisson.pmf(m, self.A), self.component_variance(m)

    def pdf(self, x, tail: float = 1e-12):
        """Density from the Poisson series truncated where the remaining mass is below ``tail``."""
        w, v = self._terms(tail)
        x = np.asarray(x, dtype=float)
        return (w * stats.norm.pdf(x[..., None], scale=np.sqrt(v))).sum(axis=-1)

    def cdf(self, x, tail: float = 1e-12):
        w, v = self._terms(tail)
        x = np.asarray(x, dtype=float)
        return (w * stats.norm.cdf(x[..., None], scale=np.sqrt(v))).sum(axis=-1)


def middleton_sample(params: MiddletonClassA, rng, size=None):
    """Draw Middleton Class A noise (a scalar when ``size`` is None)."""
    return params.sample(rng, size)


def mac_output(inputs, bias=None, noise=None, rng=None) -> np.ndarray:
    """Real MAC output ``sum_k x_k + bias + N``.

    ``inputs`` is a sequence of equal-shape real signals (or a stacked array
    with users on axis 0).  ``noise=None`` means a noiseless channel.
    """
    xs = [np.asarray(x, dtype=float) for x in inputs]
    if not xs:
        raise ValueError("need at least one input signal")
    shape = xs[0].shape
    if any(x.shape != shape for x in xs):
        raise ValueError("input signals must have equal lengths")
    y = np.sum(xs, axis=0)
    if bias is not None:
        b = np.asarray(bias, dtype=float)
        if b.ndim and b.shape[-1] != shape[-1]:
            raise ValueError("bias length does not match the input signals")
        y = y + b
    if noise is not None:
        y = y + noise.sample(rng, shape)
    return y


def complex_gaussian(power: float, rng, size, per_real: bool = False) -> np.ndarray:
    """Circular complex Gaussian noise.

    By default ``power`` is the total variance of a complex sample, split evenly
    over the real and imaginary parts; ``per_real=True`` gives each part
    variance ``power`` instead.
    """
    s = np.sqrt(power if per_real else power / 2.0)
    return s * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def fading_mac_output(inputs, h, noise_power: float = 0.0, rng=None,
                      per_real: bool = False) -> np.ndarray:
    """Complex fading MAC ``sum_k h_k x_k + N``."""
    xs = [np.asarray(x, dtype=complex) for x in inputs]
    h = np.asarray(h, dtype=complex).ravel()
    if len(xs) != h.size:
        raise ValueError("one fading coefficient per input is required")
    shape = xs[0].shape
    if any(x.shape != shape for x in xs):
        raise ValueError("input signals must have equal lengths")
    y = sum(hk * x for hk, x in zip(h, xs))
    if noise_power > 0:
        y = y + complex_gaussian(noise_power, rng, shape, per_real)
    return y
