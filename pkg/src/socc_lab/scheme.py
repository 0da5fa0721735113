"""The hybrid analog/digital scheme: block-repetition analog coding on top of
zero-sum wrapped digital codes, plus nomographic pre/post-processing and the
complex fading front end."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .channel import GaussianNoise, fading_mac_output
from .codes.qam import complex_to_real
from .codes.wrapping import BlockPartition, WrappedCode, unwrap

_TOL = 1e-9


class InvariantViolation(RuntimeError):
    """A transmitted signal broke its amplitude or power constraint."""


def db_to_power(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def db_to_amplitude(db):
    """Amplitude whose square is ``db`` decibels."""
    return np.sqrt(db_to_power(db))


@dataclass
class SoccConfig:
    """Scenario of one SOCC transmission.

    Parameters
    ----------
    K_a : int
        Number of analog users.
    A_a : float
        Analog peak amplitude (linear).
    partition : BlockPartition
    noise : noise model with ``power`` and ``sample(rng, size)``
    code : WrappedCode, optional
        Digital MAC code; ``None`` for a purely analog run.
    beta : float, optional
        Nominal analog rate, informational.
    fading : array of complex, optional
        Fading coefficients of the analog users (complex front end only).
    """

    K_a: int
    A_a: float
    partition: BlockPartition
    noise: object = field(default_factory=lambda: GaussianNoise(1.0))
    code: WrappedCode | None = None
    beta: float | None = None
    fading: np.ndarray | None = None

    def __post_init__(self):
        if self.K_a < 1:
            raise ValueError("need at least one analog user")
        if not self.A_a > 0:
            raise ValueError("analog amplitude must be positive")
        if self.beta is not None and not 0 < self.beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        if self.code is not None and self.code.n_code != self.partition.n:
            raise ValueError("digital code length does not match the partition")

    @property
    def K_d(self) -> int:
        return 0 if self.code is None else self.code.num_users

    @property
    def n(self) -> int:
        return self.partition.n

    @property
    def analog_rate(self) -> float:
        return self.partition.L / self.partition.n


def _block_sums(partition: BlockPartition, y):
    return np.add.reduceat(y, partition.offsets[:-1], axis=-1)


def analog_encode(values, config: SoccConfig) -> np.ndarray:
    """Repeat ``A_a * s_l`` over block ``l``; ``values`` has last axis ``L``."""
    s = np.asarray(values, dtype=float)
    if s.shape[-1] != config.partition.L:
        raise ValueError(f"expected {config.partition.L} values per user, got {s.shape[-1]}")
    if np.any(np.abs(s) > 1.0):
        raise ValueError("analog values must lie in [-1, 1]")
    return np.repeat(config.A_a * s, config.partition.lengths, axis=-1)


def analog_decode(y, config: SoccConfig) -> np.ndarray:
    """Block sums scaled by ``1 / (n_l A_a)``: estimates of the per-block sums."""
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != config.partition.n:
        raise ValueError(f"expected {config.partition.n} channel outputs, got {y.shape[-1]}")
    return _block_sums(config.partition, y) / (np.asarray(config.partition.lengths) * config.A_a)


def estimator_variance(config: SoccConfig) -> np.ndarray:
    """Per-block variance ``sigma^2 / (n_l A_a^2)`` of the analog estimates."""
    return config.noise.power / (np.asarray(config.partition.lengths) * config.A_a**2)


class AnalogBlockEncoder(BaseEstimator, TransformerMixin):
    """Scikit-learn transformer for the analog block code.

    ``transform`` maps rows of ``L`` values in ``[-1, 1]`` to channel signals,
    ``inverse_transform`` maps received rows back to block estimates.
    """

    def __init__(self, block_lengths=(10,), amplitude=1.0):
        self.block_lengths = block_lengths
        self.amplitude = amplitude

    def fit(self, X, y=None):
        X = check_array(X)
        part = BlockPartition(tuple(self.block_lengths))
        if X.shape[1] != part.L:
            raise ValueError(f"X has {X.shape[1]} features, partition has {part.L} blocks")
        self.config_ = SoccConfig(K_a=1, A_a=float(self.amplitude), partition=part)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        return analog_encode(check_array(X), self.config_)

    def inverse_transform(self, X):
        check_is_fitted(self, "config_")
        return analog_decode(check_array(X), self.config_)


def check_constraints(x, amplitude, power=None, what="signal"):
    """Raise :class:`InvariantViolation` unless every row satisfies the limits."""
    x = np.asarray(x, dtype=float)
    peak = np.max(np.abs(x)) if x.size else 0.0
    if peak > amplitude * (1 + _TOL):
        raise InvariantViolation(f"{what}: peak amplitude {peak:.6g} exceeds {amplitude:.6g}")
    if power is not None and x.size:
        p = np.max(np.mean(x**2, axis=-1))
        if p > power * (1 + _TOL):
            raise InvariantViolation(f"{what}: average power {p:.6g} exceeds {power:.6g}")


@dataclass
class RoundResult:
    """Outcome of a batch of SOCC rounds (leading batch axis ``B``)."""

    estimates: np.ndarray  # (B, L)
    decoded: list | None  # per digital user
    analog_sq_error: np.ndarray  # (B, L)
    frame_errors: np.ndarray | None  # (K_d, B) bool
    bit_errors: np.ndarray | None  # (K_d, B) int
    decoder_input: np.ndarray | None = None


def socc_round(config: SoccConfig, analog_values, messages=None, rng=None, *,
               analog_active=True, digital_active=True, check=True,
               keep_decoder_input=False) -> RoundResult:
    """Run a batch of rounds of the full scheme.

    Parameters
    ----------
    analog_values : array, shape (B, K_a, L) or (K_a, L)
    messages : list, optional
        One batch of messages per digital user.
    rng : numpy Generator
        Noise is always drawn first and with the same shape, so two calls with
        equal generator state see the same noise whichever users are active.
    """
    s = np.asarray(analog_values, dtype=float)
    single = s.ndim == 2
    if single:
        s = s[None]
        messages = None if messages is None else [np.asarray(m)[None] for m in messages]
    B = s.shape[0]
    if s.shape[1] != config.K_a:
        raise ValueError(f"expected values for {config.K_a} analog users, got {s.shape[1]}")
    noise = config.noise.sample(rng, (B, config.n))

    y = noise.copy()
    if analog_active:
        xa = analog_encode(s, config)
        if check:
            check_constraints(xa, config.A_a, what="analog signal")
        y += xa.sum(axis=1)
    code = config.code
    use_digital = code is not None and digital_active and messages is not None
    if use_digital:
        for k in range(code.num_users):
            xd = code.encode_batch(k, messages[k])
            if check:
                check_constraints(xd, code.amplitude[k], code.power[k], what=f"digital user {k}")
            y += xd

    estimates = analog_decode(y, config)
    err = (estimates - s.sum(axis=1)) ** 2 if analog_active else estimates**2

    decoded = frame_errors = bit_errors = dec_in = None
    if code is not None and messages is not None:
        if keep_decoder_input:
            dec_in = unwrap(code.partition, y) if isinstance(code, WrappedCode) else y
        decoded = code.decode_batch(y, config.noise.power)
        frame_errors = np.array([code.message_errors(k, messages[k], decoded[k])
                                 for k in range(code.num_users)])
        bit_errors = np.array([_bit_errors(messages[k], decoded[k]) for k in range(code.num_users)])

    if single:
        estimates, err = estimates[0], err[0]
        if decoded is not None:
            decoded = [d[0] for d in decoded]
    return RoundResult(estimates, decoded, err, frame_errors, bit_errors, dec_in)


def _bit_errors(sent, decoded):
    sent, decoded = np.asarray(sent), np.asarray(decoded)
    diff = sent != decoded
    return diff.reshape(diff.shape[0], -1).sum(axis=1)


# -- nomographic functions ---------------------------------------------------

@dataclass(frozen=True)
class NomographicFunction:
    """``f(s_1, ..., s_K) = psi(sum_k phi_k(s_k))`` with an increment majorant.

    Attributes
    ----------
    pre : tuple of callables, one per user
    phi_min, phi_max : ndarray
        Declared ranges of the pre-functions on their domains.
    post : callable
    post_domain : (float, float)
        Arguments are clipped into this interval before ``post`` is applied.
    omega, omega_inv : callables
        Increment majorant of ``post`` and its inverse.
    """

    pre: tuple
    phi_min: np.ndarray
    phi_max: np.ndarray
    post: Callable
    post_domain: tuple
    omega: Callable
    omega_inv: Callable
    name: str = "custom"

    @property
    def K(self) -> int:
        return len(self.pre)

    @property
    def delta_max(self) -> float:
        return float(np.max(self.phi_max - self.phi_min))

    def __call__(self, s):
        """Exact value; ``s`` has users on axis ``-2`` (or is a length-K vector)."""
        s = np.asarray(s, dtype=float)
        if s.ndim == 1:
            s = s[:, None]
            return self(s)[0]
        total = sum(self.pre[k](s[..., k, :]) for k in range(self.K))
        return self.post(np.clip(total, *self.post_domain))


def sum_function(K: int) -> NomographicFunction:
    """Plain sum of ``K`` values in ``[-1, 1]``."""
    ident = lambda x: np.asarray(x, dtype=float)  # noqa: E731
    return NomographicFunction(
        pre=(ident,) * K, phi_min=-np.ones(K), phi_max=np.ones(K), post=ident,
        post_domain=(-np.inf, np.inf), omega=ident, omega_inv=ident, name="sum")


def p_norm_function(K: int, p: float = 2.0) -> NomographicFunction:
    """``(sum |s_k|^p)^(1/p)`` for values in ``[-1, 1]`` and ``p >= 1``."""
    if p < 1:
        raise ValueError("p must be at least 1")
    p = float(p)
    phi = lambda x: np.abs(x) ** p  # noqa: E731
    return NomographicFunction(
        pre=(phi,) * K, phi_min=np.zeros(K), phi_max=np.ones(K),
        post=lambda x: np.asarray(x) ** (1.0 / p), post_domain=(0.0, float(K)),
        omega=lambda t: np.asarray(t) ** (1.0 / p), omega_inv=lambda e: np.asarray(e) ** p,
        name=f"{p:g}-norm")


def weighted_sum_function(weights) -> NomographicFunction:
    """``sum_k w_k s_k`` for values in ``[-1, 1]``."""
    w = np.asarray(weights, dtype=float)
    ident = lambda x: np.asarray(x, dtype=float)  # noqa: E731
    pre = tuple((lambda x, wk=wk: wk * np.asarray(x, dtype=float)) for wk in w)
    return NomographicFunction(
        pre=pre, phi_min=-np.abs(w), phi_max=np.abs(w), post=ident,
        post_domain=(-np.inf, np.inf), omega=ident, omega_inv=ident, name="weighted-sum")


def nomographic_preprocess(s, k: int, fn: NomographicFunction):
    """Map ``phi_k(s)`` affinely onto ``[-1, 1]`` using the common range ``Delta_max``."""
    v = np.asarray(fn.pre[k](s), dtype=float)
    lo, hi = fn.phi_min[k], fn.phi_max[k]
    if np.any(v < lo - _TOL) or np.any(v > hi + _TOL):
        raise ValueError(f"phi_{k}(s) outside its declared range [{lo}, {hi}]")
    d = fn.delta_max
    # ordered so that the identity range [-1, 1] maps exactly onto itself
    return np.clip(v * (2.0 / d) - (2.0 * lo / d + 1.0), -1.0, 1.0)


def nomographic_postprocess(f_hat, fn: NomographicFunction, K_a: int | None = None):
    """Undo the affine map on the estimated sum and apply ``psi`` (argument clipped)."""
    K_a = fn.K if K_a is None else K_a
    d = fn.delta_max
    arg = np.asarray(f_hat, dtype=float) * (d / 2.0) + (K_a * d / 2.0 + float(np.sum(fn.phi_min)))
    return fn.post(np.clip(arg, *fn.post_domain))


# -- complex fading front end -------------------------------------------------

def fading_transmit_transform(x_real, h) -> np.ndarray:
    """Pack real pairs into complex symbols and pre-invert the fading ``h``."""
    if h == 0:
        raise ValueError("fading coefficient must be nonzero")
    x = np.asarray(x_real, dtype=float)
    if x.shape[-1] % 2:
        raise ValueError("real signal length must be even")
    return (x[..., 0::2] + 1j * x[..., 1::2]) / h


def fading_receive_split(y) -> np.ndarray:
    """Complex channel output back to interleaved real uses."""
    return complex_to_real(y)


def effective_analog_amplitude(h, amplitude) -> float:
    """Real-scheme amplitude so every user meets ``|X_k| <= amplitude_k`` after inversion."""
    h = np.abs(np.asarray(h, dtype=complex))
    amp = np.broadcast_to(np.asarray(amplitude, dtype=float), h.shape)
    return float(np.min(h * amp)) / np.sqrt(2.0)


def fading_nomographic_round(fn: NomographicFunction, s, h, amplitude, noise_power,
                             partition: BlockPartition, rng, per_real: bool = False,
                             check: bool = True):
    """Estimate ``fn`` per block over the complex fading MAC.

    ``s`` has shape (B, K, L); ``partition`` counts real uses and must have even
    total length.  Returns ``(estimates, exact)`` of shape (B, L).
    """
    s = np.asarray(s, dtype=float)
    K = s.shape[1]
    if partition.n % 2:
        raise ValueError("partition must cover an even number of real uses")
    A_real = effective_analog_amplitude(h, amplitude)
    cfg = SoccConfig(K_a=K, A_a=A_real, partition=partition)
    amp = np.broadcast_to(np.asarray(amplitude, dtype=float), (K,))
    xs = []
    for k in range(K):
        x_real = analog_encode(nomographic_preprocess(s[:, k], k, fn), cfg)
        X = fading_transmit_transform(x_real, h[k])
        if check:
            check_constraints(np.abs(X), amp[k], what=f"analog user {k}")
        xs.append(X)
    y = fading_mac_output(xs, h, noise_power, rng, per_real=per_real)
    f_hat = analog_decode(fading_receive_split(y), cfg)
    return nomographic_postprocess(f_hat, fn, K), fn(s)
