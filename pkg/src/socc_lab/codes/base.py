"""Digital multiple-access codes.

A :class:`MacCode` bundles one encoder per user and a joint decoder for the
real-valued Gaussian MAC ``y = x_1 + ... + x_K + noise``.  Messages are whatever
the concrete code uses (bit vectors for LDPC, integer indices for codebooks).
"""
from __future__ import annotations

import abc
import itertools

import numpy as np

from .ldpc import LdpcCode
from .qam import (PEAK_COMPONENT, complex_to_real, qam_demodulate_llr, qam_modulate,
                  real_to_complex)


class MacCode(abc.ABC):
    """Per-user encoders plus a joint decoder over ``n_code`` real channel uses.

    Subclasses set ``n_code``, ``amplitude`` and ``power`` (one entry per user)
    and implement :meth:`encode_batch` and :meth:`decode_batch`.  The declared
    amplitude and power must hold for every codeword.
    """

    n_code: int
    amplitude: np.ndarray
    power: np.ndarray

    @property
    def num_users(self) -> int:
        return len(self.amplitude)

    @abc.abstractmethod
    def random_messages(self, user: int, rng, size: int):
        """Draw ``size`` uniformly random messages for ``user``."""

    @abc.abstractmethod
    def encode_batch(self, user: int, messages) -> np.ndarray:
        """Encode a batch of messages to an array of shape ``(batch, n_code)``."""

    @abc.abstractmethod
    def decode_batch(self, y, noise_var: float) -> list:
        """Decode received rows ``y`` of shape ``(batch, n_code)``; one message array per user."""

    def encode(self, user: int, message) -> np.ndarray:
        return self.encode_batch(user, self._as_batch(message))[0]

    def decode(self, y, noise_var: float) -> tuple:
        y = np.asarray(y, dtype=float)
        return tuple(m[0] for m in self.decode_batch(y[None, :], noise_var))

    @staticmethod
    def _as_batch(message):
        return np.asarray(message)[None, ...]

    def message_errors(self, user: int, sent, decoded) -> np.ndarray:
        """Boolean frame-error flags per batch row."""
        sent, decoded = np.asarray(sent), np.asarray(decoded)
        if sent.ndim > 1:
            return np.any(sent != decoded, axis=tuple(range(1, sent.ndim)))
        return sent != decoded


class LdpcQamCode(MacCode):
    """Single-user LDPC + Gray 16QAM code carried on interleaved real/imaginary parts.

    Each complex symbol has average energy ``symbol_power`` (unit-energy
    constellation scaled by ``sqrt(symbol_power)``), so each real channel use
    carries ``symbol_power / 2`` on average.  The declared per-codeword power is
    the worst case (all corner points), which keeps the MacCode invariant exact.
    """

    def __init__(self, ldpc: LdpcCode, symbol_power: float = 1.0, max_iter: int = 50):
        if ldpc.n % 4:
            raise ValueError("LDPC length must be a multiple of 4 for 16QAM")
        self.ldpc = ldpc
        self.symbol_power = float(symbol_power)
        self.max_iter = max_iter
        self.scale = np.sqrt(self.symbol_power)
        self.n_code = ldpc.n // 2
        self.amplitude = np.array([PEAK_COMPONENT * self.scale])
        self.power = np.array([PEAK_COMPONENT**2 * self.symbol_power])
        self.nominal_power = self.symbol_power / 2.0
        self.last_converged = None

    @property
    def message_bits(self) -> int:
        return self.ldpc.k

    def random_messages(self, user, rng, size):
        return rng.integers(0, 2, size=(size, self.ldpc.k), dtype=np.uint8)

    def modulate(self, messages) -> np.ndarray:
        """Complex 16QAM symbols (before real interleaving) for a batch of messages."""
        return self.scale * qam_modulate(self.ldpc.encode(messages))

    def encode_batch(self, user, messages):
        if user != 0:
            raise IndexError("LdpcQamCode has a single user")
        return complex_to_real(self.modulate(messages))

    def decode_batch(self, y, noise_var):
        z = real_to_complex(np.asarray(y, dtype=float)) / self.scale
        llr = qam_demodulate_llr(z, max(noise_var, 1e-12) / self.symbol_power)
        bits, converged, _ = self.ldpc.decode(llr, max_iter=self.max_iter)
        self.last_converged = converged
        return [bits]


class RandomCodebookCode(MacCode):
    """Small random Gaussian-MAC codebooks with exhaustive joint ML decoding.

    Codewords are i.i.d. uniform on ``[-amplitude, amplitude]``; ``power`` is the
    largest per-codeword average power actually drawn.  Messages are 0-based
    integer indices.
    """

    def __init__(self, sizes, n_code: int, amplitude=1.0, seed: int = 0):
        self.sizes = tuple(int(s) for s in sizes)
        self.n_code = int(n_code)
        amp = np.broadcast_to(np.asarray(amplitude, dtype=float), (len(self.sizes),))
        rng = np.random.default_rng(seed)
        self.codebooks = [rng.uniform(-a, a, size=(M, self.n_code)) for M, a in zip(self.sizes, amp)]
        self.amplitude = amp.copy()
        self.power = np.array([np.max(np.mean(cb**2, axis=1)) for cb in self.codebooks])
        self._tuples = np.array(list(itertools.product(*[range(M) for M in self.sizes])))
        self._sums = sum(cb[self._tuples[:, k]] for k, cb in enumerate(self.codebooks))

    def random_messages(self, user, rng, size):
        return rng.integers(0, self.sizes[user], size=size)

    def encode_batch(self, user, messages):
        m = np.asarray(messages)
        if np.any((m < 0) | (m >= self.sizes[user])):
            raise ValueError("message index out of range")
        return self.codebooks[user][m]

    def decode_batch(self, y, noise_var):
        y = np.asarray(y, dtype=float)
        d = ((y[:, None, :] - self._sums[None]) ** 2).sum(axis=-1)
        best = self._tuples[np.argmin(d, axis=1)]
        return [best[:, k] for k in range(len(self.sizes))]
