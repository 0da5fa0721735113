"""Gray-mapped 16QAM modulation and exact bit-LLR demapping."""
from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

BITS_PER_SYMBOL = 4

# Gray-coded 4-PAM per quadrature: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
_PAM_LEVELS = np.array([-3.0, -1.0, 3.0, 1.0])  # indexed by 2*b_first + b_second
_NORM = 1.0 / np.sqrt(10.0)

#: All 16 constellation points, indexed by the integer value of (b0 b1 b2 b3).
CONSTELLATION = np.array(
    [
        (_PAM_LEVELS[(i >> 3 & 1) * 2 + (i >> 2 & 1)] + 1j * _PAM_LEVELS[(i >> 1 & 1) * 2 + (i & 1)])
        * _NORM
        for i in range(16)
    ]
)
#: Largest real or imaginary component of a unit-energy 16QAM symbol.
PEAK_COMPONENT = 3.0 * _NORM


def qam_modulate(bits) -> np.ndarray:
    """Map bits to unit-average-energy 16QAM symbols.

    Bits ``(b0, b1)`` select the in-phase level and ``(b2, b3)`` the quadrature
    level.  Leading axes are preserved; the last axis must be a multiple of 4.
    """
    bits = np.asarray(bits)
    if bits.shape[-1] % BITS_PER_SYMBOL:
        raise ValueError(f"bit count {bits.shape[-1]} is not divisible by 4")
    b = bits.reshape(*bits.shape[:-1], -1, 4).astype(np.intp)
    i_level = _PAM_LEVELS[2 * b[..., 0] + b[..., 1]]
    q_level = _PAM_LEVELS[2 * b[..., 2] + b[..., 3]]
    return (i_level + 1j * q_level) * _NORM


def _pam_llrs(r: np.ndarray, noise_var: float) -> tuple[np.ndarray, np.ndarray]:
    # metric[..., j] = log p(r | level j) up to a constant
    levels = _PAM_LEVELS * _NORM
    metric = -((r[..., None] - levels) ** 2) / (2.0 * noise_var)
    # first bit: indices {0,1} -> 0, {2,3} -> 1 ; second bit: {0,2} -> 0, {1,3} -> 1
    llr_first = logsumexp(metric[..., [0, 1]], axis=-1) - logsumexp(metric[..., [2, 3]], axis=-1)
    llr_second = logsumexp(metric[..., [0, 2]], axis=-1) - logsumexp(metric[..., [1, 3]], axis=-1)
    return llr_first, llr_second


def qam_demodulate_llr(symbols, noise_var: float) -> np.ndarray:
    """Bit LLRs ``log P(b=0|y) / P(b=1|y)`` for received 16QAM symbols.

    ``noise_var`` is the noise variance of each real component.  The Gray map is
    separable in I and Q and the noise components are independent, so the exact
    log-sum over all 16 points factorises into two 4-point sums.
    """
    if noise_var <= 0:
        raise ValueError("noise variance must be positive")
    y = np.asarray(symbols)
    l0, l1 = _pam_llrs(y.real, noise_var)
    l2, l3 = _pam_llrs(y.imag, noise_var)
    out = np.stack([l0, l1, l2, l3], axis=-1)
    return out.reshape(*y.shape[:-1], -1)


def qam_hard_decision(symbols) -> np.ndarray:
    """Nearest-point bit decisions (noiseless round trip helper)."""
    y = np.asarray(symbols)
    idx = np.abs(y[..., None] - CONSTELLATION).argmin(axis=-1)
    bits = (idx[..., None] >> np.arange(3, -1, -1)) & 1
    return bits.reshape(*y.shape[:-1], -1).astype(np.uint8)


def complex_to_real(z) -> np.ndarray:
    """Interleave real and imaginary parts: ``(z_1, ...) -> (Re z_1, Im z_1, ...)``."""
    z = np.asarray(z)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def real_to_complex(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] % 2:
        raise ValueError("real signal length must be even")
    return x[..., 0::2] + 1j * x[..., 1::2]

