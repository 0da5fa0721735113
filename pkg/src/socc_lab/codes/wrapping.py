"""Zero-sum wrapping of digital MAC codes.

Base codewords of length ``n - L`` are split into consecutive chunks of
``n_l - 1`` symbols, and each chunk is mapped onto the zero-sum hyperplane of
its block with the plane map ``U_{n_l}``.  The receiver applies the transposes,
which removes any constant offset within a block (e.g. analog over-the-air
signals) and leaves i.i.d. Gaussian noise i.i.d. Gaussian with the same variance.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ..zerosum import build_planemap, max_row_abs_sum
from .base import MacCode


@dataclass(frozen=True)
class BlockPartition:
    """Block lengths ``(n_1, ..., n_L)`` of one transmission of ``n = sum(n_l)`` uses."""

    lengths: tuple[int, ...]

    def __post_init__(self):
        lengths = tuple(int(v) for v in self.lengths)
        if not lengths:
            raise ValueError("a partition needs at least one block")
        if min(lengths) < 1:
            raise ValueError("block lengths must be positive")
        object.__setattr__(self, "lengths", lengths)

    @property
    def L(self) -> int:
        return len(self.lengths)

    @property
    def n(self) -> int:
        return sum(self.lengths)

    @property
    def base_length(self) -> int:
        """Number of base-code symbols carried: ``n - L``."""
        return self.n - self.L

    @cached_property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.lengths)])

    @cached_property
    def base_offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum([v - 1 for v in self.lengths])])

    @cached_property
    def runs(self) -> list[tuple[int, int, int]]:
        """Maximal runs ``(first_block, count, length)`` of equal block lengths."""
        out = []
        start = 0
        for i in range(1, self.L + 1):
            if i == self.L or self.lengths[i] != self.lengths[start]:
                out.append((start, i - start, self.lengths[start]))
                start = i
        return out

    def block_ids(self) -> np.ndarray:
        """Block index of every channel use."""
        return np.repeat(np.arange(self.L), self.lengths)

    def peak_factor(self) -> float:
        """Worst-case peak-amplitude blowup over all blocks."""
        return max(max_row_abs_sum(build_planemap(v)) for v in set(self.lengths))


def beta_prime(beta) -> Fraction:
    """Smallest ``1/m`` (m a positive integer) strictly greater than ``beta``.

    Floats within a relative ``1e-12`` of ``1/m`` are treated as exactly ``1/m``,
    so ``beta = 0.1`` gives ``1/9``.
    """
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    if isinstance(beta, Fraction):
        m = beta.denominator // beta.numerator
        if Fraction(1, m) <= beta:
            m -= 1
        return Fraction(1, m)
    r = 1.0 / float(beta)
    nearest = round(r)
    if abs(r - nearest) <= 1e-12 * r:
        return Fraction(1, nearest - 1)
    return Fraction(1, int(np.floor(r)))


def make_partition(n: int, beta: float) -> BlockPartition:
    """Blocks of length ``1/beta'`` and a final block taking the rest.

    ``L`` is the largest count with ``L <= beta' n`` and a final block of at
    least ``1/beta'`` uses; it must also satisfy ``L >= beta n``.
    """
    bp = beta_prime(beta)
    m = bp.denominator
    if m < 2:
        raise ValueError(f"analog rate beta={beta} leaves no room for digital symbols")
    n = int(n)
    L = int(Fraction(n) * bp)  # floor(beta' n); final block >= m iff L*m <= n
    if L < 1 or L < beta * n:
        raise ValueError(f"n={n} is too small for analog rate beta={beta}")
    return BlockPartition((m,) * (L - 1) + (n - (L - 1) * m,))


def partition_for_base_length(n_base: int, beta: float) -> BlockPartition:
    """Partition whose wrapped code carries exactly ``n_base`` base symbols.

    Uses blocks of length ``m = 1/beta'`` (each carrying ``m - 1`` symbols) and
    puts the remainder in the final block.
    """
    m = beta_prime(beta).denominator
    if m < 2:
        raise ValueError("analog rate too high to carry digital symbols")
    L = n_base // (m - 1)
    if L < 1:
        raise ValueError("base code too short for the requested analog rate")
    last = n_base - (L - 1) * (m - 1) + 1
    part = BlockPartition((m,) * (L - 1) + (last,))
    if part.L < beta * part.n:
        raise ValueError(f"cannot reach analog rate {beta} with base length {n_base}")
    return part


def wrap(partition: BlockPartition, x_base) -> np.ndarray:
    """Map base symbols (last axis ``n - L``) to zero-sum blocks (last axis ``n``)."""
    x = np.asarray(x_base, dtype=float)
    if x.shape[-1] != partition.base_length:
        raise ValueError(f"expected {partition.base_length} base symbols, got {x.shape[-1]}")
    out = np.empty(x.shape[:-1] + (partition.n,))
    for first, count, length in partition.runs:
        U = build_planemap(length).matrix
        b0, b1 = partition.base_offsets[first], partition.base_offsets[first + count]
        o0, o1 = partition.offsets[first], partition.offsets[first + count]
        chunk = x[..., b0:b1].reshape(*x.shape[:-1], count, length - 1)
        out[..., o0:o1] = (chunk @ U.T).reshape(*x.shape[:-1], count * length)
    return out


def unwrap(partition: BlockPartition, y) -> np.ndarray:
    """Apply the per-block adjoints: last axis ``n`` -> ``n - L``."""
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != partition.n:
        raise ValueError(f"expected {partition.n} channel outputs, got {y.shape[-1]}")
    out = np.empty(y.shape[:-1] + (partition.base_length,))
    for first, count, length in partition.runs:
        U = build_planemap(length).matrix
        b0, b1 = partition.base_offsets[first], partition.base_offsets[first + count]
        o0, o1 = partition.offsets[first], partition.offsets[first + count]
        chunk = y[..., o0:o1].reshape(*y.shape[:-1], count, length)
        out[..., b0:b1] = (chunk @ U).reshape(*y.shape[:-1], count * (length - 1))
    return out


class WrappedCode(MacCode):
    """A base :class:`MacCode` of length ``n - L`` turned into a per-block zero-sum code."""

    def __init__(self, base: MacCode, partition: BlockPartition):
        if base.n_code != partition.base_length:
            raise ValueError(
                f"base code length {base.n_code} != partition capacity {partition.base_length}")
        self.base = base
        self.partition = partition
        self.n_code = partition.n
        self.amplitude = base.amplitude * partition.peak_factor()
        self.power = base.power * base.n_code / partition.n

    def random_messages(self, user, rng, size):
        return self.base.random_messages(user, rng, size)

    def encode_batch(self, user, messages):
        return wrap(self.partition, self.base.encode_batch(user, messages))

    def decode_batch(self, y, noise_var):
        return self.base.decode_batch(unwrap(self.partition, y), noise_var)

    def message_errors(self, user, sent, decoded):
        return self.base.message_errors(user, sent, decoded)


def wrap_encode(code: WrappedCode, user: int, message) -> np.ndarray:
    """Wrapped codeword of ``message`` for ``user`` (length ``n``)."""
    return code.encode(user, message)


def unwrap_receive(code: WrappedCode, y) -> np.ndarray:
    """Base-code decoder input recovered from a wrapped-channel output."""
    return unwrap(code.partition, y)


class ZeroSumEncoder(BaseEstimator, TransformerMixin):
    """Scikit-learn transformer wrapping rows of base symbols into zero-sum blocks.

    Parameters
    ----------
    block_lengths : sequence of int, optional
        Explicit partition.  Its capacity ``n - L`` must equal the number of
        input features.
    beta : float, optional
        Analog rate used to derive the partition from the feature count when
        ``block_lengths`` is not given.

    Attributes
    ----------
    partition_ : BlockPartition
    n_features_in_ : int
    """

    def __init__(self, block_lengths=None, beta=0.1):
        self.block_lengths = block_lengths
        self.beta = beta

    def fit(self, X, y=None):
        X = check_array(X)
        self.n_features_in_ = X.shape[1]
        if self.block_lengths is not None:
            part = BlockPartition(tuple(self.block_lengths))
            if part.base_length != X.shape[1]:
                raise ValueError(
                    f"partition carries {part.base_length} symbols but X has {X.shape[1]} features")
        else:
            part = partition_for_base_length(X.shape[1], self.beta)
        self.partition_ = part
        return self

    def transform(self, X):
        check_is_fitted(self, "partition_")
        X = check_array(X)
        return wrap(self.partition_, X)

    def inverse_transform(self, X):
        check_is_fitted(self, "partition_")
        X = check_array(X)
        return unwrap(self.partition_, X)
