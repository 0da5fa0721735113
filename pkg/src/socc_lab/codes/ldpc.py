"""Binary LDPC codes: seeded construction, systematic encoding, sum-product decoding."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

_LLR_CLIP = 30.0
_TANH_FLOOR = 1e-12
_ATANH_CEIL = 1.0 - 1e-15


def regular_parity_matrix(n: int, m: int, col_weight: int = 3, seed: int = 0,
                          max_attempts: int = 50) -> np.ndarray:
    """Pseudo-random parity-check matrix with constant column weight.

    Row weights are kept as even as possible (``n * col_weight / m`` rounded).
    Columns are placed greedily on the least-loaded rows while avoiding length-4
    cycles; the construction is deterministic in ``seed``.
    """
    if not 0 < m < n:
        raise ValueError("need 0 < m < n")
    if col_weight > m:
        raise ValueError("column weight exceeds number of checks")
    for attempt in range(max_attempts):
        rng = np.random.default_rng([seed, attempt])
        H = _greedy_fill(n, m, col_weight, rng, avoid_4cycles=attempt < max_attempts // 2)
        if H is not None:
            return H
    raise RuntimeError("could not construct parity-check matrix")


def _greedy_fill(n, m, w, rng, avoid_4cycles):
    H = np.zeros((m, n), dtype=np.uint8)
    degree = np.zeros(m, dtype=int)
    paired = np.zeros((m, m), dtype=bool)
    for j in rng.permutation(n):
        chosen: list[int] = []
        order = np.lexsort((rng.random(m), degree))
        for r in order:
            if avoid_4cycles and any(paired[r, c] for c in chosen):
                continue
            chosen.append(int(r))
            if len(chosen) == w:
                break
        if len(chosen) < w:
            return None
        for a in chosen:
            for b in chosen:
                paired[a, b] = True
        H[chosen, j] = 1
        degree[chosen] += 1
    return H


def _gf2_rref(H: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) on bit-packed rows."""
    m, n = H.shape
    packed = np.packbits(H.astype(np.uint8), axis=1)
    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row == m:
            break
        byte, bit = divmod(col, 8)
        mask = np.uint8(0x80 >> bit)
        hits = np.nonzero(packed[row:, byte] & mask)[0]
        if hits.size == 0:
            continue
        p = row + hits[0]
        if p != row:
            packed[[row, p]] = packed[[p, row]]
        others = np.nonzero(packed[:, byte] & mask)[0]
        others = others[others != row]
        packed[others] ^= packed[row]
        pivots.append(col)
        row += 1
    R = np.unpackbits(packed, axis=1, count=n)[:row]
    return R, pivots


@dataclass(frozen=True, eq=False)
class LdpcCode:
    """Systematic binary LDPC code defined by a parity-check matrix ``H``.

    Message bits occupy the non-pivot columns of the GF(2) row-reduced ``H``;
    parity bits are the pivot columns.
    """

    H: np.ndarray
    info_cols: np.ndarray
    parity_cols: np.ndarray
    parity_map: np.ndarray  # (k, rank) float32, parity = msg @ parity_map mod 2
    edge_var: np.ndarray
    edge_chk: np.ndarray
    chk_starts: np.ndarray
    var_order: np.ndarray
    var_starts: np.ndarray

    @classmethod
    def from_parity_matrix(cls, H) -> "LdpcCode":
        H = (np.asarray(H) % 2).astype(np.uint8)
        m, n = H.shape
        R, pivots = _gf2_rref(H)
        parity_cols = np.array(pivots, dtype=np.intp)
        info_cols = np.setdiff1d(np.arange(n), parity_cols)
        parity_map = R[:, info_cols].T.astype(np.float32)
        chk, var = np.nonzero(H)  # row-major: sorted by check
        if np.any(np.bincount(chk, minlength=m) == 0) or np.any(np.bincount(var, minlength=n) == 0):
            raise ValueError("every check and every variable needs at least one edge")
        chk_starts = np.flatnonzero(np.r_[True, chk[1:] != chk[:-1]])
        var_order = np.argsort(var, kind="stable")
        sorted_var = var[var_order]
        var_starts = np.flatnonzero(np.r_[True, sorted_var[1:] != sorted_var[:-1]])
        return cls(H=H, info_cols=info_cols, parity_cols=parity_cols, parity_map=parity_map,
                   edge_var=var, edge_chk=chk, chk_starts=chk_starts,
                   var_order=var_order, var_starts=var_starts)

    @classmethod
    def regular(cls, n: int, rate: float, col_weight: int = 3, seed: int = 0) -> "LdpcCode":
        """Seeded code of length ``n`` with ``round(n * (1 - rate))`` checks."""
        m = int(round(n * (1.0 - rate)))
        return cls.from_parity_matrix(regular_parity_matrix(n, m, col_weight, seed))

    @classmethod
    def from_alist(cls, path) -> "LdpcCode":
        return cls.from_parity_matrix(read_alist(path))

    @property
    def n(self) -> int:
        return self.H.shape[1]

    @property
    def k(self) -> int:
        return self.info_cols.size

    @property
    def rate(self) -> float:
        return self.k / self.n

    def encode(self, message_bits) -> np.ndarray:
        """Codeword bits for ``message_bits`` of shape ``(..., k)``."""
        u = np.asarray(message_bits)
        if u.shape[-1] != self.k:
            raise ValueError(f"message length {u.shape[-1]} != code dimension {self.k}")
        lead = u.shape[:-1]
        u2 = u.reshape(-1, self.k)
        parity = (u2.astype(np.float32) @ self.parity_map).astype(np.int64) & 1
        c = np.empty((u2.shape[0], self.n), dtype=np.uint8)
        c[:, self.info_cols] = u2
        c[:, self.parity_cols] = parity
        return c.reshape(*lead, self.n)

    def syndrome(self, bits) -> np.ndarray:
        b = np.asarray(bits)
        return (b.astype(np.float32) @ self.H.T.astype(np.float32)).astype(np.int64) & 1

    def decode(self, llrs, max_iter: int = 50):
        """Sum-product decoding with syndrome early stop.

        Parameters
        ----------
        llrs : array_like, shape (..., n)
            Channel LLRs, positive favouring bit 0.
        max_iter : int
            Iteration cap.

        Returns
        -------
        message_bits : ndarray, shape (..., k)
        converged : ndarray of bool, shape (...)
            False where the syndrome was still nonzero at the cap.
        iterations : ndarray of int, shape (...)
        """
        L = np.asarray(llrs, dtype=float)
        if L.shape[-1] != self.n:
            raise ValueError(f"LLR length {L.shape[-1]} != code length {self.n}")
        lead = L.shape[:-1]
        L = np.clip(L.reshape(-1, self.n), -_LLR_CLIP, _LLR_CLIP)
        B = L.shape[0]
        hard = (L < 0).astype(np.uint8)
        iterations = np.zeros(B, dtype=int)
        active = np.flatnonzero(self.syndrome(hard).any(axis=1))
        v2c = L[active][:, self.edge_var]
        for it in range(1, max_iter + 1):
            if active.size == 0:
                break
            c2v = self._check_update(v2c)
            total = L[active] + self._var_sum(c2v)
            hard_a = (total < 0).astype(np.uint8)
            hard[active] = hard_a
            iterations[active] = it
            still = self.syndrome(hard_a).any(axis=1)
            keep = np.flatnonzero(still)
            active = active[keep]
            v2c = np.clip(total[keep][:, self.edge_var] - c2v[keep], -_LLR_CLIP, _LLR_CLIP)
        converged = np.ones(B, dtype=bool)
        converged[active] = False
        msg = hard[:, self.info_cols]
        return msg.reshape(*lead, self.k), converged.reshape(lead), iterations.reshape(lead)

    def _check_update(self, v2c):
        t = np.tanh(0.5 * v2c)
        neg = t < 0
        logabs = np.log(np.maximum(np.abs(t), _TANH_FLOOR))
        s_log = np.add.reduceat(logabs, self.chk_starts, axis=1)
        s_neg = np.add.reduceat(neg.astype(np.int32), self.chk_starts, axis=1)
        ext_log = s_log[:, self.edge_chk] - logabs
        ext_neg = (s_neg[:, self.edge_chk] - neg) & 1
        mag = np.minimum(np.exp(ext_log), _ATANH_CEIL)
        return 2.0 * np.arctanh(np.where(ext_neg, -mag, mag))

    def _var_sum(self, c2v):
        return np.add.reduceat(c2v[:, self.var_order], self.var_starts, axis=1)


def read_alist(path) -> np.ndarray:
    """Parse a parity-check matrix in MacKay's alist format.

    Entry lists may be zero-padded to the maximum degree or unpadded.
    """
    vals = [int(t) for t in Path(path).read_text().split()]
    n, m, max_col = vals[0], vals[1], vals[2]
    col_deg = vals[4 : 4 + n]
    pos = 4 + n + m
    padded = len(vals) == pos + n * max_col + m * vals[3]
    H = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        width = max_col if padded else col_deg[j]
        for r in vals[pos : pos + col_deg[j]]:
            if r > 0:
                H[r - 1, j] = 1
        pos += width
    return H


def write_alist(H, path) -> None:
    """Write ``H`` in alist format (zero-padded entry lists)."""
    H = np.asarray(H)
    m, n = H.shape
    col_lists = [np.flatnonzero(H[:, j]) + 1 for j in range(n)]
    row_lists = [np.flatnonzero(H[i, :]) + 1 for i in range(m)]
    max_col = max(len(c) for c in col_lists)
    max_row = max(len(r) for r in row_lists)
    lines = [f"{n} {m}", f"{max_col} {max_row}",
             " ".join(str(len(c)) for c in col_lists),
             " ".join(str(len(r)) for r in row_lists)]
    for c in col_lists:
        lines.append(" ".join(str(v) for v in list(c) + [0] * (max_col - len(c))))
    for r in row_lists:
        lines.append(" ".join(str(v) for v in list(r) + [0] * (max_row - len(r))))
    Path(path).write_text("\n".join(lines) + "\n")
