"""The 15-element basis of linear S_n-equivariant maps R^{n^2} -> R^{n^2}.

Each basis map is a single pool/broadcast composition between the two orbits of
[n]^2 (diagonal and off-diagonal) and writes into exactly one output orbit.
Sums use the same exact (value-sorted) reduction as the rank-3 machinery, so
equivariance holds bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooSmall
from .graphs import Permutation
from .orbit import _exact_sum, _offdiag_mask


def _diag(y: np.ndarray) -> np.ndarray:
    return np.diagonal(y).copy()


def _off(y: np.ndarray) -> np.ndarray:
    return y * _offdiag_mask(y.shape[0])


def _from_diag(vec: np.ndarray) -> np.ndarray:
    return np.diag(vec)


def _row_sums(f: np.ndarray) -> np.ndarray:
    return _exact_sum(f, (1,))


def _col_sums(f: np.ndarray) -> np.ndarray:
    return _exact_sum(f, (0,))


def _total(f: np.ndarray) -> float:
    return _exact_sum(f, (0, 1))


@dataclass(frozen=True)
class Basis2Op:
    name: str
    fn: object

    def apply(self, y: np.ndarray) -> np.ndarray:
        return self.fn(np.asarray(y, dtype=np.float64))


def _ops(n: int) -> list[Basis2Op]:
    ones_off = _offdiag_mask(n).astype(np.float64)

    def dd_id(y):  # D'_i = D_i
        return _from_diag(_diag(y))

    def dd_sum(y):  # D'_i = sum_k D_k
        return np.eye(n) * _exact_sum(_diag(y), (0,))

    def do_first(y):  # F'_ij = D_i
        return _diag(y)[:, None] * ones_off

    def do_second(y):  # F'_ij = D_j
        return _diag(y)[None, :] * ones_off

    def do_sum(y):  # F'_ij = sum_k D_k
        return _exact_sum(_diag(y), (0,)) * ones_off

    def od_row(y):  # D'_i = sum_{k != i} F_ik
        return _from_diag(_row_sums(_off(y)))

    def od_col(y):  # D'_i = sum_{k != i} F_ki
        return _from_diag(_col_sums(_off(y)))

    def od_total(y):  # D'_i = sum_{k != l} F_kl
        return np.eye(n) * _total(_off(y))

    def oo_id(y):
        return _off(y)

    def oo_transpose(y):
        return _off(y).T.copy()

    def oo_row_first(y):  # F'_ij = sum_{k != i} F_ik
        return _row_sums(_off(y))[:, None] * ones_off

    def oo_row_second(y):  # F'_ij = sum_{k != j} F_jk
        return _row_sums(_off(y))[None, :] * ones_off

    def oo_col_first(y):  # F'_ij = sum_{k != i} F_ki
        return _col_sums(_off(y))[:, None] * ones_off

    def oo_col_second(y):  # F'_ij = sum_{k != j} F_kj
        return _col_sums(_off(y))[None, :] * ones_off

    def oo_total(y):  # F'_ij = sum_{k != l} F_kl
        return _total(_off(y)) * ones_off

    named = [
        ("diag->diag identity", dd_id),
        ("diag->diag pooled", dd_sum),
        ("diag->off row", do_first),
        ("diag->off col", do_second),
        ("diag->off pooled", do_sum),
        ("off->diag row-sum", od_row),
        ("off->diag col-sum", od_col),
        ("off->diag pooled", od_total),
        ("off->off identity", oo_id),
        ("off->off transpose", oo_transpose),
        ("off->off row-sum at i", oo_row_first),
        ("off->off row-sum at j", oo_row_second),
        ("off->off col-sum at i", oo_col_first),
        ("off->off col-sum at j", oo_col_second),
        ("off->off pooled", oo_total),
    ]
    return [Basis2Op(name, fn) for name, fn in named]


def enumerate_2ign_basis(n: int) -> list[Basis2Op]:
    """All bell(4) = 15 equivariant linear operators on n x n matrices."""
    if n < 4:
        raise TooSmall(f"basis enumeration needs n >= 4, got {n}")
    return _ops(n)


def vectorize_op(op: Basis2Op, n: int) -> np.ndarray:
    """The (n^2, n^2) matrix of a basis operator in the standard basis."""
    mat = np.zeros((n * n, n * n))
    for a in range(n):
        for b in range(n):
            e = np.zeros((n, n))
            e[a, b] = 1.0
            mat[:, a * n + b] = op.apply(e).reshape(-1)
    return mat


def matrix_equivariance_deviation(op: Basis2Op, y: np.ndarray, sigma: Permutation) -> float:
    inv = sigma.inverse
    lhs = op.apply(y[np.ix_(inv, inv)])
    rhs = op.apply(y)[np.ix_(inv, inv)]
    return float(np.max(np.abs(lhs - rhs), initial=0.0))
