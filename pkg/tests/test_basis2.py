import numpy as np
import pytest

from subgraph_lab.basis2 import (
    enumerate_2ign_basis,
    matrix_equivariance_deviation,
    vectorize_op,
)
from subgraph_lab.errors import TooSmall
from subgraph_lab.graphs import Permutation


def test_basis_has_fifteen_operators():
    assert len(enumerate_2ign_basis(5)) == 15
    names = [op.name for op in enumerate_2ign_basis(5)]
    assert len(set(names)) == 15


def test_basis_needs_n_at_least_four():
    with pytest.raises(TooSmall):
        enumerate_2ign_basis(3)


def test_basis_exact_equivariance(rng):
    for _ in range(20):
        n = rng.randint(4, 7)
        y = rng.normals((n, n))
        sigma = Permutation.random(n, rng)
        for op in enumerate_2ign_basis(n):
            assert matrix_equivariance_deviation(op, y, sigma) == 0.0


def test_basis_rank_fifteen_at_n5():
    ops = enumerate_2ign_basis(5)
    stacked = np.stack([vectorize_op(op, 5).reshape(-1) for op in ops])
    assert np.linalg.matrix_rank(stacked) == 15


def test_diag_sum_to_offdiag_map_is_in_basis():
    n = 5
    ops = {op.name: op for op in enumerate_2ign_basis(n)}

    def reference(y):
        out = np.full((n, n), np.trace(y))
        np.fill_diagonal(out, 0.0)
        return out

    probe = np.arange(n * n, dtype=np.float64).reshape(n, n)
    assert np.allclose(ops["diag->off pooled"].apply(probe), reference(probe))


def test_each_operator_writes_one_orbit():
    n = 5
    for op in enumerate_2ign_basis(n):
        mat = vectorize_op(op, n)
        out = mat @ np.ones(n * n)
        grid = out.reshape(n, n)
        diag_part = np.abs(np.diag(grid)).sum()
        off_part = np.abs(grid - np.diag(np.diag(grid))).sum()
        assert (diag_part == 0.0) != (off_part == 0.0) or (diag_part == 0.0 and off_part == 0.0)
