"""Shift operators on tree balls, multiplicities, the sphere basis and the
decomposition audit."""

import numpy as np
import pytest

from cospectra import SSRT, BranchingSeq, RegularTree
from cospectra.errors import DimensionMismatch, SizeLimitExceeded
from cospectra.graph_core import ball
from cospectra.ssrt import (
    _mgs_complement, build_sphere_basis, decompose, multiplicities, shift_adjoint_apply, shift_apply,
    sphere_sizes, verify_decomposition,
)

SEQS = [BranchingSeq.constant(2), BranchingSeq.periodic(2, 3), BranchingSeq((4,), (3,)),
        BranchingSeq((2, 5), (3, 2))]


@pytest.mark.parametrize("seq", SEQS, ids=str)
def test_shifts_sum_to_ball_adjacency(seq):
    depth = 3
    n = sum(sphere_sizes(seq, depth))
    a = ball(SSRT(seq), (), depth).to_dense().astype(float)
    eye = np.eye(n)
    h = np.column_stack([shift_apply(seq, depth, e) for e in eye])
    hs = np.column_stack([shift_adjoint_apply(seq, depth, e) for e in eye])
    assert np.array_equal(h.T, hs)
    assert np.array_equal(h + hs, a)


@pytest.mark.parametrize("seq", SEQS, ids=str)
def test_multiplicities_fill_the_ball(seq):
    for depth in range(6):
        total = sum(multiplicities(seq, k) * (depth - k + 1) for k in range(depth + 1))
        assert total == sum(sphere_sizes(seq, depth))


def test_multiplicity_values():
    seq = BranchingSeq.periodic(2, 3)
    assert [multiplicities(seq, n) for n in range(5)] == [1, 1, 4, 6, 24]


def test_decomposition_components():
    dec = decompose(RegularTree(3).branching, 4)
    assert [c.multiplicity for c in dec.components] == [1, 2, 3, 6]
    assert len(dec.distinct_jacobis(1)) == 1
    assert dec.extend(6).components[:4] == dec.components


@pytest.mark.parametrize("d", [2, 3, 5])
def test_mgs_complement_is_orthonormal_and_zero_sum(d):
    q = _mgs_complement(d)
    assert q.shape == (d, d - 1)
    assert np.allclose(q.T @ q, np.eye(d - 1), atol=1e-14)
    assert np.allclose(q.sum(axis=0), 0, atol=1e-14)


def test_sphere_basis_is_orthogonal():
    b = build_sphere_basis(BranchingSeq.periodic(2, 3), 4)
    q = b.matrix()
    assert q.shape[0] == q.shape[1]
    assert np.allclose(q.T @ q, np.eye(q.shape[1]), atol=1e-13)


@pytest.mark.parametrize("seq", SEQS, ids=str)
def test_verify_decomposition_passes(seq):
    rep = verify_decomposition(seq, 4, workers=2)
    assert rep.passed, rep.to_json()
    assert rep.to_json()["passed"] is True


def test_budget_and_dimension_errors():
    with pytest.raises(SizeLimitExceeded):
        verify_decomposition(BranchingSeq.constant(3), 8, budget=1000)
    with pytest.raises(DimensionMismatch):
        shift_apply(BranchingSeq.constant(2), 2, np.zeros(3))
