"""Acceptance suite: one test per criterion, tolerances pinned.

1. Jacobi reduction of tree balls (six branching sequences, depth <= 6).
2. Exact closed-walk moments on Line, Ray, Lattice(2), Lattice(3).
3. Gauss quadrature exactness up to order 2n - 1.
4. Spectra of J_a truncations.
5. Norm lower bounds reach the catalog norms.
6. Classification of norm <= 2 graphs and affine/Dynkin diagram radii.
7. D-infinity kernel vector and finite D_n spectra.
8. Cospectral and non-cospectral pairs.
9. Rotations of periodic branching sequences.
10. Fabrykowski-Gupta Schreier graphs.
"""

import math
import time
from fractions import Fraction
from math import comb

import numpy as np
import pytest

import oracles
from cospectra import DInfinity, Lattice, Line, Ray, RegularRootedTree, RegularTree, BranchingSeq
from cospectra.forbidden import (
    IS_DINFINITY, IS_LINE, IS_RAY, NORM_EXCEEDS_2, affine_a, affine_d, affine_e, classify_norm_le_2,
    dynkin_d, dynkin_e, path_graph,
)
from cospectra.graph_core import ball, closed_walk_count
from cospectra.jacobi import (
    free_jacobi, jacobi_a, jacobi_from_branching, jacobi_moments, point_spectrum_ja,
    quadrature_measure, scaled, top_eigenvalue, truncate,
)
from cospectra.measures import arcsine, convolution_power
from cospectra.schreier import GENERATORS, act, level_spectrum, schreier_level, words
from cospectra.spectra import are_cospectral, compare_rotations, dinfinity_checks, norm_estimate
from cospectra.ssrt import verify_decomposition

DECOMPOSITION_SEQUENCES = {
    "constant 2": BranchingSeq.constant(2),
    "constant 3": BranchingSeq.constant(3),
    "period (2,3)": BranchingSeq.periodic(2, 3),
    "period (3,2)": BranchingSeq.periodic(3, 2),
    "RegularTree(3)": RegularTree(3).branching,
    "RegularTree(4)": RegularTree(4).branching,
}


def test_criterion_01_decomposition_oracle():
    start = time.perf_counter()
    for name, seq in DECOMPOSITION_SEQUENCES.items():
        for depth in range(0, 7):
            rep = verify_decomposition(seq, depth)
            assert rep.dims_ok, (name, depth)
            assert rep.spectra_max_dev <= 1e-8, (name, depth, rep.spectra_max_dev)
            assert rep.conjugation_max_dev <= 1e-10, (name, depth, rep.conjugation_max_dev)
            assert rep.passed
    assert time.perf_counter() - start < 30.0


def test_criterion_02_moment_identities():
    start = time.perf_counter()
    for m in range(13):
        assert closed_walk_count(Line(), 0, 2 * m) == comb(2 * m, m)
        assert closed_walk_count(Ray(), 0, 2 * m) == oracles.catalan(m)
    for m in range(9):
        assert closed_walk_count(Lattice(2), None, 2 * m) == comb(2 * m, m) ** 2
    conv = convolution_power(arcsine().exact_moments(16), 3)
    for k in range(17):
        walks = closed_walk_count(Lattice(3), None, k)
        assert walks == conv[k]
        assert walks == oracles.lattice_walks(3, k)
    assert time.perf_counter() - start < 20.0


QUADRATURE_CASES = {
    "J": free_jacobi(),
    "sqrt2 J": scaled(free_jacobi(), math.sqrt(2)),
    "J_a, a^2 = 3/2": jacobi_a(a_squared=Fraction(3, 2)),
    "RegularTree(3) level 0": jacobi_from_branching(RegularTree(3).branching, 0),
}


@pytest.mark.parametrize("n", [5, 20, 60])
def test_criterion_03_quadrature_exactness(n):
    for name, j in QUADRATURE_CASES.items():
        q = quadrature_measure(j, n)
        exact = jacobi_moments(j, 2 * n - 1)
        for k in range(2 * n):
            approx = float(np.dot(q.weights, q.nodes**k))
            # odd moments vanish, so scale by the absolute moment
            scale = max(abs(float(exact[k])), float(np.dot(q.weights, np.abs(q.nodes) ** k)))
            assert abs(approx - float(exact[k])) <= 1e-9 * scale, (name, n, k)


def test_reference_moments_match_closed_forms():
    # exact moments of J and sqrt(2) J against closed forms
    free = jacobi_moments(free_jacobi(), 20)
    two = jacobi_moments(QUADRATURE_CASES["sqrt2 J"], 20)
    for m in range(11):
        assert free[2 * m] == oracles.catalan(m)
        assert two[2 * m] == 2**m * oracles.catalan(m)
        if 2 * m + 1 <= 20:
            assert free[2 * m + 1] == 0


def test_criterion_04_ja_spectra():
    top = top_eigenvalue(truncate(jacobi_a(2), 400))
    assert abs(top - 4 / math.sqrt(3)) <= 1e-6
    assert abs(max(point_spectrum_ja(2)) - top) <= 1e-6
    for a in (1, 1.2, math.sqrt(2)):
        tops = [top_eigenvalue(truncate(jacobi_a(a), n)) for n in (500, 1000, 2000)]
        assert 2 - 1e-2 <= tops[-1] <= 2
        assert tops[0] < tops[1] < tops[2]


NORM_CASES = (
    [(Ray(), 2.0), (Line(), 2.0), (DInfinity(), 2.0)]
    + [(Lattice(d), 2.0 * d) for d in (1, 2, 3)]
    + [(RegularRootedTree(d), 2 * math.sqrt(d)) for d in (2, 3, 4)]
    + [(RegularTree(d), 2 * math.sqrt(d - 1)) for d in (3, 4, 5)]
)


@pytest.mark.parametrize("family,norm", NORM_CASES, ids=lambda x: x.spec() if hasattr(x, "spec") else "")
def test_criterion_05_norm_catalog(family, norm):
    est = norm_estimate(family)
    assert est.catalog_norm == pytest.approx(norm, abs=1e-12)
    assert est.bounded
    assert est.monotone
    assert 0 <= est.gap <= 1e-2


def test_criterion_06_classification():
    assert classify_norm_le_2(Ray()).label == IS_RAY
    assert classify_norm_le_2(DInfinity()).label == IS_DINFINITY
    assert classify_norm_le_2(Line()).label == IS_LINE
    for fam in (Lattice(2), RegularTree(3), RegularRootedTree(2)):
        c = classify_norm_le_2(fam)
        assert c.label == NORM_EXCEEDS_2
        g = ball(fam, None, c.radius)
        assert c.witness.is_valid_in(g)
        assert tuple(g.labels[p] for p in c.witness.embedding) == c.keys
        for key in c.keys:
            assert fam.is_vertex(key)
    affine = [affine_a(n) for n in range(2, 11)] + [affine_d(n) for n in range(4, 11)]
    affine += [affine_e(n) for n in (6, 7, 8)]
    for g in affine:
        assert abs(oracles.top_eigenvalue(g.to_dense()) - 2) <= 1e-10
    dynkin = [path_graph(n) for n in range(1, 30)] + [dynkin_d(n) for n in range(4, 30)]
    dynkin += [dynkin_e(n) for n in (6, 7, 8)]
    for g in dynkin:
        assert oracles.top_eigenvalue(g.to_dense()) < 2


def test_criterion_07_dinfinity():
    rep = dinfinity_checks()
    assert rep.kernel_residuals and all(res == 0 for _, res in rep.kernel_residuals)
    assert [n for n, _, _ in rep.finite_spectra] == list(range(4, 21))
    assert all(margin > 0 for _, _, margin in rep.finite_spectra)
    assert rep.passed


def test_criterion_08_cospectral_corollaries():
    for d in (2, 3):
        for other in (RegularRootedTree(d * d), RegularTree(d * d + 1)):
            v = are_cospectral(Lattice(d), other)
            assert v.cospectral, v.reasons
            for side in v.evidence.values():
                assert side["endpoint_ok"]
    expected = {
        (Ray(), Line()): "multiplicity",
        (Ray(), DInfinity()): "atoms",
        (Line(), DInfinity()): "multiplicity",
    }
    for (a, b), component in expected.items():
        v = are_cospectral(a, b)
        assert not v.cospectral
        assert any(r.startswith(component) for r in v.reasons), v.reasons
        assert not any(r.startswith("spectrum") for r in v.reasons)


@pytest.mark.parametrize("period", [(2, 3), (2, 2, 3)])
def test_criterion_09_rotations(period):
    rep = compare_rotations(BranchingSeq.periodic(*period))
    assert len(rep.rotations) == len(period)
    assert rep.tail_identity
    assert rep.endpoint_max_diff <= 1e-3
    assert rep.norm_max_diff <= 1e-3
    assert rep.passed


def test_criterion_10_schreier():
    start = time.perf_counter()
    assert np.allclose(level_spectrum(1), [1, 1, 4], atol=1e-10)
    for n in range(1, 6):
        g = schreier_level(n)
        assert (g.degrees == 4).all()
        assert g.is_connected()
    for n in range(0, 9):
        for w in words(n):
            for gen in GENERATORS:
                assert act(gen.inverse, act(gen, w)) == w
                assert act(gen, act(gen, act(gen, w))) == w
    assert time.perf_counter() - start < 30.0
