"""Marked spectra, band structure of periodic components, norm lower
bounds, vertex measures, cospectrality and the D-infinity checks."""

import math
from fractions import Fraction

import numpy as np
import pytest

import oracles
from cospectra import SSRT, BranchingSeq, DInfinity, Lattice, Line, Ray, RegularRootedTree, RegularTree
from cospectra.errors import InvalidParameter, NotCataloged
from cospectra.families import FiniteImported
from cospectra.forbidden import dynkin_d, path_graph
from cospectra.graph_core import ball, closed_walk_count
from cospectra.jacobi import point_spectrum_ja
from cospectra.measures import moments_of
from cospectra.spectra import (
    ONE, UNIFORM_INFINITE, _lanczos_top, are_cospectral, ball_top, compare_rotations,
    dinfinity_graph, marked_spectrum, norm_estimate, periodic_bands, uniform, vertex_measure,
)


def bloch_bands(period_sq, samples=4001):
    """Bands of the two-sided periodic Jacobi matrix from its Bloch matrices."""
    b = np.sqrt(np.asarray(period_sq, dtype=float))
    p = len(b)
    branches = []
    for k in np.linspace(0, np.pi, samples):
        m = np.zeros((p, p), dtype=complex)
        for i in range(p - 1):
            m[i, i + 1] = m[i + 1, i] = b[i]
        if p == 1:
            m[0, 0] = 2 * b[0] * np.cos(k)
        elif p == 2:
            m[0, 1] = b[0] + b[1] * np.exp(-1j * k)
            m[1, 0] = np.conj(m[0, 1])
        else:
            m[p - 1, 0] += b[p - 1] * np.exp(1j * k)
            m[0, p - 1] += b[p - 1] * np.exp(-1j * k)
        branches.append(np.linalg.eigvalsh(m))
    branches = np.array(branches)
    return [(branches[:, i].min(), branches[:, i].max()) for i in range(p)]


def test_period_two_bands_closed_form():
    bands = periodic_bands([2, 3])
    lo, hi = math.sqrt(3) - math.sqrt(2), math.sqrt(3) + math.sqrt(2)
    assert np.allclose(bands, [(-hi, -lo), (lo, hi)], atol=1e-12, rtol=0)


@pytest.mark.parametrize("period", [(2,), (2, 3), (2, 2, 3), (3, 2, 5)])
def test_bands_match_bloch_oracle(period):
    got = periodic_bands(period)
    expected = []
    for lo, hi in sorted(bloch_bands(period)):
        if expected and lo - expected[-1][1] < 1e-6:
            expected[-1] = (expected[-1][0], max(hi, expected[-1][1]))
        else:
            expected.append((lo, hi))
    assert len(got) == len(expected)
    for (a, b), (c, d) in zip(got, expected):
        assert a == pytest.approx(c, abs=1e-6)
        assert b == pytest.approx(d, abs=1e-6)


def test_catalog_norms_and_multiplicities():
    assert marked_spectrum(Ray()).multiplicity == ONE
    assert marked_spectrum(Line()).multiplicity == uniform(2)
    assert marked_spectrum(Lattice(2)).norm == 4
    assert marked_spectrum(RegularRootedTree(3)).norm == pytest.approx(2 * math.sqrt(3))
    assert marked_spectrum(RegularTree(5)).norm == 4
    assert marked_spectrum(RegularTree(5)).multiplicity == UNIFORM_INFINITE
    assert marked_spectrum(DInfinity()).atoms == ((0.0, 1),)


def test_ssrt_catalog_aliases():
    assert marked_spectrum(SSRT(BranchingSeq.constant(3))) == marked_spectrum(RegularRootedTree(3))
    assert marked_spectrum(SSRT(BranchingSeq((4,), (3,)))).radius_sq == 12


def test_derived_spectrum_period_two_three():
    ms = marked_spectrum(SSRT(BranchingSeq.periodic(2, 3)))
    assert len(ms.bands) == 2
    assert ms.atoms == ((0.0, None),)
    assert ms.norm == pytest.approx(math.sqrt(2) + math.sqrt(3), abs=1e-12)


def test_derived_prefix_atoms_match_ja_point_spectrum():
    ms = marked_spectrum(SSRT(BranchingSeq((5,), (2,))))
    # the level-0 component is sqrt(2) J_a with a^2 = 5/2
    pos = math.sqrt(2) * max(point_spectrum_ja(a_squared=Fraction(5, 2)))
    assert [x for x, _ in ms.atoms] == pytest.approx([-pos, pos], abs=1e-9)
    assert [m for _, m in ms.atoms] == [1, 1]


def test_finite_input_not_cataloged():
    with pytest.raises(NotCataloged):
        marked_spectrum(FiniteImported(path_graph(3)))


@pytest.mark.parametrize("family", [Ray(), Line(), DInfinity(), RegularTree(3), RegularTree(4),
                                    RegularRootedTree(2), RegularRootedTree(3)], ids=lambda f: f.spec())
def test_vertex_measure_moments_match_walks(family):
    m = vertex_measure(family)
    got = moments_of(m, 12)
    walks = [closed_walk_count(family, None, k) for k in range(13)]
    if isinstance(family, DInfinity):
        # the base vertex sees the arcsine law of the line
        walks = [closed_walk_count(Line(), 0, k) for k in range(13)]
    for k in range(13):
        assert got[k] == pytest.approx(walks[k], abs=1e-9 * max(1, walks[k]))


def test_lattice_vertex_measure_moments():
    m = vertex_measure(Lattice(2))
    got = m.moments(8)
    for k in (0, 2, 4, 6, 8):
        assert got[k] == pytest.approx(oracles.lattice_walks(2, k), rel=1e-4)


def test_ball_top_methods():
    assert ball_top(Line(), 5).method == "dense"
    assert ball_top(RegularTree(3), 100).method == "jacobi-reduction"
    small = ball_top(RegularTree(3), 6)
    assert small.method == "dense"
    # reduction and dense agree on a ball both can handle
    from cospectra.spectra import _tree_ball_top

    assert _tree_ball_top(RegularTree(3), 6) == pytest.approx(small.lower_bound, abs=1e-12)


def test_lanczos_matches_dense():
    g = ball(Lattice(2), None, 15)
    assert _lanczos_top(g) == pytest.approx(oracles.top_eigenvalue(g.to_dense()), abs=1e-9)


def test_norm_estimate_custom_radii():
    est = norm_estimate(Ray(), (1, 2, 3))
    assert [p.radius for p in est.points] == [1, 2, 3]
    assert est.lower_bounds == pytest.approx([1.0, math.sqrt(2), 2 * math.cos(math.pi / 5)])
    assert est.to_csv().splitlines()[0] == "radius,lower_bound"
    with pytest.raises(InvalidParameter):
        norm_estimate(Ray(), (3, 2))


def test_norm_estimate_thread_count_does_not_change_output():
    a = norm_estimate(Lattice(2), (5, 10), workers=1)
    b = norm_estimate(Lattice(2), (5, 10), workers=3)
    assert a.to_json() == b.to_json()


def test_cospectral_verdicts():
    v = are_cospectral(Lattice(2), RegularRootedTree(4), evidence=False)
    assert v.cospectral and v.label == "Cospectral"
    v = are_cospectral(Ray(), RegularRootedTree(2), evidence=False)
    assert not v.cospectral
    assert any(r.startswith("spectrum") for r in v.reasons)
    v = are_cospectral(SSRT(BranchingSeq.periodic(2, 3)), SSRT(BranchingSeq.periodic(3, 2)), evidence=False)
    assert v.cospectral


def test_cospectral_evidence_json():
    v = are_cospectral(Ray(), Line())
    out = v.to_json()
    assert out["verdict"] == "NotCospectral"
    assert out["evidence"]["a"]["positivity"]["all_positive"]
    assert out["evidence"]["a"]["endpoint_ok"]


def test_dinfinity_graph_is_dynkin_d():
    for n in range(4, 12):
        a = np.linalg.eigvalsh(dinfinity_graph(n).to_dense().astype(float))
        b = np.linalg.eigvalsh(dynkin_d(n).to_dense().astype(float))
        assert np.allclose(a, b, atol=1e-12)
        # closed form: 2 cos((2k - 1) pi / (2n - 2)), k = 1..n-1, plus 0
        k = np.arange(1, n)
        expected = np.sort(np.concatenate([[0.0], 2 * np.cos((2 * k - 1) * np.pi / (2 * n - 2))]))
        assert np.allclose(a, expected, atol=1e-12)


def test_rotation_report_json():
    rep = compare_rotations(BranchingSeq.periodic(2, 3), radii=(50, 100), quadrature_size=200)
    out = rep.to_json()
    assert out["rotations"] == ["2,3", "3,2"]
    assert out["tail_identity"] is True
