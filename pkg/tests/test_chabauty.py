import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from latticelab import chabauty as ch
from latticelab.errors import PreconditionError


# -- covolume -----------------------------------------------------------------

def test_covolume_standard_basis():
    assert ch.covolume([[1, 0], [0, 1]]) == 1


def test_covolume_hexagonal():
    v = ch.covolume([[1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    assert abs(v - math.sqrt(3) / 2) < 1e-12


def test_covolume_unimodular_invariance_exact():
    rng = np.random.default_rng(22)
    basis = [[Fraction(2), Fraction(1)], [Fraction(1, 3), Fraction(5, 2)]]
    reference = ch.covolume(basis)
    for _ in range(500):
        # Random integer unimodular matrix from elementary operations.
        u = np.eye(2, dtype=np.int64)
        for _ in range(4):
            k = int(rng.integers(-3, 4))
            if rng.uniform() < 0.5:
                u = u @ np.array([[1, k], [0, 1]])
            else:
                u = u @ np.array([[1, 0], [k, 1]])
        new_basis = [
            [u[0, 0] * basis[0][0] + u[0, 1] * basis[1][0],
             u[0, 0] * basis[0][1] + u[0, 1] * basis[1][1]],
            [u[1, 0] * basis[0][0] + u[1, 1] * basis[1][0],
             u[1, 0] * basis[0][1] + u[1, 1] * basis[1][1]],
        ]
        assert ch.covolume(new_basis) == reference


def test_covolume_rank_deficient_rejected():
    with pytest.raises(PreconditionError):
        ch.covolume([[1, 2], [2, 4]])


# -- reduction and shortest vectors -----------------------------------------------

def test_reduce_skewed_basis():
    red = ch.reduce_basis([[1.0, 0.0], [5.0, 1.0]])
    norms = sorted(np.linalg.norm(red, axis=1))
    assert abs(norms[0] - 1.0) < 1e-12
    assert abs(norms[1] - 1.0) < 1e-12
    assert abs(abs(np.linalg.det(red)) - 1.0) < 1e-12


def test_reduce_orthogonal_basis_unchanged():
    red = ch.reduce_basis([[0.0, 2.0], [1.0, 0.0]])
    assert np.allclose(sorted(np.linalg.norm(red, axis=1)), [1.0, 2.0])


def test_shortest_vector_certified_by_enumeration():
    basis = [[1.0, 0.0], [0.5, math.sqrt(3) / 2]]
    sv = ch.shortest_vector(basis)
    assert abs(np.linalg.norm(sv) - 1.0) < 1e-12
    pts = ch.lattice_points_in_ball(basis, 1.0 + 1e-9)
    minimal = [p for p in pts if abs(np.linalg.norm(p) - 1.0) < 1e-9]
    assert len(minimal) == 6


def test_shortest_vector_brute_oracle_random():
    rng = np.random.default_rng(23)
    for _ in range(25):
        basis = rng.uniform(-2, 2, size=(2, 2))
        if abs(np.linalg.det(basis)) < 0.2:
            continue
        sv = np.linalg.norm(ch.shortest_vector(basis))
        brute = min(
            np.linalg.norm(m * basis[0] + n * basis[1])
            for m in range(-8, 9) for n in range(-8, 9) if (m, n) != (0, 0)
        )
        assert abs(sv - brute) < 1e-9


# -- the sup formula ---------------------------------------------------------------

def test_sup_formula_square_lattice_boxes():
    res = ch.sup_formula_check([[1.0, 0.0], [0.0, 1.0]],
                               [{"kind": "box", "half_widths": [0.5 * (1 - d), 0.5 * (1 - d)]}
                                for d in (0.5, 0.2, 0.05, 0.01)])
    assert res.best_volume == pytest.approx(0.99 ** 2)
    assert res.best_volume <= res.covolume
    assert res.admissible_count == 4


def test_sup_formula_disk_too_large_inadmissible():
    res = ch.sup_formula_check([[1.0, 0.0], [0.0, 1.0]],
                               [{"kind": "disk", "radius": 0.51}])
    assert res.admissible_count == 0
    assert res.best_volume == 0.0


def test_sup_formula_hexagonal_box_sweep():
    basis = [[1.0, 0.0], [0.5, math.sqrt(3) / 2]]
    cands = [{"kind": "box", "half_widths": [a, b]}
             for a in np.linspace(0.05, 0.55, 11)
             for b in np.linspace(0.05, 0.55, 11)]
    res = ch.sup_formula_check(basis, cands)
    assert res.best_volume >= 0.8 * res.covolume
    assert res.best_volume <= res.covolume + 1e-12


# -- the subgroup type and distances ---------------------------------------------------

def test_canonical_form_unique_for_equal_subgroups():
    h1 = ch.ClosedSubgroupRn.lattice([[1.0, 0.0], [5.0, 1.0]])
    h2 = ch.ClosedSubgroupRn.lattice([[1.0, 0.0], [0.0, 1.0]])
    assert np.allclose(h1.lattice_basis, h2.lattice_basis)


def test_distance_equal_subgroups_zero():
    h = ch.ClosedSubgroupRn.lattice([[1.0]])
    assert ch.chabauty_distance(h, h, 5.0) == 0.0


def test_distance_grid_to_line_exact():
    full = ch.ClosedSubgroupRn.full(1)
    for n in range(1, 101):
        h = ch.ClosedSubgroupRn.lattice([[1.0 / n]])
        assert abs(ch.chabauty_distance(h, full, 1.0) - 1.0 / (2 * n)) < 1e-12


def test_distance_sparse_lattice_trivial_inside_small_ball():
    h = ch.ClosedSubgroupRn.lattice([[3.0]])
    t = ch.ClosedSubgroupRn.trivial(1)
    assert ch.chabauty_distance(h, t, 1.0) == 0.0
    # Once the ball sees the points +-3, they are 3 away from {0}.
    assert ch.chabauty_distance(h, t, 4.0) == pytest.approx(3.0)


def test_distance_symmetry_and_triangle_random():
    rng = np.random.default_rng(24)
    count = 0
    while count < 200:
        hs = []
        for _ in range(3):
            b = rng.uniform(-2, 2, size=(2, 2))
            if abs(np.linalg.det(b)) < 0.3:
                break
            hs.append(ch.ClosedSubgroupRn.lattice(b))
        if len(hs) < 3:
            continue
        r = rng.uniform(1.0, 4.0)
        d01 = ch.chabauty_distance(hs[0], hs[1], r)
        d10 = ch.chabauty_distance(hs[1], hs[0], r)
        d02 = ch.chabauty_distance(hs[0], hs[2], r)
        d12 = ch.chabauty_distance(hs[1], hs[2], r)
        assert abs(d01 - d10) < 1e-10
        assert d02 <= d01 + d12 + 1e-10
        count += 1


# -- limits ------------------------------------------------------------------------

def test_limit_refining_grids_to_the_line():
    seq = [ch.ClosedSubgroupRn.lattice([[1.0 / n]]) for n in range(1, 61)]
    res = ch.chabauty_limit(seq, [1.0, 2.0], tol=1e-2, merge_tol=0.05)
    assert res.converged
    assert res.limit.v_dim == 1
    assert res.limit.lattice_rank == 0
    # Distances decrease monotonically in n at fixed radius.
    ds = res.distances[1.0]
    assert all(a >= b - 1e-12 for a, b in zip(ds, ds[1:]))


def test_limit_thinning_lattices_to_trivial():
    seq = [ch.ClosedSubgroupRn.lattice([[float(n)]]) for n in range(1, 25)]
    res = ch.chabauty_limit(seq, [1.0, 2.0], tol=1e-9)
    assert res.converged
    assert res.limit.v_dim == 0
    assert res.limit.lattice_rank == 0


def test_limit_rotating_rank_one_lattices():
    seq = [ch.ClosedSubgroupRn.lattice([[math.cos(1 / n), math.sin(1 / n)]])
           for n in range(1, 50)]
    res = ch.chabauty_limit(seq, [1.0, 3.0], tol=0.05)
    assert res.converged
    assert res.limit.lattice_rank == 1
    assert res.limit.v_dim == 0
    assert abs(np.linalg.norm(res.limit.lattice_basis[0]) - 1.0) < 1e-9


def test_limit_oscillating_sequence_reports_witness():
    a = ch.ClosedSubgroupRn.lattice([[1.0]])
    b = ch.ClosedSubgroupRn.lattice([[0.4]])
    seq = [a, b] * 10
    res = ch.chabauty_limit(seq, [1.0], tol=1e-3)
    assert not res.converged
    assert res.witness is not None


# -- compactness extraction -------------------------------------------------------------

def test_mahler_constant_sequence():
    bases = [np.eye(2)] * 10
    res = ch.mahler_subsequence(bases, 1.5, 0.9)
    assert len(res.indices) == 10
    assert np.allclose(res.limit_basis @ res.limit_basis.T, np.eye(2))


def test_mahler_rotating_family_converges():
    bases = [np.array([[math.cos(1 / k), math.sin(1 / k)],
                       [-math.sin(1 / k), math.cos(1 / k)]])
             for k in range(1, 41)]
    res = ch.mahler_subsequence(bases, 1.5, 0.9)
    assert len(res.indices) >= 2
    assert res.limit_covolume <= 1.5 + 1e-9
    assert res.limit_shortest >= 0.9 - 1e-9
    assert abs(res.limit_covolume - 1.0) < 1e-9


def test_mahler_shrinking_family_rejected_with_index():
    bases = [np.diag([1.0 / k, float(k)]) for k in range(1, 10)]
    with pytest.raises(PreconditionError) as err:
        ch.mahler_subsequence(bases, 1.5, 0.9)
    assert "lattice 1" in str(err.value)


def test_mahler_covolume_bound_rejected():
    bases = [np.diag([2.0, 2.0])]
    with pytest.raises(PreconditionError):
        ch.mahler_subsequence(bases, 1.5, 0.9)
