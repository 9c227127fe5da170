import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from latticelab import lattice_lab as lab
from latticelab import presets
from latticelab.errors import DomainError, PreconditionError
from latticelab.hyperbolic import HPoint, MoebiusIsometry, displacement
from latticelab.wordballs import FinitelyGeneratedGroup, word_ball


# -- word balls ---------------------------------------------------------------

def test_word_ball_radius_zero_identity_only(sl2z):
    ball = word_ball(sl2z, 0)
    assert len(ball) == 1
    assert ball.entries[0][0] == ()
    assert ball.entries[0][1].is_identity()


def test_word_ball_z2_counts_lattice_points():
    group = presets.z2_translations()
    for radius in (1, 2, 3):
        ball = word_ball(group, radius)
        expected = sum(1 for m in range(-radius, radius + 1)
                       for n in range(-radius, radius + 1)
                       if abs(m) + abs(n) <= radius)
        assert len(ball) == expected
    assert len(word_ball(group, 3)) == 25


def independent_psl2z_ball(radius):
    """Hash-based enumeration oracle, separate from the BFS implementation:
    multiply out all words over {S, T, T^-1} and deduplicate up to sign."""
    s = (0, -1, 1, 0)
    t = (1, 1, 0, 1)
    ti = (1, -1, 0, 1)
    si = (0, 1, -1, 0)
    def mul(m, n):
        a, b, c, d = m
        e, f, g, h = n
        return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    def canon(m):
        for x in m:
            if x != 0:
                return m if x > 0 else tuple(-v for v in m)
        return m
    seen = {canon((1, 0, 1 - 1, 1))}
    seen = {canon((1, 0, 0, 1))}
    level = [(1, 0, 0, 1)]
    for _ in range(radius):
        nxt = []
        for m in level:
            for g in (s, si, t, ti):
                w = mul(m, g)
                k = canon(w)
                if k not in seen:
                    seen.add(k)
                    nxt.append(w)
        level = nxt
    return len(seen)


def test_word_ball_sl2z_matches_independent_enumeration(sl2z):
    for radius in (1, 2, 3, 4, 5):
        assert len(word_ball(sl2z, radius)) == independent_psl2z_ball(radius)


def test_word_ball_closed_under_inversion_and_dedup_idempotent(sl2z):
    ball = word_ball(sl2z, 3)
    keys = {e.dedup_key() for e in ball.elements}
    assert len(keys) == len(ball)
    for e in ball.elements:
        assert e.inverse().dedup_key() in keys


def test_word_ball_cap():
    from latticelab.errors import CapExceededError
    with pytest.raises(CapExceededError):
        word_ball(presets.sl2z(), 12, cap=100)


# -- injectivity radius ------------------------------------------------------------

def test_injectivity_radius_z2_half():
    group = presets.z2_translations()
    res = lab.injectivity_radius(group, np.array([0.3, 0.8]), 3)
    assert abs(res.value - 0.5) < 1e-12


def test_injectivity_radius_sl2z_at_2i(sl2z):
    res = lab.injectivity_radius(sl2z, HPoint(0, 2), 6)
    assert abs(res.value - 0.5 * math.acosh(1.125)) < 1e-4
    res8 = lab.injectivity_radius(sl2z, HPoint(0, 2), 8)
    assert abs(res.value - res8.value) < 1e-9
    assert res.stabilized


def test_injectivity_radius_sl2z_high_cusp_thin(sl2z):
    res = lab.injectivity_radius(sl2z, HPoint(0, 10), 6)
    assert abs(res.value - 0.5 * math.acosh(1 + 1 / 200)) < 1e-4


def test_injectivity_radius_nonincreasing_in_radius(sl2z):
    x = HPoint(0.21, 1.37)
    values = [lab.injectivity_radius(sl2z, x, r).value for r in (1, 2, 3, 4, 6)]
    assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))


def test_injectivity_radius_conjugation_invariant(sl2z):
    h = MoebiusIsometry(((Fraction(2), Fraction(1)), (Fraction(1), Fraction(1))))
    x = HPoint(0.3, 2.1)
    base = lab.injectivity_radius(sl2z, x, 5).value
    moved = lab.injectivity_radius(sl2z.conjugated(h), h.apply(x), 5).value
    assert abs(base - moved) < 1e-8


# -- thick-thin scans ----------------------------------------------------------------

def test_thick_thin_sl2z_single_cusp(sl2z):
    samples = presets.default_region("sl2z", 1000)
    res = lab.thick_thin_scan(sl2z, 0.2, samples, 6)
    assert res.component_count == 1
    assert res.thin_components[0].kind == "cusp"
    assert res.thin_components[0].fixed_point == complex("inf")
    assert not res.unresolved_samples
    # Thin samples sit exactly where the closed form says: d_T < eps iff
    # y > 1 / sqrt(2 (cosh eps - 1)).
    y_cut = 1.0 / math.sqrt(2 * (math.cosh(0.2) - 1))
    for p in res.thin_components[0].samples:
        assert p.z.imag > y_cut - 1e-9


def test_thick_thin_cyclic_hyperbolic_single_tube():
    group = presets.cyclic_hyperbolic(0.05)
    samples = presets.default_region("cyclic-hyperbolic", 800)
    res = lab.thick_thin_scan(group, 0.2, samples, 6)
    assert res.component_count == 1
    comp = res.thin_components[0]
    assert comp.kind == "tube"
    assert abs(comp.core_length - 0.05) < 1e-8


def test_thick_thin_octagon_group_all_thick():
    group = presets.octagon_genus2()
    samples = presets.default_region("octagon-genus2", 300)
    res = lab.thick_thin_scan(group, 0.5, samples, 3)
    assert res.component_count == 0
    assert len(res.thick_samples) == 300
    # Systole oracle: word-ball displacement scan lower-bounds every
    # displacement by the shortest translation length.
    ball = word_ball(group, 3)
    min_disp = min(
        displacement(e, p)
        for p in samples[:40]
        for _, e in ball.nontrivial()
    )
    assert min_disp > 2.0


def test_thin_witnesses_commute_or_share_structure(sl2z):
    samples = presets.default_region("sl2z", 600)
    res = lab.thick_thin_scan(sl2z, 0.2, samples, 6)
    from latticelab.hyperbolic import classify, same_boundary_point
    for comp in res.thin_components:
        ball = word_ball(sl2z, 6)
        by_word = {w: e for w, e in ball.entries}
        classes = [classify(by_word[w]) for w in comp.witnesses]
        if comp.kind == "cusp":
            assert all(same_boundary_point(c.fixed_boundary, comp.fixed_point)
                       for c in classes)


# -- the displacement Morse function ---------------------------------------------------

def test_psi_zero_in_thick_region():
    group = presets.cusp_model()
    assert lab.psi_value(group, HPoint(0, 0.5), 0.3, 6) == 0.0
    g = lab.psi_gradient(group, HPoint(0, 0.5), 0.3, 6, 1e-4)
    assert np.linalg.norm(g) == 0.0


def test_psi_positive_up_the_cusp_gradient_points_up():
    group = presets.cusp_model()
    x = HPoint(0, 5)
    v = lab.psi_value(group, x, 0.3, 6)
    assert v > 0
    g = lab.psi_gradient(group, x, 0.3, 6, 1e-4)
    # Displacement acosh(1 + 1/(2 y^2)) decreases in y, the bump increases,
    # so the function grows going up the imaginary axis.
    assert g[1] > 0
    assert abs(g[0]) < 1e-8


def test_psi_cyclic_hyperbolic_gradient_away_from_axis():
    group = presets.cyclic_hyperbolic(0.1)
    x = HPoint(0.05, 1.0)
    v = lab.psi_value(group, x, 0.3, 4)
    assert v > 0
    g = lab.psi_gradient(group, x, 0.3, 4, 1e-5)
    # Convexity: displacement grows away from the axis (the imaginary axis),
    # so the function decreases in x > 0 direction: gradient points toward
    # the axis in -x... displacement increases off-axis means t = d - length
    # grows, f falls: moving away from the axis lowers the function.
    assert g[0] < 0


def test_psi_domain_error_on_min_set():
    group = presets.cyclic_hyperbolic(0.1)
    with pytest.raises(DomainError):
        lab.psi_value(group, HPoint(0, 1.0), 0.3, 4)   # on the axis


def test_psi_gradient_matches_finer_stencil():
    group = presets.cusp_model()
    rng = np.random.default_rng(19)
    h = 1e-3
    for _ in range(100):
        x = HPoint(rng.uniform(-0.4, 0.4), rng.uniform(2.8, 9.5))
        g1 = lab.psi_gradient(group, x, 0.3, 6, h)
        g2 = lab.psi_gradient(group, x, 0.3, 6, h / 10)
        assert np.linalg.norm(g1 - g2) <= 10 * h * h + 1e-12


def test_psi_value_matches_closed_form_cusp():
    group = presets.cusp_model()
    eps = 0.3
    y = 5.0
    d = math.acosh(1 + 1 / (2 * y * y))
    expected = 2 * (eps - d) ** 2 / d
    assert abs(lab.psi_value(group, HPoint(0, y), eps, 6) - expected) < 1e-12


def test_gradient_lemma_thick_samples_empty():
    group = presets.cusp_model()
    samples = [HPoint(x, 0.6) for x in np.linspace(-0.4, 0.4, 20)]
    res = lab.gradient_lemma_check(group, 0.3, samples, 6, 1e-4)
    assert res.ok


def test_gradient_lemma_cusp_sweep_empty():
    group = presets.cusp_model()
    samples = [HPoint(0, float(y)) for y in np.linspace(0.5, 10, 100)]
    res = lab.gradient_lemma_check(group, 0.3, samples, 6, 1e-4)
    assert res.ok
    assert res.checked + res.borderline == 100


def test_gradient_lemma_detects_plateau_bump():
    group = presets.cusp_model()
    samples = [HPoint(0, float(y)) for y in np.linspace(0.5, 10, 100)]
    res = lab.gradient_lemma_check(group, 0.3, samples, 6, 1e-4,
                                   bump=lab.plateau_bump(0.3))
    assert len(res.violations) >= 1


# -- covolumes -----------------------------------------------------------------------

def test_covolume_modular_domain_quadrature():
    # Independent check of the same closed form the implementation
    # integrates: area = int dx / sqrt(1 - x^2) over [-1/2, 1/2] = pi/3.
    oracle, _ = quad(lambda x: 1 / math.sqrt(1 - x * x), -0.5, 0.5)
    assert abs(oracle - math.pi / 3) < 1e-10
    assert abs(lab.covolume_h2("sl2z") - math.pi / 3) < 1e-4


def test_covolume_ideal_triangle():
    assert abs(lab.covolume_h2("ideal-triangle") - math.pi) < 1e-12


def test_covolume_octagon_angle_defect():
    area = lab.covolume_h2({"kind": "polygon", "angles": [math.pi / 4] * 8})
    assert abs(area - 4 * math.pi) < 1e-12
    assert abs(area - lab.covolume_h2({"kind": "genus", "genus": 2})) < 1e-12


def test_covolume_exact_octagon_matches_genus_formula():
    assert lab.covolume_h2_exact([Fraction(1, 4)] * 8) == Fraction(4)
    assert lab.genus_area_exact(2) == Fraction(4)


def test_covolume_rejects_non_hyperbolic_polygon():
    # Euclidean-or-bigger angle sums have no hyperbolic realization.
    with pytest.raises(PreconditionError):
        lab.covolume_h2({"kind": "polygon", "angles": [math.pi / 2] * 3})
    with pytest.raises(PreconditionError):
        lab.covolume_h2_exact([Fraction(1, 2)] * 4)


# -- recurrence ------------------------------------------------------------------------

def test_recurrence_half_hits_even():
    assert lab.recurrence_search_real(0.5, 0.1, 12) == [2, 4, 6, 8, 10, 12]


def test_recurrence_irrational_nonempty():
    hits = lab.recurrence_search_real(math.sqrt(2) - 1, 0.05, 100)
    assert hits
    # Direct scan oracle for the first hit.
    first = next(n for n in range(1, 101)
                 if abs((n * (math.sqrt(2) - 1)) - round(n * (math.sqrt(2) - 1))) < 0.1)
    assert hits[0] == first


def test_recurrence_sl2z_rotation_hits():
    theta = 1.0
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    g = MoebiusIsometry(((c, s), (-s, c)))
    hits = lab.recurrence_search_sl2z(g, 0.05, 10_000)
    assert hits
    for n, m in hits[:20]:
        (a, b), (cc, d) = m
        assert a * d - b * cc == 1


# -- span ------------------------------------------------------------------------------

def test_span_sl2z_full_matrix_space(sl2z):
    # Rank oracle: coordinate matrix of {1, T, S, TS}.
    rows = np.array([[1, 0, 0, 1], [1, 1, 0, 1], [0, -1, 1, 0], [1, -1, 1, 0]])
    assert np.linalg.matrix_rank(rows) == 4
    rep = lab.span_check(sl2z, 3)
    assert rep.dimension == 4
    assert rep.regular_witness_word is not None


def test_span_trivial_group():
    group = FinitelyGeneratedGroup([MoebiusIsometry(((1, 0), (0, 1)))])
    rep = lab.span_check(group, 2)
    assert rep.dimension == 1
    assert rep.regular_witness_word is None


def test_span_diagonal_cyclic():
    group = presets.cyclic_hyperbolic(2 * math.log(2))
    rep = lab.span_check(group, 3)
    assert rep.dimension == 2
    assert rep.regular_witness_word is not None
