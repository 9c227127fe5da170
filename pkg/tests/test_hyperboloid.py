import math

import numpy as np
import pytest

from latticelab import hyperboloid as hb
from latticelab.errors import InvalidPointError
from latticelab.hyperbolic import (
    ELLIPTIC,
    HYPERBOLIC,
    IDENTITY,
    PARABOLIC,
    HPoint,
    MoebiusIsometry,
    distance,
)


def test_form_preservation_validated():
    with pytest.raises(ValueError):
        hb.LorentzIsometry(np.diag([2.0, 1.0, 1.0]))
    with pytest.raises(ValueError):
        # Sheet swap: -I preserves the form but not the upper sheet.
        hb.LorentzIsometry(-np.eye(3))


def test_point_validation():
    hb.validate_point([1.0, 0.0, 0.0])
    with pytest.raises(InvalidPointError):
        hb.validate_point([1.0, 1.0, 0.0])
    with pytest.raises(InvalidPointError):
        hb.validate_point([-1.0, 0.0, 0.0])


def test_boost_displacement_and_length():
    g = hb.boost(0.7, 3)
    assert abs(g.displacement(hb.basepoint(3)) - 0.7) < 1e-12
    cls = hb.classify_lorentz(g)
    assert cls.kind == HYPERBOLIC
    assert abs(cls.translation_length - 0.7) < 1e-9


def test_rotation_elliptic_fixes_basepoint():
    g = hb.rotation(0.8, 4, plane=(2, 3))
    cls = hb.classify_lorentz(g)
    assert cls.kind == ELLIPTIC
    assert np.allclose(cls.fixed_point, hb.basepoint(4))


def test_identity_classification():
    g = hb.LorentzIsometry(np.eye(5))
    assert hb.classify_lorentz(g).kind == IDENTITY


def test_half_plane_conversion_is_isometric():
    rng = np.random.default_rng(12)
    for _ in range(50):
        p = HPoint(rng.uniform(-2, 2), rng.uniform(0.1, 4))
        q = HPoint(rng.uniform(-2, 2), rng.uniform(0.1, 4))
        vp, vq = hb.h2_point_to_hyperboloid(p), hb.h2_point_to_hyperboloid(q)
        assert abs(distance(p, q) - hb.hdistance(vp, vq)) < 1e-9
        back = hb.hyperboloid_point_to_h2(vp)
        assert back.close_to(p, 1e-9)


def test_moebius_conversion_equivariant():
    rng = np.random.default_rng(13)
    for _ in range(25):
        m = rng.normal(size=4)
        d = m[0] * m[3] - m[1] * m[2]
        if d < 0.05:
            continue
        g = MoebiusIsometry(tuple(m / math.sqrt(d)))
        lg = hb.from_moebius_h2(g)
        p = HPoint(rng.uniform(-2, 2), rng.uniform(0.2, 3))
        assert np.allclose(hb.h2_point_to_hyperboloid(g.apply(p)),
                           lg.apply(hb.h2_point_to_hyperboloid(p)), atol=1e-9)


def test_embedded_parabolic_flagged_numerical():
    t = MoebiusIsometry(((1, 1), (0, 1)))
    g = hb.embed(hb.from_moebius_h2(t), 4)
    cls = hb.classify_lorentz(g)
    assert cls.kind == PARABOLIC
    assert cls.certified is False
    assert not cls.attained
    assert cls.evidence["min_displacement_found"] < 0.1


def test_embedded_hyperbolic_length_preserved():
    g = MoebiusIsometry(((2, 0), (0, 0.5)))
    cls = hb.classify_lorentz(hb.embed(hb.from_moebius_h2(g), 5))
    assert cls.kind == HYPERBOLIC
    assert abs(cls.translation_length - 2 * math.log(2)) < 1e-8


def test_mixed_boost_rotation_is_hyperbolic():
    # Screw motion of H^4: boost in one plane, rotation in another.
    g = hb.boost(1.1, 4) * hb.rotation(0.9, 4, plane=(2, 3))
    cls = hb.classify_lorentz(g)
    assert cls.kind == HYPERBOLIC
    assert abs(cls.translation_length - 1.1) < 1e-8


def test_min_displacement_search_agrees_with_length():
    g = hb.boost(0.6, 3)
    res = hb.min_displacement_search(g, radius=6.0, samples=300, seed=3)
    assert res.value < 0.6 + 1e-6
    assert res.value > 0.6 - 1e-6
    assert res.attained


def test_displacement_search_parabolic_pushes_outward():
    t = MoebiusIsometry(((1, 1), (0, 1)))
    g = hb.embed(hb.from_moebius_h2(t), 3)
    res = hb.min_displacement_search(g, radius=9.0, samples=500, seed=4)
    # The infimum is 0 and is approached only toward the boundary.
    assert res.value < 0.05
    assert res.radius > 3.0
