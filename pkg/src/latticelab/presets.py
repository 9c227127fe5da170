"""Named example groups and deterministic region samplers.

Presets are the concrete inputs the experiments run on:

* ``sl2z``            -- integral Moebius group generated by z -> -1/z and
                         z -> z + 1, exact integer entries.
* ``cusp-model``      -- cyclic parabolic group generated by z -> z + 1.
* ``cyclic-hyperbolic`` -- one diagonal hyperbolic of prescribed translation
                         length.
* ``octagon-genus2``  -- the four side-pairing translations of the regular
                         hyperbolic octagon with vertex angles pi/4 (opposite
                         sides identified; quotient a closed genus-2 surface).
                         Each has translation length 2 acosh(1 + sqrt 2) along
                         an axis through i, axes rotated in steps of pi/4.
                         Validated in the tests by the length-8 side-pairing
                         relation and the angle-sum check.
* ``z2`` / ``p2`` / ``screw-pi`` -- Euclidean crystallographic examples.

Samplers use an unscrambled Halton sequence, so every region sample is a pure
function of (count, parameters) and reports are reproducible byte for byte.
"""

import math

import numpy as np
from scipy.stats import qmc

from .euclidean import EuclideanIsometry
from .hyperbolic import HPoint, MoebiusIsometry
from .wordballs import FinitelyGeneratedGroup

OCTAGON_SIDE_LENGTH = 2.0 * math.acosh(1.0 + math.sqrt(2.0))


def sl2z():
    s = MoebiusIsometry(((0, -1), (1, 0)))
    t = MoebiusIsometry(((1, 1), (0, 1)))
    return FinitelyGeneratedGroup([s, t], name="sl2z")


def cusp_model():
    t = MoebiusIsometry(((1, 1), (0, 1)))
    return FinitelyGeneratedGroup([t], name="cusp-model")


def cyclic_hyperbolic(length=0.05):
    lam = math.exp(length / 2.0)
    g = MoebiusIsometry(((lam, 0.0), (0.0, 1.0 / lam)))
    return FinitelyGeneratedGroup([g], name="cyclic-hyperbolic")


def _rotation_about_i(phi):
    c, s = math.cos(phi / 2.0), math.sin(phi / 2.0)
    return MoebiusIsometry(((c, s), (-s, c)))


def octagon_genus2():
    a = 1.0 + math.sqrt(2.0)                 # cosh of half the side-pairing length
    b = math.sqrt(2.0 + 2.0 * math.sqrt(2.0))
    t = MoebiusIsometry(((a, b), (b, a)))    # translation along the geodesic (-1, 1)
    gens = []
    for k in range(4):
        r = _rotation_about_i(k * math.pi / 4.0)
        gens.append(r * t * r.inverse())
    return FinitelyGeneratedGroup(gens, name="octagon-genus2")


def octagon_center():
    return HPoint(0.0, 1.0)


def octagon_circumradius():
    # Distance from the center to a vertex of the regular octagon with vertex
    # angle pi/4: cosh = cot(pi/8)^2.
    return math.acosh(1.0 / math.tan(math.pi / 8.0) ** 2)


def z2_translations():
    return FinitelyGeneratedGroup(
        [EuclideanIsometry.translation([1.0, 0.0]),
         EuclideanIsometry.translation([0.0, 1.0])],
        name="z2")


def p2_wallpaper():
    return FinitelyGeneratedGroup(
        [EuclideanIsometry.translation([1.0, 0.0]),
         EuclideanIsometry.translation([0.0, 1.0]),
         EuclideanIsometry.rotation2(math.pi)],
        name="p2")


def screw_pi():
    o = np.array([[math.cos(math.pi), -math.sin(math.pi), 0.0],
                  [math.sin(math.pi), math.cos(math.pi), 0.0],
                  [0.0, 0.0, 1.0]])
    return FinitelyGeneratedGroup(
        [EuclideanIsometry(o, [0.0, 0.0, 1.0])], name="screw-pi")


GROUP_PRESETS = {
    "sl2z": sl2z,
    "cusp-model": cusp_model,
    "cyclic-hyperbolic": cyclic_hyperbolic,
    "octagon-genus2": octagon_genus2,
    "z2": z2_translations,
    "p2": p2_wallpaper,
    "screw-pi": screw_pi,
}


def get_group(name, **params):
    try:
        factory = GROUP_PRESETS[name]
    except KeyError:
        raise KeyError("unknown preset %r; known: %s" % (name, ", ".join(sorted(GROUP_PRESETS))))
    return factory(**params)


# -- deterministic samplers ------------------------------------------------

def halton(count, dim=2, skip=20):
    sampler = qmc.Halton(d=dim, scramble=False)
    pts = sampler.random(count + skip)
    return pts[skip:]


def sample_sl2z_domain(count, max_height=20.0):
    """Points of the standard modular domain {|x| <= 1/2, |z| >= 1, y <= H}.

    Halton points in the strip, rejected below the unit circle; heights drawn
    from the hyperbolic area density dy/y^2 so the cusp is not oversampled.
    """
    out = []
    u = halton(4 * count)
    y0 = math.sqrt(3.0) / 2.0
    for ux, uy in u:
        x = ux - 0.5
        # y with density 1/y^2 on [y0, H]: invert the CDF.
        y = 1.0 / (1.0 / y0 - uy * (1.0 / y0 - 1.0 / max_height))
        if x * x + y * y >= 1.0:
            out.append(HPoint(x, y))
            if len(out) == count:
                break
    return out


def sample_hyperbolic_disk(center, radius, count):
    """Area-uniform Halton sample of the hyperbolic disk about a point of H^2."""
    pts = []
    for u, v in halton(count):
        r = math.acosh(1.0 + u * (math.cosh(radius) - 1.0))
        theta = 2.0 * math.pi * v
        # Move distance r from the center along direction theta: rotate the
        # vertical ray about the center.
        c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
        rot = MoebiusIsometry(((c, s), (-s, c)))
        # Conjugate the rotation about i to a rotation about the center.
        y = center.z.imag
        move = MoebiusIsometry(((math.sqrt(y), center.z.real / math.sqrt(y)),
                                (0.0, 1.0 / math.sqrt(y))))
        up = HPoint(0.0, math.exp(r))
        pts.append((move * rot).apply(up))
    return pts


def sample_box_h2(count, x_range, y_range):
    out = []
    for u, v in halton(count):
        x = x_range[0] + u * (x_range[1] - x_range[0])
        y = y_range[0] + v * (y_range[1] - y_range[0])
        out.append(HPoint(x, y))
    return out


def sample_torus(count, dim=2):
    return [np.array(p) for p in halton(count, dim=dim)]


def default_region(preset_name, count=1000):
    if preset_name == "sl2z":
        return sample_sl2z_domain(count)
    if preset_name == "cusp-model":
        return sample_box_h2(count, (-0.5, 0.5), (0.5, 20.0))
    if preset_name == "cyclic-hyperbolic":
        return sample_box_h2(count, (-2.0, 2.0), (0.25, 4.0))
    if preset_name == "octagon-genus2":
        return sample_hyperbolic_disk(octagon_center(), octagon_circumradius(), count)
    raise KeyError("no default region for preset %r" % preset_name)
