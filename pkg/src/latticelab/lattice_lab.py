"""Discrete-group experiments over the geometric modules.

Everything quantified over an infinite group is computed on a word ball and
reports the radius used.  The experiments: injectivity radius, thick-thin
scans, the displacement Morse function and its gradient-vanishing check,
hyperbolic covolumes, recurrence searches, and the matrix-span check.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import cmath
import math

import numpy as np
from scipy.integrate import quad

from . import hyperbolic
from .errors import DomainError, PreconditionError
from .hyperbolic import ELLIPTIC, HYPERBOLIC, IDENTITY, PARABOLIC, HPoint
from .wordballs import displacements_at, stack_moebius, word_ball


class BallGeometry:
    """A word ball with cached per-element classification and displacement
    batching; the precomputation shared by the scan-style experiments."""

    def __init__(self, group, radius):
        self.group = group
        self.radius = radius
        ball = word_ball(group, radius)
        self.words = [w for w, _ in ball.nontrivial()]
        self.elements = [e for _, e in ball.nontrivial()]
        self._stacked = None
        self._classes = None

    def __len__(self):
        return len(self.elements)

    @property
    def stacked(self):
        if self._stacked is None:
            self._stacked = stack_moebius(self.elements)
        return self._stacked

    @property
    def classes(self):
        if self._classes is None:
            self._classes = [hyperbolic.classify(e) for e in self.elements]
        return self._classes

    def translation_lengths(self):
        return np.array([c.translation_length for c in self.classes])

    def displacements(self, point):
        if isinstance(point, HPoint):
            from .wordballs import displacements_h2, displacements_h3
            if point.dim == 2:
                return displacements_h2(self.stacked, point)
            return displacements_h3(self.stacked, point)
        return displacements_at(self.elements, point)


# -- injectivity radius ----------------------------------------------------

@dataclass
class InjectivityRadius:
    value: float
    minimizer_word: tuple
    stabilized: bool
    radius_used: int


def injectivity_radius(group, x, radius, geometry=None):
    """Half the least displacement at x over nontrivial ball elements.

    Nonincreasing in the ball radius; `stabilized` flags a minimizer strictly
    inside the ball (heuristic evidence the truncation already saw the true
    minimum).
    """
    if radius < 1:
        raise PreconditionError("ball radius must be >= 1")
    bg = geometry or BallGeometry(group, radius)
    if not bg.elements:
        raise PreconditionError("empty nontrivial ball")
    disp = bg.displacements(x)
    i = int(np.argmin(disp))
    word = bg.words[i]
    return InjectivityRadius(
        value=0.5 * float(disp[i]),
        minimizer_word=word,
        stabilized=len(word) < radius,
        radius_used=radius,
    )


# -- thick-thin scan ---------------------------------------------------------

@dataclass
class ThinComponentReport:
    kind: str                    # "tube" or "cusp"
    witnesses: list              # words of the short elements
    samples: list                # points observed inside the component
    core_length: float = None    # tubes: least translation length of a witness
    axis: tuple = None           # tubes: boundary endpoints
    fixed_point: complex = None  # cusps: shared boundary fixed point


@dataclass
class ConeComponentReport:
    """Orbifold locus: short elliptic elements around their fixed point.

    Kept apart from tubes and cusps, which the torsion-free theory describes."""
    fixed_point: HPoint
    witnesses: list
    samples: list


@dataclass
class ThickThinResult:
    epsilon: float
    radius_used: int
    thin_components: list
    cone_components: list
    thick_samples: list
    unresolved_samples: list

    @property
    def component_count(self):
        return len(self.thin_components)


def _component_signature(cls):
    if cls.kind == HYPERBOLIC:
        return ("tube", cls.axis)
    if cls.kind == PARABOLIC:
        return ("cusp", cls.fixed_boundary)
    return ("cone", cls.fixed_interior)


def _match_component(groups, sig_kind, data, tol=1e-7):
    for idx, (kind, ref) in enumerate(groups):
        if kind != sig_kind:
            continue
        if kind == "tube" and hyperbolic.same_axis(ref, data, tol):
            return idx
        if kind == "cusp" and hyperbolic.same_boundary_point(ref, data, tol):
            return idx
        if kind == "cone" and ref.close_to(data, 1e-6):
            return idx
    groups.append((sig_kind, data))
    return len(groups) - 1


def thick_thin_scan(group, epsilon, samples, radius, geometry=None):
    """Mark samples thin where 2 InjRad < epsilon and group the short
    elements by shared axis (tubes) or shared boundary fixed point (cusps).

    Short elliptic elements are grouped separately by fixed point as cone
    components (only torsion-free groups have a pure tube/cusp thin part).
    A sample whose witnesses straddle two different groups is reported
    unresolved ("increase the ball radius").
    """
    bg = geometry or BallGeometry(group, radius)
    if not bg.elements:
        raise PreconditionError("empty nontrivial ball")
    groups = []                     # (kind, identifying data)
    members = {}                    # component index -> dict with samples/witness idx
    thick, unresolved = [], []
    class_cache = {}

    for p in samples:
        disp = bg.displacements(p)
        short_idx = np.nonzero(disp < epsilon)[0]
        if short_idx.size == 0:
            thick.append(p)
            continue
        comp_ids = set()
        for i in short_idx:
            i = int(i)
            if i not in class_cache:
                class_cache[i] = hyperbolic.classify(bg.elements[i])
            kind, data = _component_signature(class_cache[i])
            cid = _match_component(groups, kind, data)
            comp_ids.add(cid)
            rec = members.setdefault(cid, {"witness_idx": set(), "samples": []})
            rec["witness_idx"].add(i)
        if len(comp_ids) > 1:
            unresolved.append(p)
        else:
            members[comp_ids.pop()]["samples"].append(p)

    thin_components, cone_components = [], []
    for cid, (kind, data) in enumerate(groups):
        rec = members.get(cid, {"witness_idx": set(), "samples": []})
        widx = sorted(rec["witness_idx"])
        words = [bg.words[i] for i in widx]
        if kind == "tube":
            core = min(class_cache[i].translation_length for i in widx)
            thin_components.append(ThinComponentReport(
                kind="tube", witnesses=words, samples=rec["samples"],
                core_length=core, axis=data))
        elif kind == "cusp":
            thin_components.append(ThinComponentReport(
                kind="cusp", witnesses=words, samples=rec["samples"],
                fixed_point=data))
        else:
            cone_components.append(ConeComponentReport(
                fixed_point=data, witnesses=words, samples=rec["samples"]))
    return ThickThinResult(
        epsilon=epsilon,
        radius_used=bg.radius,
        thin_components=thin_components,
        cone_components=cone_components,
        thick_samples=thick,
        unresolved_samples=unresolved,
    )


# -- the displacement Morse function ----------------------------------------

def standard_bump(epsilon):
    """f(t) = ((eps - t)_+)^2 / t on t > 0: blows up at 0, strictly decreasing
    on (0, eps], vanishes on [eps, infinity).  C^1, which is all the
    finite-difference gradient checks need."""
    def f(t):
        if t >= epsilon:
            return 0.0
        return (epsilon - t) ** 2 / t
    return f


def plateau_bump(epsilon, level=0.1):
    """Adversarial control: constant on (0, eps/2), so its sum has vanishing
    gradient where it does not vanish.  Used to confirm the gradient check is
    not vacuous."""
    base = standard_bump(epsilon)
    def f(t):
        if t < epsilon / 2.0:
            return level
        return min(base(t), level)
    return f


@dataclass
class PsiReport:
    value: float
    support_size: int
    short_set_size: int
    boundary_disagreements: int


def psi_report(group, x, epsilon, radius, bump=None, domain_tol=1e-9, geometry=None):
    """Sum of f(d_gamma(x) - |gamma|) over nontrivial ball elements with
    |gamma| <= epsilon.

    Raises DomainError when x sits on the min-set of a semisimple element
    (where the summand's argument degenerates to 0); parabolic elements have
    empty min-sets and may contribute arbitrarily large summands instead.
    Elements whose membership by |gamma| <= epsilon disagrees with the
    displacement test d_gamma(x) < epsilon at this x are counted in
    `boundary_disagreements`.
    """
    bg = geometry or BallGeometry(group, radius)
    f = bump or standard_bump(epsilon)
    lengths = bg.translation_lengths()
    disp = bg.displacements(x)
    value = 0.0
    support = 0
    short = 0
    disagreements = 0
    for i, cls in enumerate(bg.classes):
        if lengths[i] > epsilon:
            if disp[i] < epsilon:
                disagreements += 1
            continue
        short += 1
        t = float(disp[i] - lengths[i])
        if cls.attained and t <= domain_tol:
            raise DomainError(
                "point lies on the min-set of a short element (word %r)" % (bg.words[i],))
        if disp[i] >= epsilon:
            disagreements += 1
        ft = f(t)
        if ft != 0.0:
            support += 1
            value += ft
    return PsiReport(value=value, support_size=support,
                     short_set_size=short, boundary_disagreements=disagreements)


def psi_value(group, x, epsilon, radius, bump=None, domain_tol=1e-9, geometry=None):
    return psi_report(group, x, epsilon, radius, bump=bump,
                      domain_tol=domain_tol, geometry=geometry).value


def _shift_point(x, delta):
    coords = list(x.coords)
    out = []
    for i, c in enumerate(coords):
        out.append(c + delta[i])
    return HPoint(*out)


def psi_gradient(group, x, epsilon, radius, h, bump=None, geometry=None):
    """Central-difference gradient of the displacement Morse function."""
    if h <= 0:
        raise PreconditionError("finite-difference step must be positive")
    bg = geometry or BallGeometry(group, radius)
    dim = len(x.coords)
    grad = np.zeros(dim)
    for i in range(dim):
        delta = [0.0] * dim
        delta[i] = h
        up = psi_value(group, _shift_point(x, delta), epsilon, radius,
                       bump=bump, geometry=bg)
        delta[i] = -h
        dn = psi_value(group, _shift_point(x, delta), epsilon, radius,
                       bump=bump, geometry=bg)
        grad[i] = (up - dn) / (2.0 * h)
    return grad


@dataclass
class GradientLemmaResult:
    violations: list           # (point, psi, grad_norm)
    borderline: int
    checked: int

    @property
    def ok(self):
        return not self.violations


def gradient_lemma_check(group, epsilon, samples, radius, h,
                         tol=1e-9, grad_tol=1e-6, bump=None, geometry=None):
    """Empty violation list iff at every sample the gradient vanishes exactly
    where the function does: (psi <= tol and |grad| <= grad_tol) or
    (psi > tol and |grad| > grad_tol).  Samples with psi in (tol, 2 tol] are
    borderline: excluded and counted."""
    bg = geometry or BallGeometry(group, radius)
    violations, borderline, checked = [], 0, 0
    for p in samples:
        value = psi_value(group, p, epsilon, radius, bump=bump, geometry=bg)
        if tol < value <= 2.0 * tol:
            borderline += 1
            continue
        g = float(np.linalg.norm(
            psi_gradient(group, p, epsilon, radius, h, bump=bump, geometry=bg)))
        checked += 1
        small_psi = value <= tol
        small_grad = g <= grad_tol
        if small_psi != small_grad:
            violations.append((p, value, g))
    return GradientLemmaResult(violations=violations, borderline=borderline, checked=checked)


# -- hyperbolic covolumes ----------------------------------------------------

def covolume_h2(domain):
    """Hyperbolic area of a fundamental domain.

    `domain` is "sl2z" (numeric integral of dx dy / y^2 over the standard
    modular domain), "ideal-triangle", {"kind": "polygon", "angles": [...]}
    (angle defect (n-2) pi - sum), or {"kind": "genus", "genus": g}
    (2 pi (2g - 2)).
    """
    if domain == "sl2z":
        # Inner dy/y^2 integrates to 1/sqrt(1 - x^2); quadrature in x.
        val, _err = quad(lambda x: 1.0 / math.sqrt(1.0 - x * x), -0.5, 0.5)
        return val
    if domain == "ideal-triangle":
        domain = {"kind": "polygon", "angles": [0.0, 0.0, 0.0]}
    kind = domain.get("kind")
    if kind == "polygon":
        angles = domain["angles"]
        n = len(angles)
        if n < 3:
            raise PreconditionError("polygon needs at least 3 vertices")
        defect = (n - 2) * math.pi - sum(angles)
        if defect <= 0:
            raise PreconditionError(
                "angle sum %.6f exceeds (n-2) pi: not a hyperbolic polygon" % sum(angles))
        return defect
    if kind == "genus":
        g = domain["genus"]
        if g < 2:
            raise PreconditionError("closed hyperbolic surfaces need genus >= 2")
        return 2.0 * math.pi * (2 * g - 2)
    raise PreconditionError("unknown domain spec %r" % (domain,))


def covolume_h2_exact(angle_pi_fractions):
    """Angle-defect area of a polygon with angles given as exact fractions of
    pi; returns the rational coefficient of pi."""
    fracs = [Fraction(a) for a in angle_pi_fractions]
    n = len(fracs)
    if n < 3:
        raise PreconditionError("polygon needs at least 3 vertices")
    defect = Fraction(n - 2) - sum(fracs)
    if defect <= 0:
        raise PreconditionError("angle sum exceeds (n-2) pi: not a hyperbolic polygon")
    return defect


def genus_area_exact(genus):
    """Coefficient of pi in 2 pi (2g - 2)."""
    if genus < 2:
        raise PreconditionError("closed hyperbolic surfaces need genus >= 2")
    return Fraction(2 * (2 * genus - 2))


# -- recurrence --------------------------------------------------------------

def recurrence_search_real(v, epsilon, horizon):
    """All n <= horizon whose multiple n v returns within 2 eps of the integer
    lattice (the eps-ball pigeonhole witness in R^k / Z^k)."""
    if horizon < 1:
        raise PreconditionError("horizon must be >= 1")
    v = np.atleast_1d(np.asarray(v, dtype=float))
    hits = []
    for n in range(1, horizon + 1):
        w = n * v
        if np.linalg.norm(w - np.round(w)) < 2.0 * epsilon:
            hits.append(n)
    return hits


def recurrence_search_sl2z(g, epsilon, horizon):
    """Powers g^n admitting a nearby integral unimodular matrix.

    A hit at n records the integer candidate M = round(g^n) whenever M has
    exact determinant one and ||g^n - M||_F < 2 eps ||g^n||_F, the scale at
    which g^n lies in an eps-ball sandwich around a group element.
    """
    if horizon < 1:
        raise PreconditionError("horizon must be >= 1")
    acc = (1.0, 0.0, 0.0, 1.0)
    gm = tuple(float(x) for x in g.m)
    hits = []
    for n in range(1, horizon + 1):
        a, b, c, d = acc
        e, f, gg, h = gm
        acc = (a * e + b * gg, a * f + b * h, c * e + d * gg, c * f + d * h)
        det = acc[0] * acc[3] - acc[1] * acc[2]
        acc = tuple(x / math.sqrt(abs(det)) for x in acc)
        cand = tuple(int(round(x)) for x in acc)
        if cand[0] * cand[3] - cand[1] * cand[2] != 1:
            continue
        err = math.sqrt(sum((x - m) ** 2 for x, m in zip(acc, cand)))
        norm = math.sqrt(sum(x * x for x in acc))
        if err < 2.0 * epsilon * norm:
            hits.append((n, ((cand[0], cand[1]), (cand[2], cand[3]))))
    return hits


# -- matrix span -------------------------------------------------------------

@dataclass
class SpanReport:
    dimension: int
    regular_witness_word: tuple = None
    regular_witness: tuple = None


def span_check(group, radius):
    """Dimension of the linear span of ball elements in matrix space, plus a
    regular (distinct-eigenvalue) element when one exists."""
    if radius < 1:
        raise PreconditionError("ball radius must be >= 1")
    ball = word_ball(group, radius)
    rows = []
    complex_entries = any(e.is_complex for e in ball.elements)
    for e in ball.elements:
        v = [complex(x) for x in e.m]
        if complex_entries:
            rows.append([x.real for x in v] + [x.imag for x in v])
        else:
            rows.append([x.real for x in v])
    dim = int(np.linalg.matrix_rank(np.array(rows), tol=1e-9))
    witness_word, witness = None, None
    for word, e in ball.nontrivial():
        t = complex(e.trace())
        if abs(t * t - 4.0) > 1e-8:
            witness_word, witness = word, e.m
            break
    return SpanReport(dimension=dim, regular_witness_word=witness_word,
                      regular_witness=witness)
