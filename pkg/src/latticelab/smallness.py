"""Commutator contraction near the identity and its consequences.

The engine: for matrices a = 1 + X, b = 1 + Y with small X, Y,
||[a,b] - 1|| <= 2 ||X|| ||Y|| ||a^-1|| ||b^-1||  (submultiplicative norm),
so iterated commutator sets contract to the identity at exponential speed
once max ||s - 1|| < 1/8 and the inverse norms stay below 2.  Downstream:
nilpotency detection for discretely generated groups, the abelian-index
bound for finite subgroups of compact groups, quasi-morphism defects, and
the short-element subgroup at a point of hyperbolic space.

Distance to the identity is Frobenius throughout (cheap, submultiplicative);
subgroups of SO(3)/SU(2) may use the exact rotation-angle metric instead.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from . import hyperbolic
from .errors import CapExceededError, PreconditionError
from .lattice_lab import BallGeometry
from .wordballs import FinitelyGeneratedGroup


# -- entry-generic square matrices --------------------------------------------

def mat_from(data):
    """Exact matrices become Fraction tuples; anything else numpy."""
    rows = [list(r) for r in data]
    if all(isinstance(x, (int, Fraction)) for r in rows for x in r):
        return tuple(tuple(Fraction(x) for x in r) for r in rows)
    return np.array(rows, dtype=complex if any(isinstance(x, complex)
                                               for r in rows for x in r) else float)


def mat_is_exact(m):
    return isinstance(m, tuple)


def mat_dim(m):
    return len(m) if mat_is_exact(m) else m.shape[0]


def mat_mul(a, b):
    if mat_is_exact(a) and mat_is_exact(b):
        n = len(a)
        return tuple(
            tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
            for i in range(n))
    return np.asarray(a) @ np.asarray(b)


def mat_inv(m):
    if not mat_is_exact(m):
        return np.linalg.inv(m)
    n = len(m)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise PreconditionError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def mat_identity(n, exact=True):
    if exact:
        return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
    return np.eye(n)


def mat_is_identity(m, tol=1e-12):
    if mat_is_exact(m):
        n = len(m)
        return all(m[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))
    return np.abs(np.asarray(m) - np.eye(mat_dim(m))).max() <= tol


def frobenius_to_identity(m):
    if mat_is_exact(m):
        n = len(m)
        return math.sqrt(sum(float(m[i][j] - (1 if i == j else 0)) ** 2
                             for i in range(n) for j in range(n)))
    d = np.asarray(m) - np.eye(mat_dim(m))
    return float(np.sqrt((np.abs(d) ** 2).sum()))


def frobenius_norm(m):
    if mat_is_exact(m):
        return math.sqrt(sum(float(x) ** 2 for r in m for x in r))
    return float(np.sqrt((np.abs(np.asarray(m)) ** 2).sum()))


def mat_key(m, grid=1e-9):
    if mat_is_exact(m):
        return m
    a = np.asarray(m)
    if np.iscomplexobj(a):
        return tuple((round(x.real / grid), round(x.imag / grid)) for x in a.ravel())
    return tuple(round(float(x) / grid) for x in a.ravel())


def rotation_angle_distance(m, kind="so3"):
    """Exact rotation-angle metric to the identity on SO(3) or SU(2)."""
    a = np.asarray(m)
    if kind == "so3":
        c = (np.trace(a).real - 1.0) / 2.0
        return math.acos(min(1.0, max(-1.0, c)))
    if kind == "su2":
        c = np.trace(a).real / 2.0
        return 2.0 * math.acos(min(1.0, max(-1.0, abs(c))))
    raise PreconditionError("unknown angle metric %r" % kind)


# -- commutators and ladders -----------------------------------------------------

def commutator(a, b):
    """a b a^-1 b^-1, exact when the inputs are exact."""
    if mat_dim(a) != mat_dim(b):
        raise PreconditionError("dimension mismatch")
    return mat_mul(mat_mul(a, b), mat_mul(mat_inv(a), mat_inv(b)))


@dataclass
class MatrixSet:
    matrices: list
    dimension: int
    exact: bool

    @classmethod
    def from_data(cls, data):
        ms = [mat_from(m) for m in data]
        if not ms:
            raise PreconditionError("empty matrix set")
        dim = mat_dim(ms[0])
        if any(mat_dim(m) != dim for m in ms):
            raise PreconditionError("mixed dimensions")
        return cls(matrices=_dedup(ms), dimension=dim,
                   exact=all(mat_is_exact(m) for m in ms))


def _dedup(ms):
    seen, out = set(), []
    for m in ms:
        k = mat_key(m)
        if k not in seen:
            seen.add(k)
            out.append(m)
    return out


@dataclass
class CommutatorLadder:
    levels: list                 # level n: deduplicated list of matrices
    max_dists: list              # m_n = max ||s - 1|| per level
    bound_asserted: bool
    bound_values: list = field(default_factory=list)
    bound_violations: int = 0


def commutator_ladder(s, levels):
    """Iterated commutator sets: level 0 is S, level n is {[s, u] : s in S,
    u in level n-1}, with m_n = max distance to the identity.

    When m_0 < 1/8 and every inverse in sight has norm <= 2 (the contraction
    regime), the exponential-speed bound m_n <= m_0 (8 m_0)^n is asserted per
    level; otherwise the ladder is still computed with the flag off.
    """
    if levels < 1:
        raise PreconditionError("need at least one level")
    if isinstance(s, MatrixSet):
        base = s.matrices
    else:
        base = MatrixSet.from_data(s).matrices
    ladder = [list(base)]
    dists = [max(frobenius_to_identity(m) for m in base)]
    inv_ok = all(frobenius_norm(mat_inv(m)) <= 2.0 for m in base)
    m0 = dists[0]
    asserted = m0 < 1.0 / 8.0 and inv_ok
    bound_values, violations = [], 0
    for n in range(1, levels + 1):
        nxt = []
        for a in base:
            for u in ladder[-1]:
                nxt.append(commutator(a, u))
        nxt = _dedup(nxt)
        ladder.append(nxt)
        dists.append(max(frobenius_to_identity(m) for m in nxt))
        if asserted:
            bound = m0 * (8.0 * m0) ** n
            bound_values.append(bound)
            if dists[-1] > bound + 1e-12:
                violations += 1
    return CommutatorLadder(levels=ladder, max_dists=dists,
                            bound_asserted=asserted,
                            bound_values=bound_values,
                            bound_violations=violations)


@dataclass
class NilpotencyVerdict:
    nilpotency_class: int = None
    exceeds_cutoff: bool = False
    exact: bool = True

    def __str__(self):
        return ("exceeds cutoff" if self.exceeds_cutoff
                else "class %d" % self.nilpotency_class)


def nilpotency_class(s, cutoff, float_tol=1e-10):
    """Least N <= cutoff with the level-N commutator set trivial.

    Exact entries give an exact verdict; floats decide triviality at
    `float_tol` and say so in the verdict."""
    ms = s if isinstance(s, MatrixSet) else MatrixSet.from_data(s)
    exact = ms.exact
    def trivial(level):
        if exact:
            return all(mat_is_identity(m) for m in level)
        return all(frobenius_to_identity(m) <= float_tol for m in level)
    current = ms.matrices
    if trivial(current):
        return NilpotencyVerdict(nilpotency_class=0, exact=exact)
    for n in range(1, cutoff + 1):
        current = _dedup([commutator(a, u) for a in ms.matrices for u in current])
        if trivial(current):
            return NilpotencyVerdict(nilpotency_class=n, exact=exact)
    return NilpotencyVerdict(exceeds_cutoff=True, exact=exact)


# -- finite groups: closure, Jordan bound, brute-force oracle ----------------------

def close_under_multiplication(generators, cap=10**5):
    """Multiplicative closure of matrix generators (finite groups only)."""
    gens = [mat_from(g) if not (mat_is_exact(g) or isinstance(g, np.ndarray)) else g
            for g in generators]
    elements = {}
    frontier = list(gens)
    for g in gens:
        elements[mat_key(g, grid=1e-6)] = g
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(elements.values()):
                for prod in (mat_mul(a, b), mat_mul(b, a)):
                    k = mat_key(prod, grid=1e-6)
                    if k not in elements:
                        elements[k] = prod
                        nxt.append(prod)
                        if len(elements) > cap:
                            raise CapExceededError("closure exceeded %d elements" % cap)
        frontier = nxt
    return list(elements.values())


def _check_closed(elements):
    keys = {mat_key(m, grid=1e-6) for m in elements}
    for a in elements:
        for b in elements:
            if mat_key(mat_mul(a, b), grid=1e-6) not in keys:
                raise PreconditionError("set is not closed under multiplication")


@dataclass
class JordanReport:
    index: int
    subgroup_size: int
    abelian_verified: bool
    group_size: int
    epsilon: float


def jordan_abelian_index(elements, epsilon, metric="frobenius"):
    """Index of the subgroup generated by the elements within epsilon of the
    identity in a finite matrix group.

    Small generators land in a commutator-contraction neighborhood, so the
    subgroup they generate is abelian; the report verifies commutativity
    outright.  Cross-check against `max_abelian_index_bruteforce`, which can
    only do better.
    """
    if epsilon <= 0:
        raise PreconditionError("epsilon must be positive")
    _check_closed(elements)
    if metric == "frobenius":
        dist = frobenius_to_identity
    else:
        dist = lambda m: rotation_angle_distance(m, kind=metric)
    seeds = [m for m in elements if dist(m) <= epsilon]
    keys = {mat_key(m, grid=1e-6): i for i, m in enumerate(elements)}
    sub = {}
    for m in seeds:
        sub[mat_key(m, grid=1e-6)] = m
    if not sub:
        ident = [m for m in elements if mat_is_identity(m, tol=1e-9)]
        if not ident:
            raise PreconditionError("identity missing from the group")
        sub[mat_key(ident[0], grid=1e-6)] = ident[0]
    frontier = list(sub.values())
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(sub.values()):
                for prod in (mat_mul(a, b), mat_mul(b, a)):
                    k = mat_key(prod, grid=1e-6)
                    if k not in keys:
                        raise PreconditionError("set is not closed under multiplication")
                    if k not in sub:
                        sub[k] = prod
                        nxt.append(prod)
        frontier = nxt
    abelian = True
    vals = list(sub.values())
    for i, a in enumerate(vals):
        for b in vals[i + 1:]:
            if frobenius_norm(np.asarray(mat_mul(a, b)) - np.asarray(mat_mul(b, a))) > 1e-9:
                abelian = False
    if len(elements) % len(sub) != 0:
        raise PreconditionError("subgroup size does not divide the group size")
    return JordanReport(index=len(elements) // len(sub),
                        subgroup_size=len(sub),
                        abelian_verified=abelian,
                        group_size=len(elements),
                        epsilon=epsilon)


def max_abelian_index_bruteforce(elements):
    """Exhaustive search for the largest abelian subgroup; returns
    (best index, best size).  Feasible for desk-scale groups (|F| <= a few
    hundred): grow each cyclic subgroup by every commuting element, closing
    as we go, and deduplicate subgroups by their element sets."""
    n = len(elements)
    keys = {mat_key(m, grid=1e-6): i for i, m in enumerate(elements)}
    table = [[keys[mat_key(mat_mul(a, b), grid=1e-6)] for b in elements] for a in elements]
    commute = [[table[i][j] == table[j][i] for j in range(n)] for i in range(n)]

    def close_idx(idx_set):
        out = set(idx_set)
        frontier = list(out)
        while frontier:
            nxt = []
            for i in frontier:
                for j in list(out):
                    for k in (table[i][j], table[j][i]):
                        if k not in out:
                            out.add(k)
                            nxt.append(k)
            frontier = nxt
        return frozenset(out)

    best_size = 1
    seen = set()
    stack = [close_idx({i}) for i in range(n)]
    while stack:
        sub = stack.pop()
        if sub in seen:
            continue
        seen.add(sub)
        if any(not commute[i][j] for i in sub for j in sub):
            continue
        best_size = max(best_size, len(sub))
        for h in range(n):
            if h in sub:
                continue
            if all(commute[h][i] for i in sub):
                stack.append(close_idx(sub | {h}))
    return n // best_size if n % best_size == 0 else math.ceil(n / best_size), best_size


# -- example finite groups ----------------------------------------------------------

def _rodrigues(axis, theta):
    u = np.asarray(axis, dtype=float)
    u = u / np.linalg.norm(u)
    k = np.array([[0, -u[2], u[1]], [u[2], 0, -u[0]], [-u[1], u[0], 0]])
    return np.eye(3) + math.sin(theta) * k + (1 - math.cos(theta)) * (k @ k)


def icosahedral_rotation_group():
    """The 60 rotations of the icosahedron, generated by two 5-fold axes."""
    phi = (1 + math.sqrt(5)) / 2
    g1 = _rodrigues([0.0, 1.0, phi], 2 * math.pi / 5)
    g2 = _rodrigues([0.0, 1.0, -phi], 2 * math.pi / 5)
    return close_under_multiplication([g1, g2], cap=200)


def quaternion_group_su2():
    """The order-8 quaternion subgroup of SU(2)."""
    i = np.array([[1j, 0], [0, -1j]])
    j = np.array([[0.0 + 0j, 1.0], [-1.0, 0.0]])
    return close_under_multiplication([i, j], cap=32)


# -- quasi-morphism defect ------------------------------------------------------------

def circle_mult(u, v):
    return u * v


def circle_dist(u, v):
    """Angle metric on the unit circle in the complexes."""
    w = u * complex(v).conjugate()
    return abs(math.atan2(w.imag, w.real))


def quasi_morphism_defect(elements, mult, f, target_mult, target_dist):
    """max over pairs of d(f(ab), f(a) f(b)); zero exactly for homomorphisms."""
    worst = 0.0
    for a in elements:
        fa = f(a)
        for b in elements:
            d = target_dist(f(mult(a, b)), target_mult(fa, f(b)))
            worst = max(worst, d)
    return worst


# -- short-element subgroups at a point -----------------------------------------------

@dataclass
class ShortSubgroupReport:
    kind: str                  # trivial / elementary-parabolic / elementary-hyperbolic /
                               # elementary-elliptic / not-elementary-within-cutoff
    short_words: list
    epsilon: float
    cutoff: int
    axis: tuple = None
    fixed_boundary: complex = None
    fixed_interior: object = None


def margulis_short_subgroup(group, x, epsilon, word_cutoff, geometry=None):
    """Word-ball elements displacing x by at most epsilon, classified as an
    elementary group when they share an axis (tube type), a boundary fixed
    point (cusp type) or an interior fixed point (cone type, torsion).

    Borderline classification of a short element propagates as an error.
    """
    if word_cutoff < 1:
        raise PreconditionError("word cutoff must be >= 1")
    if not isinstance(group, FinitelyGeneratedGroup):
        group = FinitelyGeneratedGroup(list(group))
    bg = geometry or BallGeometry(group, word_cutoff)
    disp = bg.displacements(x)
    idx = [int(i) for i in np.nonzero(disp <= epsilon)[0]]
    words = [bg.words[i] for i in idx]
    if not idx:
        return ShortSubgroupReport(kind="trivial", short_words=[],
                                   epsilon=epsilon, cutoff=word_cutoff)
    classes = [hyperbolic.classify(bg.elements[i]) for i in idx]
    kinds = {c.kind for c in classes}
    if kinds == {hyperbolic.HYPERBOLIC}:
        axis = classes[0].axis
        if all(hyperbolic.same_axis(axis, c.axis) for c in classes[1:]):
            return ShortSubgroupReport(kind="elementary-hyperbolic",
                                       short_words=words, epsilon=epsilon,
                                       cutoff=word_cutoff, axis=axis)
    elif kinds == {hyperbolic.PARABOLIC}:
        fp = classes[0].fixed_boundary
        if all(hyperbolic.same_boundary_point(fp, c.fixed_boundary) for c in classes[1:]):
            return ShortSubgroupReport(kind="elementary-parabolic",
                                       short_words=words, epsilon=epsilon,
                                       cutoff=word_cutoff, fixed_boundary=fp)
    elif kinds == {hyperbolic.ELLIPTIC}:
        fp = classes[0].fixed_interior
        if all(fp.close_to(c.fixed_interior, 1e-6) for c in classes[1:]):
            return ShortSubgroupReport(kind="elementary-elliptic",
                                       short_words=words, epsilon=epsilon,
                                       cutoff=word_cutoff, fixed_interior=fp)
    return ShortSubgroupReport(kind="not-elementary-within-cutoff",
                               short_words=words, epsilon=epsilon,
                               cutoff=word_cutoff)
