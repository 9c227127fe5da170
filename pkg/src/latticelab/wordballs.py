"""Finitely generated isometry groups and their word balls.

Word balls make every group quantifier finite-horizon: each downstream
report carries the radius it was computed at.  Elements are deduplicated up
to sign (projectivized matrices) with exact keys for exact entries, quantized
keys for floats.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import hyperbolic
from .errors import CapExceededError, PreconditionError

WORD_BALL_CAP = 10**6


class FinitelyGeneratedGroup:
    """Generator list plus bookkeeping; inverse closure is added on demand.

    Generators may be Moebius, Lorentz or Euclidean isometries; anything with
    __mul__, inverse(), dedup_key() and is_identity() works.
    """

    def __init__(self, generators, name=None, dedup_grid=1e-6):
        if not generators:
            raise PreconditionError("need at least one generator")
        self.generators = list(generators)
        self.name = name or "group"
        self.dedup_grid = dedup_grid
        self.exact = all(getattr(g, "exact", False) for g in generators)

    def symmetric_generators(self):
        """Generators and their inverses, deduplicated, identity dropped."""
        out, seen = [], set()
        for i, g in enumerate(self.generators):
            for h, label in ((g, i + 1), (g.inverse(), -(i + 1))):
                if h.is_identity():
                    continue
                k = h.dedup_key(self.dedup_grid)
                if k not in seen:
                    seen.add(k)
                    out.append((label, h))
        return out

    def conjugated(self, h):
        return FinitelyGeneratedGroup(
            [h * g * h.inverse() for g in self.generators],
            name=self.name + "^h",
            dedup_grid=self.dedup_grid,
        )

    def __repr__(self):
        return "FinitelyGeneratedGroup(%s, %d generators)" % (self.name, len(self.generators))


@dataclass
class WordBall:
    radius: int
    entries: list     # list of (word, element); word = tuple of signed generator labels

    @property
    def elements(self):
        return [e for _, e in self.entries]

    def nontrivial(self):
        return [(w, e) for w, e in self.entries if w]

    def __len__(self):
        return len(self.entries)


def word_ball(group, radius, cap=WORD_BALL_CAP):
    """All elements of word length <= radius over the symmetric generating
    set, each present exactly once (identity included, empty word)."""
    if radius < 0:
        raise PreconditionError("radius must be >= 0")
    sym = group.symmetric_generators()
    identity_word = ()
    first = group.generators[0]
    identity = first * first.inverse()
    entries = [(identity_word, identity)]
    seen = {identity.dedup_key(group.dedup_grid)}
    frontier = [(identity_word, identity)]
    for _ in range(radius):
        nxt = []
        for word, e in frontier:
            for label, s in sym:
                w = e * s
                k = w.dedup_key(group.dedup_grid)
                if k in seen:
                    continue
                seen.add(k)
                item = (word + (label,), w)
                entries.append(item)
                nxt.append(item)
                if len(entries) > cap:
                    raise CapExceededError("word ball exceeded %d elements" % cap)
        frontier = nxt
        if not frontier:
            break
    return WordBall(radius=radius, entries=entries)


# -- batched displacement -------------------------------------------------

def stack_moebius(elements):
    m = np.array([[complex(e.m[0]), complex(e.m[1]), complex(e.m[2]), complex(e.m[3])]
                  for e in elements])
    return m[:, 0], m[:, 1], m[:, 2], m[:, 3]


def moebius_apply_h2(stacked, z):
    a, b, c, d = stacked
    return (a * z + b) / (c * z + d)


def displacements_h2(stacked, point):
    """Vector of displacements of stacked real Moebius elements at an H^2 point."""
    z = point.z
    w = moebius_apply_h2(stacked, z)
    num = np.abs(w - z) ** 2
    arg = 1.0 + num / (2.0 * z.imag * np.maximum(w.imag, 1e-300))
    return np.arccosh(np.maximum(arg, 1.0))


def displacements_h3(stacked, point):
    a, b, c, d = stacked
    z, t = point.z, point.t
    den = np.abs(c * z + d) ** 2 + np.abs(c) ** 2 * t * t
    w = ((a * z + b) * np.conj(c * z + d) + a * np.conj(c) * t * t) / den
    tt = t / den
    num = np.abs(w - z) ** 2 + (tt - t) ** 2
    arg = 1.0 + num / (2.0 * t * tt)
    return np.arccosh(np.maximum(arg, 1.0))


def displacements_at(elements, point):
    """Displacement of every element at the given point (H^2/H^3/Euclidean)."""
    if isinstance(point, hyperbolic.HPoint):
        stacked = stack_moebius(elements)
        if point.dim == 2:
            return displacements_h2(stacked, point)
        return displacements_h3(stacked, point)
    x = np.asarray(point, dtype=float)
    return np.array([e.displacement(x) for e in elements])


def translate_points_h2(elements, point):
    """g . z for all stacked elements, as a complex vector."""
    stacked = stack_moebius(elements)
    return moebius_apply_h2(stacked, point.z)


def displacement_pruned_ball(group, base, keep, slack=None, cap=200000):
    """Elements g with d(base, g base) <= keep, found by BFS over the orbit.

    BFS expands through elements up to displacement keep + slack before
    pruning, so orbit points reachable only through detours are not lost; the
    default slack is twice the generator displacement, enough for cell
    adjacency paths in cocompact tilings.  Completeness at a given slack is a
    heuristic: callers should check stability under a larger slack (tested).
    """
    sym = group.symmetric_generators()
    if slack is None:
        gen_disp = max(hyperbolic.displacement(g, base) for _, g in sym)
        slack = 2.0 * gen_disp
    first = group.generators[0]
    identity = first * first.inverse()
    explore = keep + slack
    seen = {identity.dedup_key(group.dedup_grid)}
    kept = [identity]
    frontier = [identity]
    while frontier:
        nxt = []
        for e in frontier:
            for _, s in sym:
                w = e * s
                k = w.dedup_key(group.dedup_grid)
                if k in seen:
                    continue
                seen.add(k)
                d = hyperbolic.displacement(w, base)
                if d > explore:
                    continue
                nxt.append(w)
                if d <= keep:
                    kept.append(w)
                if len(seen) > cap:
                    raise CapExceededError("pruned orbit ball exceeded %d elements" % cap)
        frontier = nxt
    return kept
