"""Closed subgroups of R^n (n <= 4) under truncation-Hausdorff convergence.

A closed subgroup of R^n is V + L: a linear subspace plus a lattice in a
complement.  Canonical form: L-generators are projected off V, reduced, and
sign/order normalized, so equal subgroups get equal data.  The convergence
metric compares intersections with the closed R-ball by Hausdorff distance
(d = R when exactly one truncation is empty, 0 when both are): a computable
proxy for the subgroup-space topology, assumed (documented, not proven here)
to induce it on this class.

Also here: Lagrange/greedy basis reduction with enumeration-certified
shortest vectors, the sup-over-packing covolume formula check, and the
bounded-covolume/short-vector compactness extraction of convergent lattice
subsequences.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import math

import numpy as np

from .errors import PreconditionError


# -- exact and float determinants -------------------------------------------

def _det_exact(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = Fraction(0)
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det_exact(minor)
        total += term if j % 2 == 0 else -term
    return total


def covolume(basis):
    """|det| of a full-rank basis (rows); exact for exact entries."""
    rows = [list(r) for r in basis]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise PreconditionError("need a square, full-rank basis")
    if all(isinstance(x, (int, Fraction)) for r in rows for x in r):
        d = _det_exact([[Fraction(x) for x in r] for r in rows])
        if d == 0:
            raise PreconditionError("basis is rank deficient")
        return abs(d)
    d = float(np.linalg.det(np.array(rows, dtype=float)))
    if abs(d) < 1e-12:
        raise PreconditionError("basis is rank deficient")
    return abs(d)


# -- reduction and enumeration ------------------------------------------------

def lagrange_reduce(basis):
    """Gauss-Lagrange reduction of a rank-2 basis: shortest possible pair."""
    u, v = (np.asarray(r, dtype=float) for r in basis)
    if u @ u > v @ v:
        u, v = v, u
    while True:
        q = round((u @ v) / (u @ u))
        v = v - q * u
        if v @ v >= u @ u:
            return np.array([u, v])
        u, v = v, u


def greedy_reduce(basis, rounds=64):
    """Norm-greedy reduction for rank <= 4: subtract rounded projections
    until stable, then sort by norm."""
    b = np.array(basis, dtype=float)
    m = b.shape[0]
    if m == 2:
        return lagrange_reduce(b)
    for _ in range(rounds):
        changed = False
        order = np.argsort(np.linalg.norm(b, axis=1))
        b = b[order]
        for i in range(m):
            for j in range(m):
                if i == j:
                    continue
                q = round((b[i] @ b[j]) / (b[j] @ b[j]))
                if q != 0:
                    cand = b[i] - q * b[j]
                    if cand @ cand < b[i] @ b[i] - 1e-15:
                        b[i] = cand
                        changed = True
        if not changed:
            break
    return b[np.argsort(np.linalg.norm(b, axis=1))]


def lattice_points_in_ball(basis, radius, cap=2_000_000):
    """All lattice points of norm <= radius, by box enumeration over
    coefficients (certified: the coefficient box contains every candidate
    because ||z B|| >= sigma_min ||z||)."""
    b = np.array(basis, dtype=float)
    m = b.shape[0]
    smin = np.linalg.svd(b, compute_uv=False).min()
    if smin < 1e-12:
        raise PreconditionError("basis not independent")
    k = int(math.floor(radius / smin)) + 1
    if (2 * k + 1) ** m > cap:
        raise PreconditionError("enumeration box too large; reduce the basis or radius")
    out = []
    for z in itertools.product(range(-k, k + 1), repeat=m):
        p = np.array(z, dtype=float) @ b
        if p @ p <= radius * radius + 1e-12:
            out.append(p)
    return out


def shortest_vector(basis):
    """Shortest nonzero vector, certified by enumeration inside the ball of
    the best reduced basis vector."""
    b = greedy_reduce(basis)
    best = b[0]
    for p in lattice_points_in_ball(b, float(np.linalg.norm(best)) + 1e-9):
        n2 = p @ p
        if 1e-18 < n2 < best @ best - 1e-15:
            best = p
    return best


def reduce_basis(basis):
    """Reduced basis (rank 2: Lagrange-optimal; rank <= 4: greedy with the
    shortest vector certified by enumeration)."""
    b = greedy_reduce(basis)
    sv = shortest_vector(b)
    if abs(np.linalg.norm(sv) - np.linalg.norm(b[0])) > 1e-9:
        b[0] = sv
        b = greedy_reduce(b)
    return _canonical_rows(b)


def _canonical_rows(b):
    rows = []
    for r in b:
        r = np.where(np.abs(r) < 1e-12, 0.0, r)
        for x in r:
            if abs(x) > 1e-9:
                if x < 0:
                    r = -r
                break
        rows.append(r)
    rows.sort(key=lambda r: (round(float(r @ r), 9),) + tuple(np.round(r, 9)))
    return np.array(rows)


# -- the closed subgroup type ----------------------------------------------------

@dataclass
class ClosedSubgroupRn:
    """V + L with V a subspace (orthonormal rows) and L a lattice orthogonal
    to V (rows).  Construct via the classmethods; canonicalization is applied
    there."""
    n: int
    v_basis: np.ndarray
    lattice_basis: np.ndarray

    @classmethod
    def from_parts(cls, n, v_basis=None, lattice_basis=None):
        v = np.zeros((0, n)) if v_basis is None or len(v_basis) == 0 \
            else np.array(v_basis, dtype=float)
        if v.shape[0]:
            # Orthonormal canonical basis of the row space.
            _, s, vt = np.linalg.svd(v)
            v = _canonical_rows(vt[: int((s > 1e-9).sum())])
        lat = np.zeros((0, n)) if lattice_basis is None or len(lattice_basis) == 0 \
            else np.array(lattice_basis, dtype=float)
        if lat.shape[0]:
            if v.shape[0]:
                lat = lat - (lat @ v.T) @ v
            keep = np.linalg.norm(lat, axis=1) > 1e-9
            lat = lat[keep]
            if lat.shape[0]:
                _, s, _ = np.linalg.svd(lat)
                if (s > 1e-9).sum() < lat.shape[0]:
                    raise PreconditionError("lattice generators dependent modulo V")
                lat = reduce_basis(lat)
        return cls(n=n, v_basis=v, lattice_basis=lat)

    @classmethod
    def lattice(cls, basis):
        basis = np.atleast_2d(np.array(basis, dtype=float))
        return cls.from_parts(basis.shape[1], None, basis)

    @classmethod
    def subspace(cls, basis):
        basis = np.atleast_2d(np.array(basis, dtype=float))
        return cls.from_parts(basis.shape[1], basis, None)

    @classmethod
    def trivial(cls, n):
        return cls.from_parts(n)

    @classmethod
    def full(cls, n):
        return cls.from_parts(n, np.eye(n), None)

    @property
    def v_dim(self):
        return self.v_basis.shape[0]

    @property
    def lattice_rank(self):
        return self.lattice_basis.shape[0]

    def min_lattice_norm(self):
        if self.lattice_rank == 0:
            return math.inf
        return float(np.linalg.norm(shortest_vector(self.lattice_basis)))

    def truncation_pieces(self, radius):
        """The pieces of (V + L) inside the closed R-ball: one disk of V-
        directions per lattice coset reachable within the ball.  Each piece
        is (base in V-perp, disk radius); V-dim 0 pieces are points."""
        if self.lattice_rank == 0:
            bases = [np.zeros(self.n)]
        else:
            bases = lattice_points_in_ball(self.lattice_basis, radius)
        out = []
        for lam in bases:
            r2 = radius * radius - float(lam @ lam)
            if r2 >= -1e-12:
                out.append((lam, math.sqrt(max(r2, 0.0))))
        return out

    def distance_to(self, x, radius, pieces=None):
        """Euclidean distance from x to (subgroup intersect closed R-ball)."""
        pieces = self.truncation_pieces(radius) if pieces is None else pieces
        if not pieces:
            return math.inf
        x = np.asarray(x, dtype=float)
        v = self.v_basis
        best = math.inf
        for lam, disk_r in pieces:
            if self.v_dim == 0:
                d = float(np.linalg.norm(x - lam))
            else:
                proj = (x @ v.T)
                norm_proj = float(np.linalg.norm(proj))
                if norm_proj > disk_r:
                    proj = proj * (disk_r / norm_proj)
                p = lam + proj @ v
                d = float(np.linalg.norm(x - p))
            best = min(best, d)
        return best


def chabauty_distance(h1, h2, radius):
    """Hausdorff distance between the two truncations to the closed R-ball.

    Conventions: R if exactly one truncation is empty, 0 if both are.  Exact
    for discrete truncations in any dimension and for continuous parts in
    dimension 1; higher-dimensional continuous parts are sampled (dense
    deterministic grid), which the worked examples do not need.
    """
    p1 = h1.truncation_pieces(radius)
    p2 = h2.truncation_pieces(radius)
    if not p1 and not p2:
        return 0.0
    if not p1 or not p2:
        return float(radius)
    d12 = _directed_sup(h1, p1, h2, p2, radius)
    d21 = _directed_sup(h2, p2, h1, p1, radius)
    return max(d12, d21)


def _directed_sup(ha, pieces_a, hb, pieces_b, radius):
    if ha.v_dim == 0:
        return max(hb.distance_to(lam, radius, pieces=pieces_b) for lam, _ in pieces_a)
    if ha.n == 1:
        # Pieces of A are intervals of the line; B's truncation is a finite
        # union of points/intervals.  The sup of the distance function is
        # attained at an interval endpoint or at a midpoint between
        # consecutive B-pieces: finitely many candidates, all exact.
        candidates = []
        for lam, disk_r in pieces_a:
            lo, hi = lam[0] - disk_r, lam[0] + disk_r
            candidates += [lo, hi]
            b_points = sorted(p[0] for p, _ in pieces_b)
            for u, w in zip(b_points, b_points[1:]):
                mid = (u + w) / 2.0
                if lo <= mid <= hi:
                    candidates.append(mid)
        return max(hb.distance_to(np.array([c]), radius, pieces=pieces_b)
                   for c in candidates)
    # Continuous pieces in dimension >= 2: deterministic dense sampling.
    sup = 0.0
    grid = np.linspace(-1.0, 1.0, 41)
    v = ha.v_basis
    for lam, disk_r in pieces_a:
        if ha.v_dim == 1:
            samples = [lam + t * disk_r * v[0] for t in grid]
        else:
            samples = [lam + (t * v[0] + s * v[1]) * disk_r / math.sqrt(2)
                       for t in grid[::4] for s in grid[::4]]
        for x in samples:
            if x @ x <= radius * radius + 1e-12:
                sup = max(sup, hb.distance_to(x, radius, pieces=pieces_b))
    return sup


# -- limits -------------------------------------------------------------------

@dataclass
class ChabautyLimitResult:
    limit: ClosedSubgroupRn
    converged: bool
    distances: dict = field(default_factory=dict)   # radius -> per-term distances
    witness: tuple = None                            # (radius, distances) when failed


def chabauty_limit(sequence, radii, tol=1e-3, merge_tol=1e-6):
    """Propose and verify a truncation-Hausdorff limit of closed subgroups.

    Proposal: directions of the final subgroups whose reduced lattice vectors
    stay below `merge_tol` for three consecutive terms merge into the
    connected part; the remaining lattice vectors converge and the last term
    represents them.  Verification: at every radius, the distance to the
    proposal must be nonincreasing toward <= tol; otherwise the result
    carries the oscillation witness.
    """
    if len(sequence) < 3:
        raise PreconditionError("need at least three terms")
    tail = sequence[-3:]
    last = tail[-1]
    r_max = max(radii)
    merge_dirs = []
    keep_rows = []
    for i in range(last.lattice_rank):
        norms = []
        for h in tail:
            if i < h.lattice_rank:
                norms.append(float(np.linalg.norm(h.lattice_basis[i])))
            else:
                norms.append(math.inf)
        if all(n < merge_tol for n in norms):
            merge_dirs.append(last.lattice_basis[i])
        elif norms[0] < norms[1] < norms[2] and norms[2] > r_max:
            # Diverging direction: contributes nothing inside any tested
            # truncation; the finite-horizon limit drops it.
            continue
        else:
            keep_rows.append(last.lattice_basis[i])
    v_rows = [r for r in last.v_basis] + merge_dirs
    limit = ClosedSubgroupRn.from_parts(
        last.n,
        np.array(v_rows) if v_rows else None,
        np.array(keep_rows) if keep_rows else None,
    )
    distances = {}
    witness = None
    converged = True
    for r in radii:
        ds = [chabauty_distance(h, limit, r) for h in sequence]
        distances[r] = ds
        # The whole tail must sit below tolerance: a sequence that merely
        # revisits the proposal while oscillating is not convergent.
        if max(ds[-3:]) > tol:
            converged = False
            witness = (r, ds)
    return ChabautyLimitResult(limit=limit, converged=converged,
                               distances=distances, witness=witness)


# -- sup-formula covolume check ---------------------------------------------------

@dataclass
class SupFormulaResult:
    best_volume: float
    best_candidate: dict
    covolume: float
    gap: float
    admissible_count: int


def sup_formula_check(lattice_basis, candidates):
    """Best volume among candidate sets K whose difference set K - K misses
    the lattice away from 0.  Always <= the covolume; the gap is reported.

    Candidates: {"kind": "box", "half_widths": [...]} or
    {"kind": "disk", "radius": r} (dimension 2), centered at the origin.
    """
    b = np.array(lattice_basis, dtype=float)
    n = b.shape[1]
    covol = covolume(lattice_basis)
    best, best_cand, count = 0.0, None, 0
    # Enumerate lattice points big enough for any candidate's difference set.
    max_extent = 0.0
    for cand in candidates:
        if cand["kind"] == "box":
            max_extent = max(max_extent, 2.0 * float(np.linalg.norm(cand["half_widths"])))
        else:
            max_extent = max(max_extent, 2.0 * cand["radius"])
    pts = [p for p in lattice_points_in_ball(b, max_extent + 1e-9)
           if p @ p > 1e-18]
    for cand in candidates:
        if cand["kind"] == "box":
            hw = np.asarray(cand["half_widths"], dtype=float)
            admissible = all(np.any(np.abs(p) >= 2.0 * hw - 1e-12) for p in pts)
            vol = float(np.prod(2.0 * hw))
        elif cand["kind"] == "disk":
            r = float(cand["radius"])
            admissible = all(p @ p >= (2.0 * r) ** 2 - 1e-12 for p in pts)
            vol = math.pi * r * r if n == 2 else (2.0 * r if n == 1 else None)
            if vol is None:
                raise PreconditionError("disk candidates only in dimensions 1 and 2")
        else:
            raise PreconditionError("unknown candidate kind %r" % (cand,))
        if admissible:
            count += 1
            if vol > best:
                best, best_cand = vol, cand
    return SupFormulaResult(best_volume=best, best_candidate=best_cand,
                            covolume=float(covol), gap=float(covol) - best,
                            admissible_count=count)


# -- compactness extraction ---------------------------------------------------------

@dataclass
class MahlerResult:
    indices: list
    limit_basis: np.ndarray
    limit_covolume: float
    limit_shortest: float


def mahler_subsequence(bases, max_covolume, min_shortest, tol=1e-6):
    """Extract a convergent subsequence from full-rank lattices with
    covolume <= v and shortest vector >= r.

    Preconditions are checked (violations name the offending index).  The
    reduced bases then live in a compact box -- each reduced vector's norm is
    at most 2^n gamma_n^{n/2} v / r^{n-1} (successive-minima bound through
    Hermite's constant, gamma_n <= 2 for n <= 4, times the greedy-reduction
    blowup) -- so bucket-and-halve pigeonholing yields a Cauchy subsequence.
    The proposed limit is verified against the same bounds.
    """
    reduced = []
    n = None
    for i, basis in enumerate(bases):
        b = np.array(basis, dtype=float)
        n = b.shape[1] if n is None else n
        if b.shape[0] != n:
            raise PreconditionError("lattice %d is not full rank" % i)
        cv = covolume(b.tolist())
        if float(cv) > max_covolume + 1e-9:
            raise PreconditionError("lattice %d has covolume %.6g > bound %.6g"
                                    % (i, float(cv), max_covolume))
        sv = float(np.linalg.norm(shortest_vector(b)))
        if sv < min_shortest - 1e-9:
            raise PreconditionError("lattice %d has shortest vector %.6g < bound %.6g"
                                    % (i, sv, min_shortest))
        reduced.append(reduce_basis(b))
    bound = (2.0 ** n) * (2.0 ** (n / 2.0)) * max_covolume / (min_shortest ** (n - 1))
    for i, b in enumerate(reduced):
        if np.linalg.norm(b, axis=1).max() > bound + 1e-6:
            raise PreconditionError("reduced basis %d escaped the compactness box" % i)
    indices = list(range(len(reduced)))
    grid = bound
    while grid > tol / 4.0 and len(indices) > 1:
        buckets = {}
        for i in indices:
            key = tuple(np.round(reduced[i] / grid).astype(np.int64).ravel().tolist())
            buckets.setdefault(key, []).append(i)
        chosen = max(buckets.values(), key=len)
        if len(chosen) < 2:
            break
        indices = chosen
        grid /= 2.0
    limit = reduced[indices[-1]]
    return MahlerResult(
        indices=indices,
        limit_basis=limit,
        limit_covolume=float(covolume(limit.tolist())),
        limit_shortest=float(np.linalg.norm(shortest_vector(limit))),
    )
