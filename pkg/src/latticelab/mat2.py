"""Entry-generic 2x2 matrix helpers.

Moebius elements are stored as flat 4-tuples (a, b, c, d) so the same code
path serves exact entries (int / Fraction), floats and complexes.  Heavier
batch work converts to numpy arrays at the call site; these helpers stay
scalar on purpose.
"""

from fractions import Fraction
import math

from .errors import DimensionMismatchError


def mul(m, n):
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def inv_det1(m):
    """Inverse of a determinant-one matrix (exact when entries are exact)."""
    a, b, c, d = m
    return (d, -b, -c, a)


def det(m):
    a, b, c, d = m
    return a * d - b * c


def tr(m):
    return m[0] + m[3]


def is_exact(m):
    return all(isinstance(x, (int, Fraction)) for x in m)


def identity():
    return (1, 0, 0, 1)


def _sign_key(x):
    # Order on reals; on complexes: real part, ties by imaginary part.
    if isinstance(x, complex):
        if x.real != 0:
            return x.real
        return x.imag
    return x


def canonicalize_sign(m, tol=1e-7):
    """Flip the global sign so the first nonzero entry is positive.

    Resolves the +-m ambiguity of projectivized matrices.  For complex
    entries "positive" means positive real part (ties: positive imaginary
    part).  `tol` decides which entries count as zero for floats.
    """
    for x in m:
        mag = abs(x)
        if is_exact(m):
            if mag != 0:
                return m if _sign_key(x) > 0 else tuple(-y for y in m)
        elif mag > tol:
            return m if _sign_key(x) > 0 else tuple(-y for y in m)
    return m


def normalize_det1(m, tol=1e-9):
    """Scale to determinant one.  Exact inputs must already have det +-1."""
    d = det(m)
    if is_exact(m):
        if d == 1:
            return m
        if d == -1:
            raise ValueError("determinant -1 is not a Moebius isometry of the upper half space")
        raise ValueError("exact entries must have determinant 1, got %s" % (d,))
    if abs(d) < tol:
        raise ValueError("matrix is singular")
    if isinstance(d, complex) or any(isinstance(x, complex) for x in m):
        s = complex(d) ** (-0.5)
    else:
        if d < 0:
            raise ValueError("determinant -1 is not a Moebius isometry of the upper half space")
        s = 1.0 / math.sqrt(d)
    return tuple(x * s for x in m)


def frobenius_dist_to_identity(m):
    a, b, c, d = m
    return math.sqrt(abs(a - 1) ** 2 + abs(b) ** 2 + abs(c) ** 2 + abs(d - 1) ** 2)


def frobenius(m):
    return math.sqrt(sum(abs(x) ** 2 for x in m))


def key(m, grid=1e-6):
    """Hashable dedup key identifying m with -m.

    Exact entries key exactly; floats quantize onto `grid`.  Two distinct
    group elements closer than `grid` entrywise would collide, so callers
    pick `grid` below the least separation of the groups they enumerate.
    """
    m = canonicalize_sign(m)
    if is_exact(m):
        return m
    out = []
    for x in m:
        if isinstance(x, complex):
            out.append((round(x.real / grid), round(x.imag / grid)))
        else:
            out.append(round(x / grid))
    return tuple(out)


def as_tuple(mat):
    """Accept a 2x2 nested sequence or a flat 4-sequence."""
    try:
        if len(mat) == 2:
            (a, b), (c, d) = mat
            return (a, b, c, d)
        if len(mat) == 4:
            a, b, c, d = mat
            return (a, b, c, d)
    except (TypeError, ValueError):
        pass
    raise DimensionMismatchError("expected a 2x2 matrix, got %r" % (mat,))


def parse_entry(text):
    """Parse one matrix entry from structured text.

    Accepts integers, "p/q" rationals (exact), floats, and complex
    literals like "1+2j".
    """
    text = text.strip()
    if "/" in text and "j" not in text:
        return Fraction(text)
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return complex(text.replace(" ", ""))


def format_entry(x):
    if isinstance(x, Fraction):
        return "%d/%d" % (x.numerator, x.denominator)
    return repr(x)
