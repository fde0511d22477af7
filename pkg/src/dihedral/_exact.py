"""Small exact-arithmetic helpers built on :class:`fractions.Fraction`."""

import math
from fractions import Fraction

# cos(2*pi*x) for the turn fractions x where the value is rational
_RATIONAL_COS = {
    Fraction(0): Fraction(1),
    Fraction(1, 6): Fraction(1, 2),
    Fraction(1, 4): Fraction(0),
    Fraction(1, 3): Fraction(-1, 2),
    Fraction(1, 2): Fraction(-1),
    Fraction(2, 3): Fraction(-1, 2),
    Fraction(3, 4): Fraction(0),
    Fraction(5, 6): Fraction(1, 2),
}


def is_exact(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def rational_cos(j, n):
    """Exact ``cos(2*pi*j/n)`` if it is rational, else ``None``."""
    return _RATIONAL_COS.get(Fraction(j, n) % 1)


def cos_turns(j, n):
    """``cos(2*pi*j/n)`` as a float, snapped to the exact value when rational."""
    c = rational_cos(j, n)
    if c is not None:
        return float(c)
    return math.cos(2.0 * math.pi * j / n)


def exact_sqrt(q):
    """Square root of a non-negative Fraction if it is rational, else ``None``."""
    q = Fraction(q)
    if q < 0:
        return None
    a, b = q.numerator, q.denominator
    ra, rb = math.isqrt(a), math.isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


def nullspace(rows):
    """Basis of the right nullspace of a matrix of Fractions.

    Plain Gauss-Jordan elimination; the matrices here are tiny.
    """
    m = [[Fraction(x) for x in row] for row in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis
