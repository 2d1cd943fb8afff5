"""Independent oracles shared by the test modules."""
import itertools
import math
from fractions import Fraction
from typing import List, Sequence

import numpy as np

from app.services.critical import POLY36

# Real roots of the degree-16 polynomial at lambda = 1.8 on (1, 3)
REMARK3_ROOTS = [1.285720838, 1.516308807, 1.846900632, 2.150852569]
REMARK3_TI_ROOT = 1.516308807
REMARK3_SPURIOUS_ROOT = 2.150852569


def rational_poly36(x: Fraction, lam: Fraction) -> Fraction:
    """f(lam, x) by Horner in exact rational arithmetic."""
    acc = Fraction(0)
    for coeffs in reversed(POLY36):
        c = Fraction(0)
        for a in reversed(coeffs):
            c = c * lam + a
        acc = acc * x + c
    return acc


def rational_g(x: Fraction, lam: Fraction) -> Fraction:
    """The deflated cubic written out term by term, independent of the library's helper."""
    c3 = -3 * x**3 + 6 * x**2 - 4 * x + 1
    c2 = -2 * x**7 - 4 * x**6 + 14 * x**5 - 11 * x**4 + 3 * x**3
    c1 = x**11 - 2 * x**10 - 2 * x**9 + 11 * x**8 - 10 * x**7 + 3 * x**6
    c0 = -x**12 + 3 * x**11 - 3 * x**10 + x**9
    return c3 * lam**3 + c2 * lam**2 + c1 * lam + c0


def trig_cubic_roots(a: float, b: float, c: float, d: float) -> List[float]:
    """Three real roots of a*t^3 + b*t^2 + c*t + d by the trigonometric method, sorted."""
    p = (3 * a * c - b * b) / (3 * a * a)
    q = (2 * b**3 - 9 * a * b * c + 27 * a * a * d) / (27 * a**3)
    if p >= 0:
        raise ValueError("trigonometric form needs three real roots")
    m = 2 * math.sqrt(-p / 3)
    arg = max(-1.0, min(1.0, 3 * q / (p * m)))
    theta = math.acos(arg) / 3
    shift = -b / (3 * a)
    return sorted(m * math.cos(theta - 2 * math.pi * j / 3) + shift for j in range(3))


def bisect(f, lo: float, hi: float, iterations: int = 200) -> float:
    """Plain bisection for a sign change on [lo, hi]."""
    flo = f(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ti_bisection(k: int, lam: float) -> float:
    return bisect(lambda x: x * (1 + lam * x) ** k - 1, 0.0, 1.0)


def exhaustive_independent_sets(parent: Sequence[int]) -> np.ndarray:
    """All 0/1 vectors with no occupied edge, by filtering every assignment."""
    n = len(parent)
    grid = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int8)
    keep = np.ones(grid.shape[0], dtype=bool)
    for v in range(1, n):
        keep &= ~((grid[:, v] == 1) & (grid[:, parent[v]] == 1))
    return grid[keep]


def exhaustive_measure(parent, level, depth: int, lam: float, z: float):
    """Weights lam^#sigma * z^(occupied boundary) normalised, over the exhaustive filter."""
    configs = exhaustive_independent_sets(parent)
    boundary = np.array(level) == depth
    weights = np.array([lam ** int(c.sum()) * z ** int(c[boundary].sum()) for c in configs])
    return configs, weights / weights.sum()
