"""Scalar root isolation, polynomial real roots and symmetric 2-variable systems."""
import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq, minimize_scalar

from app.api.schemas import ReducedPoint, RootList, TwoCycle
from app.core.config import (
    DEDUP_DISTANCE,
    KESTEN_MARGIN,
    POLY_SCAN_GRID,
    ROOT_TOL,
    SCAN_GRID,
    SOLUTION_MERGE_DISTANCE,
)
from app.core.exceptions import ConvergenceError, DomainError, NonMonotoneMapError

logger = logging.getLogger(__name__)

Func = Callable[[np.ndarray], np.ndarray]

_RTOL = 4 * np.finfo(float).eps


def evaluate(f: Callable, xs: np.ndarray) -> np.ndarray:
    """Evaluate f on an array, falling back to a scalar loop for non-vectorised callables."""
    with np.errstate(all="ignore"):
        try:
            values = np.asarray(f(xs), dtype=float)
            if values.shape == xs.shape:
                return values
        except (TypeError, ValueError):
            pass
        return np.array([float(f(x)) for x in xs], dtype=float)


def _scalar(f: Callable) -> Callable[[float], float]:
    vectorised = _is_vectorised(f)

    def g(x: float) -> float:
        with np.errstate(all="ignore"):
            if vectorised:
                return float(np.asarray(f(np.array([x]))).ravel()[0])
            return float(f(x))
    return g


def _is_vectorised(f: Callable) -> bool:
    try:
        with np.errstate(all="ignore"):
            out = np.asarray(f(np.array([0.5, 0.75])))
        return out.shape == (2,)
    except Exception:
        return False


def merge_close(values: Sequence[float], distance: float = DEDUP_DISTANCE) -> List[int]:
    """Indices of sorted values kept after merging neighbours closer than distance."""
    order = np.argsort(values)
    kept: List[int] = []
    for idx in order:
        if kept and abs(values[idx] - values[kept[-1]]) <= distance:
            continue
        kept.append(int(idx))
    return kept


def sign_change_brackets(xs: np.ndarray, values: np.ndarray) -> Tuple[List[float], List[Tuple[float, float]]]:
    """Exact grid zeros and sign-change brackets of sampled values; non-finite samples are skipped."""
    finite = np.isfinite(values)
    exact = [float(x) for x, v in zip(xs, values) if v == 0.0]
    left, right = values[:-1], values[1:]
    mask = finite[:-1] & finite[1:] & (np.sign(left) * np.sign(right) < 0)
    idx = np.nonzero(mask)[0]
    return exact, [(float(xs[j]), float(xs[j + 1])) for j in idx]


def bracketed_roots(
    f: Callable,
    a: float,
    b: float,
    grid_n: int = SCAN_GRID,
    tol: float = ROOT_TOL,
) -> RootList:
    """All roots of f on [a, b] found as sign changes on a uniform grid.

    Each bracket is solved with Brent's method (bisection safeguarded secant and
    inverse quadratic steps) to tol. A root missed by the grid is the caller's problem.
    """
    if not a < b:
        raise DomainError(f"Empty interval [{a}, {b}]")
    if grid_n < 2:
        raise DomainError(f"grid_n must be >= 2, got {grid_n}")

    xs = np.linspace(a, b, grid_n + 1)
    values = evaluate(f, xs)
    exact, brackets = sign_change_brackets(xs, values)
    scalar_f = _scalar(f)

    roots = list(exact)
    for lo, hi in brackets:
        try:
            roots.append(brentq(scalar_f, lo, hi, xtol=tol, rtol=_RTOL))
        except (RuntimeError, ValueError) as e:
            logger.debug(f"Bracket [{lo}, {hi}] abandoned: {str(e)}")
    logger.debug(f"{len(brackets)} brackets, {len(exact)} grid zeros on [{a}, {b}]")

    kept = [roots[j] for j in merge_close(roots)]
    residuals = [abs(scalar_f(r)) for r in kept]
    return RootList(
        roots=kept,
        residuals=residuals,
        bracket_width=(b - a) / grid_n,
        multiple=[False] * len(kept),
    )


def poly_real_roots(
    coeffs: Sequence[float],
    interval: Tuple[float, float],
    tol: float = 1e-8,
    grid_n: Optional[int] = None,
) -> RootList:
    """Real roots of a polynomial (ascending coefficients) inside an interval.

    Sign changes are bisected; touch points without a sign change are located as
    local minima of |p| and accepted when |p| falls below tol times the local term scale.
    Roots where p' also vanishes are flagged as multiple.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if c.size == 0:
        raise DomainError("Degenerate polynomial: all coefficients are zero")
    a, b = interval
    if not a < b:
        raise DomainError(f"Empty interval [{a}, {b}]")
    degree = c.size - 1
    n = grid_n or (POLY_SCAN_GRID if degree > 8 else SCAN_GRID)

    def p(x):
        return P.polyval(x, c)

    dc = P.polyder(c) if degree > 0 else np.zeros(1)
    xs = np.linspace(a, b, n + 1)
    values = p(xs)
    # sum of absolute terms bounds the rounding error of Horner evaluation
    term_scale = max(float(np.max(P.polyval(np.abs(xs), np.abs(c)))), 1.0)

    exact, brackets = sign_change_brackets(xs, values)
    roots = list(exact)
    for lo, hi in brackets:
        roots.append(brentq(lambda x: float(p(x)), lo, hi, xtol=1e-15, rtol=_RTOL))

    # touch points: interior local minima of |p| with no sign change around them
    mags = np.abs(values)
    for j in range(1, n):
        if mags[j] <= mags[j - 1] and mags[j] <= mags[j + 1] and values[j - 1] * values[j + 1] > 0:
            res = minimize_scalar(
                lambda x: abs(float(p(x))),
                bounds=(xs[j - 1], xs[j + 1]),
                method="bounded",
                options={"xatol": 1e-14},
            )
            if abs(float(p(res.x))) < tol * max(float(P.polyval(abs(res.x), np.abs(c))), 1.0):
                roots.append(float(res.x))

    kept = [roots[j] for j in merge_close(roots)]
    multiple = []
    residuals = []
    for r in kept:
        residuals.append(abs(float(p(r))))
        # p' at r compared with the sum of its absolute terms (its rounding floor)
        local_scale = max(float(P.polyval(abs(r), np.abs(dc))), 1.0)
        multiple.append(abs(float(P.polyval(r, dc))) < 1e-6 * local_scale)
    bad = [r for r, res in zip(kept, residuals) if res > max(tol, 1e-12) * term_scale]
    if bad:
        raise ConvergenceError(f"Polynomial roots failed back-substitution: {bad}")
    return RootList(roots=kept, residuals=residuals, bracket_width=(b - a) / n, multiple=multiple)


def monotone_piece_root(f: Callable[[float], float], a: float, b: float, tol: float = 1e-12) -> Optional[float]:
    """The root of a monotone f on [a, b], an endpoint within tol, or None."""
    fa, fb = f(a), f(b)
    if abs(fa) <= tol:
        return a
    if abs(fb) <= tol:
        return b
    if fa * fb > 0:
        return None
    return brentq(f, a, b, xtol=1e-15, rtol=_RTOL)


def central_derivative(f: Callable, x: float, h: float = 1e-6) -> float:
    g = _scalar(f)
    return (g(x + h) - g(x - h)) / (2 * h)


def in_domain(values: np.ndarray, domain: Tuple[float, float]) -> np.ndarray:
    a, b = domain
    return np.isfinite(values) & (values >= a) & (values <= b)


def restrict(f: Callable, domain: Tuple[float, float]) -> Func:
    """f with values outside domain replaced by NaN."""
    def g(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            y = np.asarray(f(x), dtype=float)
        return np.where(in_domain(y, domain), y, np.nan)
    return g


def compose(f: Callable, domain: Tuple[float, float]) -> Func:
    """x -> f(f(x)), NaN wherever the inner image leaves domain."""
    inner = restrict(f, domain)

    def g(x):
        y = inner(x)
        with np.errstate(all="ignore"):
            return np.asarray(f(np.nan_to_num(y, nan=domain[0])), dtype=float) + 0.0 * y
    return g


def trapping_interval(f: Callable, domain: Tuple[float, float], grid_n: int = SCAN_GRID) -> Tuple[float, float]:
    """Hull of f(f(domain)) intersected with domain, padded for sampling error.

    Every solution of x = f(y), y = f(x) has both coordinates in this interval.
    """
    a, b = domain
    xs = np.linspace(a, b, grid_n + 1)
    ffx = compose(f, domain)(xs)
    ok = in_domain(ffx, domain)
    if not np.any(ok):
        return a, b
    lo, hi = float(np.min(ffx[ok])), float(np.max(ffx[ok]))
    pad = 0.01 * (hi - lo) + 4 * (b - a) / grid_n
    return max(a, lo - pad), min(b, hi + pad)


def check_decreasing(f: Callable, domain: Tuple[float, float], grid_n: int = 1000) -> None:
    xs = np.linspace(domain[0], domain[1], grid_n + 1)
    ys = evaluate(f, xs)
    ys = ys[np.isfinite(ys)]
    if ys.size > 1 and not np.all(np.diff(ys) < 0):
        raise NonMonotoneMapError(f"Map is not strictly decreasing on [{domain[0]}, {domain[1]}]")


def quotient_map(f: Callable, domain: Tuple[float, float]) -> Func:
    """Q(x) = (f(f(x)) - x) / (f(x) - x).

    Off-diagonal solutions of the symmetric system are exactly the roots of Q away
    from the fixed points of f; at a fixed point Q tends to 1 + f'(x).
    """
    ff = compose(f, domain)
    inner = restrict(f, domain)

    def q(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return (ff(x) - x) / (inner(x) - x)
    return q


def solve_symmetric_system(
    f: Callable,
    domain: Tuple[float, float],
    tol: float = ROOT_TOL,
    grid_n: int = SCAN_GRID,
    check_monotone: bool = True,
) -> List[ReducedPoint]:
    """All solutions of x = f(y), y = f(x) in domain x domain.

    Diagonal solutions are the fixed points of f; each off-diagonal root a of the
    quotient map is paired with f(a).
    """
    box = trapping_interval(f, domain, grid_n)
    if check_monotone:
        check_decreasing(f, box)

    fd = restrict(f, domain)
    diagonal = bracketed_roots(lambda x: fd(x) - x, box[0], box[1], grid_n, tol).roots
    points = [ReducedPoint(x=r, y=r) for r in diagonal]

    # Q has a removable singularity at each diagonal root; keep brackets away from it
    q = quotient_map(f, domain)
    radius = 1.5 * (box[1] - box[0]) / grid_n
    centres = np.array(diagonal)

    def q_masked(x):
        x = np.asarray(x, dtype=float)
        values = q(x)
        if centres.size:
            near = np.min(np.abs(x[..., None] - centres), axis=-1) < radius
            values = np.where(near, np.nan, values)
        return values

    ff = compose(f, domain)
    for a in bracketed_roots(q_masked, box[0], box[1], grid_n, tol).roots:
        b = float(fd(np.array([a]))[0])
        if not np.isfinite(b) or abs(b - a) <= SOLUTION_MERGE_DISTANCE:
            continue
        if abs(float(ff(np.array([a]))[0]) - a) > 1e-9:
            logger.debug(f"Rejected quotient root {a}: not a fixed point of f o f")
            continue
        points.append(ReducedPoint(x=a, y=b))
        points.append(ReducedPoint(x=b, y=a))
    return dedup_points(points)


def dedup_points(points: Sequence[ReducedPoint], distance: float = SOLUTION_MERGE_DISTANCE) -> List[ReducedPoint]:
    kept: List[ReducedPoint] = []
    for p in sorted(points, key=lambda q: (q.x, q.y)):
        if any(p.distance(q) <= distance for q in kept):
            continue
        kept.append(p)
    return kept


def two_cycle_kesten(f: Callable, xi: float, tol: float = 1e-10) -> Optional[TwoCycle]:
    """A 2-cycle x1 < xi < x2 of a self-map of [0, 1] when f'(xi) < -1.

    None means the derivative criterion does not apply; it does not prove that no
    2-cycle exists.
    """
    g = _scalar(f)
    if abs(g(xi) - xi) > max(tol, 1e-12) * 10:
        raise DomainError(f"{xi} is not a fixed point of the map (f(xi) = {g(xi)})")
    slope = central_derivative(f, xi)
    if slope >= -1.0 - KESTEN_MARGIN:
        return None

    delta = 10 * tol
    roots = bracketed_roots(lambda x: evaluate(f, evaluate(f, np.asarray(x, dtype=float))) - x,
                            0.0, xi - delta, SCAN_GRID, tol * 1e-3).roots
    candidates = [r for r in roots if abs(r - xi) > delta and g(r) > xi]
    if not candidates:
        raise ConvergenceError(f"No 2-cycle found although f'(xi) = {slope} < -1")
    x1 = max(candidates)
    return TwoCycle(x1=x1, x2=g(x1), xi=xi, derivative=slope)
