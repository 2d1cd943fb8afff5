"""Closed-form algebra of the I2 (k=3, i=1) case and the Kesten regime on I4.

The degree-16 polynomial f(lam, x) arises from squaring the single-variable form of
x = h(y), y = h(x). It factors as (lam + x^3 - x^4) * g(lam, x) with g cubic in lam.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from app.api.schemas import AdmissibilityReport, BranchValues, CriticalReport, RootList
from app.core.config import TANGENCY_TOL
from app.core.exceptions import ConvergenceError, DomainError
from app.core.system import ti_fixed_point
from app.reductions.base import BaseReduction
from app.utils.rootfind import central_derivative, monotone_piece_root, poly_real_roots

logger = logging.getLogger(__name__)

# POLY36[j] holds the coefficient of x^j as ascending powers of lam
POLY36: Tuple[Tuple[int, ...], ...] = (
    (0, 0, 0, 0, 1),
    (0, 0, 0, 0, -4),
    (0, 0, 0, 0, 6),
    (0, 0, 0, 4, -3),
    (0, 0, 0, -16),
    (0, 0, 0, 24),
    (0, 0, 6, -13),
    (0, 0, -24, 1),
    (0, 0, 36),
    (0, 4, -20),
    (0, -16),
    (0, 24, 3),
    (1, -14),
    (-4,),
    (6, 3),
    (-4, -1),
    (1,),
)

X_STAR = 1.5
LAMBDA_CR_I2 = 27 / 16


def _horner(coeffs: Sequence, t):
    acc = 0 * t
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def poly36_coefficients(lam) -> List:
    """Coefficients of f(lam, .) in x, ascending; exact when lam is a Fraction."""
    return [_horner(c, lam) for c in POLY36]


def poly36_eval(x, lam):
    return _horner(poly36_coefficients(lam), x)


def poly36_scale(x: float, lam: float) -> float:
    """Sum of the absolute terms of f at (x, lam); the rounding floor of poly36_eval."""
    terms = [_horner([abs(a) for a in c], abs(lam)) for c in POLY36]
    return float(_horner(terms, abs(x)))


def deflate_f_by_lambda1(x) -> Tuple:
    """(c3, c2, c1, c0) with g(lam, x) = c3*lam^3 + c2*lam^2 + c1*lam + c0."""
    c3 = -3 * x**3 + 6 * x**2 - 4 * x + 1
    c2 = -2 * x**7 - 4 * x**6 + 14 * x**5 - 11 * x**4 + 3 * x**3
    c1 = x**11 - 2 * x**10 - 2 * x**9 + 11 * x**8 - 10 * x**7 + 3 * x**6
    c0 = -(x**12) + 3 * x**11 - 3 * x**10 + x**9
    return c3, c2, c1, c0


def g_eval(lam, x):
    c3, c2, c1, c0 = deflate_f_by_lambda1(x)
    return ((c3 * lam + c2) * lam + c1) * lam + c0


def g_scale(lam: float, x: float) -> float:
    return float(sum(abs(c) * abs(lam) ** p for p, c in zip((3, 2, 1, 0), deflate_f_by_lambda1(x))))


def _require_above_one(x: float) -> None:
    if not x > 1.0:
        raise DomainError(f"Branch formulas need x > 1, got {x}")


def lambda1(x):
    return x**4 - x**3


def lambda2(x):
    return x**3 * (x - 1) ** 3 / (3 * x**2 - 3 * x + 1)


def lambda3(x):
    """Works for complex x as well, for complex-step differentiation."""
    return x**3 * (2 - x - x**2 + x * np.sqrt(x**2 + 2 * x - 3)) / (2 * x - 2)


def lambda4(x):
    return x**3 * (2 - x - x**2 - x * np.sqrt(x**2 + 2 * x - 3)) / (2 * x - 2)


def lambda_branches(x: float) -> BranchValues:
    _require_above_one(x)
    values = {
        "lambda1": float(lambda1(x)),
        "lambda2": float(lambda2(x)),
        "lambda3": float(lambda3(x)),
        "lambda4": float(lambda4(x)),
    }
    admissible = {}
    for name, lam in values.items():
        if lam > 0:
            admissible[name] = admissibility(x, lam).signs_match
        else:
            admissible[name] = False
    return BranchValues(x=x, admissible=admissible, **values)


def expr32(x, lam):
    return lam * x**6 - ((x**3 + lam) * (x - 1)) ** 2


def expr33(x, lam):
    return lam + 2 * x**3 - x**4


def squared_form(x, lam):
    """E32^2 - lam*x^3*(x^3+lam)*(x-1)*E33^2, identical to f(lam, x)."""
    return expr32(x, lam) ** 2 - lam * x**3 * (x**3 + lam) * (x - 1) * expr33(x, lam) ** 2


def unsquared31_residual(x: float, lam: float) -> float:
    """Relative residual of E32 = x*sqrt(lam*x*(x^3+lam)*(x-1)) * E33."""
    left = expr32(x, lam)
    right = x * math.sqrt(lam * x * (x**3 + lam) * (x - 1)) * expr33(x, lam)
    return abs(left - right) / max(abs(left) + abs(right), 1e-300)


def lambda_acute(x: float) -> Tuple[Optional[float], Optional[float]]:
    """Roots in lam of E32, or (None, None) when they are complex."""
    d = x**6 - 4 * x**3 * (x - 1) ** 2
    if d < 0:
        return None, None
    base = x**3 * (x**3 - 2 * (x - 1) ** 2)
    root = x**3 * math.sqrt(d)
    denom = 2 * (x - 1) ** 2
    return (base - root) / denom, (base + root) / denom


def lambda_breve(x: float) -> float:
    return x**4 - 2 * x**3


def admissibility(x: float, lam: float) -> AdmissibilityReport:
    _require_above_one(x)
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    acute1, acute2 = lambda_acute(x)
    breve = lambda_breve(x)
    complex_roots = acute1 is None
    if complex_roots:
        # E32 < 0 for every lam in this case
        cond34 = False
        cond35 = False
        below, above = True, True
    else:
        cond34 = acute1 < lam < acute2 and lam > breve
        cond35 = lam < acute1 and lam > acute2 and lam < breve
        below, above = lam < acute1, lam > acute2
    return AdmissibilityReport(
        x=x,
        lam=lam,
        complex_roots=complex_roots,
        lambda_acute1=acute1,
        lambda_acute2=acute2,
        lambda_breve=breve,
        cond34=cond34,
        cond35=cond35,
        cond35_either=(below or above) and lam < breve,
        sign32=int(np.sign(expr32(x, lam))),
        sign33=int(np.sign(expr33(x, lam))),
    )


def signed_partner(x: float, lam: float) -> float:
    """y = h(x) when the root of f is admissible, -h(x) when it only solves the squared form."""
    y = math.sqrt(lam * x**3 / ((x**3 + lam) * (x - 1)))
    return y if admissibility(x, lam).signs_match else -y


def poly36_roots(lam: float, interval: Tuple[float, float] = (1.0, 3.0)) -> RootList:
    return poly_real_roots(poly36_coefficients(lam), interval)


def _lambda3_slope(x: float, h: float = 1e-30) -> float:
    return float(np.imag(lambda3(complex(x, h)))) / h


def lambda_cr_I2(x_max: float = 10.0, coarse: int = 10_000) -> CriticalReport:
    """Minimum of lambda3 over (1, x_max] and the convexity of lambda3 on a grid."""
    xs = np.linspace(1.0, x_max, coarse + 1)[1:]
    values = lambda3(xs)
    j = int(np.nanargmin(values))
    lo, hi = xs[max(j - 1, 0)], xs[min(j + 1, xs.size - 1)]
    res = minimize_scalar(lambda3, bracket=(lo, xs[j], hi), method="golden", tol=1e-12)
    x_star = float(res.x)
    try:
        x_star = brentq(_lambda3_slope, x_star - 1e-4, x_star + 1e-4, xtol=1e-15)
    except ValueError:
        logger.debug(f"Slope refinement skipped around {x_star}")

    grid = np.linspace(1.05, 5.0, 2000)
    second = np.diff(lambda3(grid), 2)
    convex = bool(np.all(second > 0))
    lam_cr = float(lambda3(x_star))
    logger.info(f"lambda3 minimum at x*={x_star:.12g}, lambda_cr={lam_cr:.12g}")
    return CriticalReport(case="I2-k3-i1", lambda_cr=lam_cr, x_star=x_star, convex=convex)


def lambda3_preimages(lam: float, report: Optional[CriticalReport] = None) -> List[float]:
    """All x > 1 with lambda3(x) = lam, one per monotone piece."""
    report = report or lambda_cr_I2()
    x_star = report.x_star

    def f(x: float) -> float:
        return float(lambda3(x)) - lam

    if lam < report.lambda_cr - 1e-12:
        return []
    roots = []
    for a, b in ((1.0 + 1e-9, x_star), (x_star, lam + 10.0)):
        r = monotone_piece_root(f, a, b, tol=1e-12)
        if r is not None:
            roots.append(r)
    merged: List[float] = []
    for r in sorted(roots):
        if not merged or abs(r - merged[-1]) > 1e-6:
            merged.append(r)
    return merged


def s_lambda_pm(k: int) -> CriticalReport:
    """s(k) = (k - 3 -+ sqrt(k^2 - 6k + 1)) / 4 and lam(k) = (1 + s)^k * s."""
    disc = k * k - 6 * k + 1
    if disc < 0 or k < 6:
        raise DomainError(f"k^2 - 6k + 1 = {disc} < 0 for k={k}; the Kesten regime needs k >= 6")
    root = math.sqrt(disc)
    s_minus = (k - 3 - root) / 4
    s_plus = (k - 3 + root) / 4
    return CriticalReport(
        case=f"kesten-k{k}",
        s_minus=s_minus,
        s_plus=s_plus,
        lambda_minus=(1 + s_minus) ** k * s_minus,
        lambda_plus=(1 + s_plus) ** k * s_plus,
    )


def kappa(xi, k: int):
    """The activity for which xi is the TI fixed point: (xi^(-1/k) - 1) / xi."""
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(xi_arr <= 0) or np.any(xi_arr >= 1):
        raise DomainError(f"kappa needs 0 < xi < 1, got {xi}")
    value = (np.power(xi_arr, -1.0 / k) - 1.0) / xi_arr
    return float(value) if value.ndim == 0 else value


def diagonal_slope(reduction: BaseReduction, lam: float) -> float:
    """Derivative of the partner map at the diagonal fixed point."""
    x0 = reduction.ti_point(lam)
    h = min(1e-6, 1e-3 * abs(x0))
    return central_derivative(lambda u: reduction.partner(u, lam), x0, h)


def is_tangent(reduction: BaseReduction, lam: float) -> bool:
    return abs(1.0 + diagonal_slope(reduction, lam)) < TANGENCY_TOL


def tangency_lambda(reduction: BaseReduction, bracket: Tuple[float, float]) -> float:
    """The activity in bracket where the partner map has slope -1 at its fixed point."""
    def slope_gap(lam: float) -> float:
        return 1.0 + diagonal_slope(reduction, lam)

    a, b = bracket
    if slope_gap(a) * slope_gap(b) > 0:
        raise ConvergenceError(f"No slope -1 crossing for {reduction!r} on [{a}, {b}]")
    return brentq(slope_gap, a, b, xtol=1e-12)


def ti_round_trip(k: int, lam: float) -> float:
    return kappa(ti_fixed_point(k, lam), k)


