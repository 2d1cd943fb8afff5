"""Boundary-law map W of the index-4 weakly periodic system and its TI fixed point."""
import logging
import math
from typing import FrozenSet, Union

import numpy as np
from scipy.optimize import brentq

from app.api.schemas import BoundaryLaw4, InvariantSet, ModelParams, Residual
from app.core.config import MEMBERSHIP_TOL, ROOT_TOL
from app.core.exceptions import DomainError, NumericRangeError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def lambda_from_temperature(J: float, T: float) -> float:
    """Activity exp(-J/T) for coupling J at temperature T."""
    if not T > 0:
        raise DomainError(f"Temperature must be positive, got {T}")
    return math.exp(-J / T)


def law_component(u: ArrayLike, v: ArrayLike, w: ArrayLike, k: int, i: int, lam: float) -> ArrayLike:
    """One right-hand side of system (4).

    (1+lam*u)^k / ((1+lam*u)^(k/i) + lam*v^(1-1/i))^i / (1+lam*w)^(k-i), written as
    (t / (t + lam*v^(1-1/i)))^i * (1+lam*w)^(i-k) with t = (1+lam*u)^(k/i).
    """
    t = np.power(1.0 + lam * u, k / i)
    if i == 1:
        v_term = lam
    else:
        v_term = lam * np.power(v, 1.0 - 1.0 / i)
    return np.power(t / (t + v_term), i) * np.power(1.0 + lam * w, i - k)


def w_components(z1: ArrayLike, z2: ArrayLike, z7: ArrayLike, z8: ArrayLike, k: int, i: int, lam: float):
    """Vectorised image of (z1, z2, z7, z8) under W."""
    with np.errstate(over="ignore", invalid="ignore"):
        return (
            law_component(z7, z8, z2, k, i, lam),
            law_component(z8, z7, z1, k, i, lam),
            law_component(z1, z2, z8, k, i, lam),
            law_component(z2, z1, z7, k, i, lam),
        )


def eval_W(state: BoundaryLaw4, params: ModelParams) -> BoundaryLaw4:
    """Apply the four right-hand sides of (4) once."""
    values = w_components(state.z1, state.z2, state.z7, state.z8, params.k, params.i, params.lam)
    image = np.array([float(v) for v in values])
    if not np.all(np.isfinite(image)) or np.any(image <= 0):
        raise NumericRangeError(
            f"W is not representable at lambda={params.lam}, k={params.k}, i={params.i}"
        )
    return BoundaryLaw4.from_array(image)


def residual(state: BoundaryLaw4, params: ModelParams) -> Residual:
    """Componentwise |state - W(state)| and its max-norm."""
    diff = np.abs(state.as_array() - eval_W(state, params).as_array())
    return Residual(components=tuple(float(d) for d in diff), max_norm=float(diff.max()))


def ti_fixed_point(k: int, lam: float) -> float:
    """Unique root in (0,1) of x(1+lam*x)^k = 1."""
    if k < 1 or not lam > 0:
        raise DomainError(f"Need k >= 1 and lambda > 0, got k={k}, lambda={lam}")

    def f(x: float) -> float:
        return x * (1.0 + lam * x) ** k - 1.0

    try:
        return brentq(f, 0.0, 1.0, xtol=ROOT_TOL * 1e-2, rtol=4 * np.finfo(float).eps)
    except OverflowError as e:
        raise NumericRangeError(f"TI equation overflows at lambda={lam}: {str(e)}")


def ti_law(k: int, lam: float) -> BoundaryLaw4:
    z = ti_fixed_point(k, lam)
    return BoundaryLaw4(z1=z, z2=z, z7=z, z8=z)


def invariant_set_membership(state: BoundaryLaw4, tol: float = MEMBERSHIP_TOL) -> FrozenSet[InvariantSet]:
    """Every invariant set of W whose defining equalities hold within tol."""
    if not tol > 0:
        raise DomainError(f"Tolerance must be positive, got {tol}")

    def close(a: float, b: float) -> bool:
        return abs(a - b) <= tol

    z1, z2, z7, z8 = state.z1, state.z2, state.z7, state.z8
    members = set()
    if close(z1, z7) and close(z2, z8):
        members.add(InvariantSet.I2)
    if close(z1, z2) and close(z7, z8):
        members.add(InvariantSet.I3)
    if close(z1, z8) and close(z2, z7):
        members.add(InvariantSet.I4)
    if len(members) == 3 or (close(z1, z2) and close(z1, z7) and close(z1, z8)):
        members.update({InvariantSet.I1, InvariantSet.I2, InvariantSet.I3, InvariantSet.I4})
    return frozenset(members)
