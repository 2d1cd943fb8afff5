"""Reductions on I2 (z1 = z7, z2 = z8)."""
import numpy as np

from app.api.schemas import InvariantSet
from app.core.config import DOMAIN_EPS
from app.core.exceptions import DomainError, UnsupportedCaseError
from .base import BaseReduction


def h_power(x, k: int, lam: float):
    """(lam*x^k / ((x^k + lam)(x - 1)))^(1/(k-1)), vectorised; NaN for x <= 1."""
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        xk = np.power(x, k)
        inner = lam * xk / ((xk + lam) * (x - 1.0))
        value = np.power(inner, 1.0 / (k - 1))
    return np.where(x > 1.0, value, np.nan)


def h_map(x: float, lam: float) -> float:
    """h(x) = sqrt(lam*x^3 / ((x^3 + lam)(x - 1))) for the (k=3, i=1) case."""
    if not x > 1.0:
        raise DomainError(f"h is defined for x > 1 only, got {x}")
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    return float(h_power(x, 3, lam))


class I2PowerReduction(BaseReduction):
    """I2 with i = 1 in the shifted coordinates x = 1 + lam*z1, y = 1 + lam*z2.

    The first equation of the system becomes y = h(x); the second x = h(y).
    """

    INVARIANT_SET = InvariantSet.I2
    SUBSTITUTION = "x = 1 + lam*z1, y = 1 + lam*z2, z7 = z1, z8 = z2"
    SUPPORTED_K = (2, 3)

    @classmethod
    def supports(cls, k: int, i: int) -> bool:
        return i == 1 and k in cls.SUPPORTED_K

    @property
    def map_id(self) -> str:
        return f"i2-h-k{self.k}"

    def domain(self, lam: float):
        return 1.0 + DOMAIN_EPS, 1.0 + lam

    def to_reduced(self, z, lam: float):
        return 1.0 + lam * z

    def from_reduced(self, u, lam: float):
        return (u - 1.0) / lam

    def rhs(self, a, b, lam: float):
        return h_power(a, self.k, lam)

    def partner(self, a, lam: float):
        return h_power(a, self.k, lam)

    def lift_order(self, zx, zy):
        return zx, zy, zx, zy


class I2SquareRootReduction(BaseReduction):
    """I2 with k = i = 2 in u = sqrt(z1), v = sqrt(z2): v = (1 + lam*u^2)(1 - u)/(lam*u)."""

    INVARIANT_SET = InvariantSet.I2
    MAP_ID = "i2-psi-k2"
    SUBSTITUTION = "x = sqrt(z1), y = sqrt(z2), z7 = z1, z8 = z2"

    @classmethod
    def supports(cls, k: int, i: int) -> bool:
        return k == 2 and i == 2

    def domain(self, lam: float):
        return DOMAIN_EPS, 1.0

    def to_reduced(self, z, lam: float):
        return np.sqrt(z)

    def from_reduced(self, u, lam: float):
        return u * u

    def rhs(self, a, b, lam: float):
        u = np.asarray(a, dtype=float)
        with np.errstate(all="ignore"):
            value = (1.0 + lam * u * u) * (1.0 - u) / (lam * u)
        return np.where(u > 0, value, np.nan)

    def partner(self, a, lam: float):
        return self.rhs(a, a, lam)

    def lift_order(self, zx, zy):
        return zx, zy, zx, zy


def i2_reduction(k: int, i: int) -> BaseReduction:
    for cls in (I2PowerReduction, I2SquareRootReduction):
        if cls.supports(k, i):
            return cls(k, i)
    raise UnsupportedCaseError(f"No reduction for I2 with k={k}, i={i}")
