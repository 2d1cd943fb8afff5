"""Reductions on I4 (z1 = z8, z2 = z7)."""
import numpy as np

from app.api.schemas import InvariantSet
from app.core.exceptions import DomainError, UnsupportedCaseError
from .base import BaseReduction, bisect_increasing, power_or_one


def gamma(x, k: int, lam: float):
    """(1 + lam*x) / ((1 + lam*x)^k + lam), vectorised."""
    t = 1.0 + lam * np.asarray(x, dtype=float)
    return t / (np.power(t, k) + lam)


def gamma_map(x: float, k: int, lam: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"gamma is defined on [0, 1], got {x}")
    if k < 1 or not lam > 0:
        raise DomainError(f"Need k >= 1 and lambda > 0, got k={k}, lambda={lam}")
    return float(gamma(x, k, lam))


def gamma_prime(x, k: int, lam: float):
    """Derivative lam*((1-k)(1+lam*x)^k + lam) / ((1+lam*x)^k + lam)^2."""
    t = np.power(1.0 + lam * np.asarray(x, dtype=float), k)
    return lam * ((1 - k) * t + lam) / (t + lam) ** 2


def gamma_prime_at_fixed_point(xi: float, k: int, lam: float) -> float:
    """Closed form at a fixed point xi = (1 + lam*xi)^(-k)."""
    s = lam * xi
    return (s * (1 - k) + s * s) / (1.0 + s) ** 2


class I4PowerReduction(BaseReduction):
    """y = (1 + lam*x^i) / ((1 + lam*x^i)^(k/i) + lam*y^(i-1)) and the same with x, y swapped.

    y = z1^(1/i), x = z2^(1/i). For i = 1 the right side no longer involves y and
    reduces to gamma.
    """

    INVARIANT_SET = InvariantSet.I4
    SUBSTITUTION = "y = z1^(1/i), x = z2^(1/i), z7 = z2, z8 = z1"
    LISTED = {(3, 2), (4, 2), (4, 3)}

    @classmethod
    def supports(cls, k: int, i: int) -> bool:
        return k >= 1 and (i == 1 or i == k or (k, i) in cls.LISTED)

    @property
    def map_id(self) -> str:
        if self.i == 1:
            return f"i4-gamma-k{self.k}"
        return f"i4-k{self.k}-i{self.i}"

    def to_reduced(self, z, lam: float):
        return np.power(z, 1.0 / self.i)

    def from_reduced(self, u, lam: float):
        return np.power(u, self.i)

    def _coefficients(self, a, lam: float):
        c = 1.0 + lam * np.power(np.asarray(a, dtype=float), self.i)
        return np.power(c, self.k / self.i), c

    def rhs(self, a, b, lam: float):
        big_b, c = self._coefficients(a, lam)
        return c / (big_b + lam * power_or_one(np.asarray(b, dtype=float), self.i - 1))

    def partner(self, a, lam: float):
        """Positive root b of lam*b^i + B*b - C = 0."""
        big_b, c = self._coefficients(a, lam)
        if self.i == 1:
            return c / (big_b + lam)
        if self.i == 2:
            return 2.0 * c / (big_b + np.sqrt(big_b * big_b + 4.0 * lam * c))
        root = bisect_increasing(
            lambda b: lam * np.power(b, self.i) + big_b * b - c, 0.0, 1.0, c
        )
        return np.where(np.isfinite(c), root, np.nan)

    def lift_order(self, zx, zy):
        return zy, zx, zx, zy


def i4_reduction(k: int, i: int) -> BaseReduction:
    if I4PowerReduction.supports(k, i):
        return I4PowerReduction(k, i)
    raise UnsupportedCaseError(f"No reduction for I4 with k={k}, i={i}")
