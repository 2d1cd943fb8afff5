"""Reductions on I3 (z1 = z2, z7 = z8)."""
import numpy as np

from app.api.schemas import InvariantSet
from app.core.exceptions import UnsupportedCaseError
from .base import BaseReduction, bisect_increasing, power_or_one


class I3PowerReduction(BaseReduction):
    """k = i: x = F(y), y = F(x) with F(u) = (1 + lam*u^i) / (1 + lam*u^i + lam*u^(i-1)).

    F is not monotone for every lam, so enumeration does not rely on it.
    """

    INVARIANT_SET = InvariantSet.I3
    MAP_ID = "i3-k-eq-i"
    SUBSTITUTION = "z1 = z2 = x^i, z7 = z8 = y^i"

    @classmethod
    def supports(cls, k: int, i: int) -> bool:
        return k == i and k >= 1

    def to_reduced(self, z, lam: float):
        return np.power(z, 1.0 / self.i)

    def from_reduced(self, u, lam: float):
        return np.power(u, self.i)

    def rhs(self, a, b, lam: float):
        u = np.asarray(a, dtype=float)
        top = 1.0 + lam * np.power(u, self.i)
        return top / (top + lam * power_or_one(u, self.i - 1))

    def partner(self, a, lam: float):
        return self.rhs(a, a, lam)

    def lift_order(self, zx, zy):
        return zx, zx, zy, zy


class I3ImplicitReduction(BaseReduction):
    """i = 1, k >= 2: x (1 + lam*x)^(k-1) = G(y) with G(y) = (1+lam*y)^k / ((1+lam*y)^k + lam)."""

    INVARIANT_SET = InvariantSet.I3
    MAP_ID = "i3-i1"
    SUBSTITUTION = "z1 = z2 = x, z7 = z8 = y"

    @classmethod
    def supports(cls, k: int, i: int) -> bool:
        return i == 1 and k >= 2

    def to_reduced(self, z, lam: float):
        return z

    def from_reduced(self, u, lam: float):
        return u

    def _g(self, a, lam: float):
        t = np.power(1.0 + lam * np.asarray(a, dtype=float), self.k)
        return t / (t + lam)

    def rhs(self, a, b, lam: float):
        return self._g(a, lam) * np.power(1.0 + lam * np.asarray(b, dtype=float), 1 - self.k)

    def partner(self, a, lam: float):
        target = self._g(a, lam)
        root = bisect_increasing(
            lambda b: b * np.power(1.0 + lam * b, self.k - 1) - target, 0.0, 1.0, target
        )
        return np.where(np.isfinite(target), root, np.nan)

    def lift_order(self, zx, zy):
        return zx, zx, zy, zy


def i3_reduction(k: int, i: int) -> BaseReduction:
    for cls in (I3PowerReduction, I3ImplicitReduction):
        if cls.supports(k, i):
            return cls(k, i)
    raise UnsupportedCaseError(f"No reduction for I3 with k={k}, i={i}")
