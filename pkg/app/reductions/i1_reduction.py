import numpy as np

from app.api.schemas import InvariantSet
from .base import BaseReduction


class I1Reduction(BaseReduction):
    """The translation-invariant diagonal: z = (1 + lam*z)^(-k)."""

    INVARIANT_SET = InvariantSet.I1
    MAP_ID = "ti"
    SUBSTITUTION = "z1 = z2 = z7 = z8 = x"
    DIAGONAL_ONLY = True

    @classmethod
    def supports(cls, k: int, i: int) -> bool:
        return k >= 1 and 1 <= i <= k

    def to_reduced(self, z, lam: float):
        return z

    def from_reduced(self, u, lam: float):
        return u

    def rhs(self, a, b, lam: float):
        return np.power(1.0 + lam * np.asarray(a, dtype=float), -self.k)

    def partner(self, a, lam: float):
        return self.rhs(a, a, lam)

    def lift_order(self, zx, zy):
        return zx, zx, zx, zx
