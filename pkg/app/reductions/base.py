import logging
from typing import Tuple

import numpy as np

from app.api.schemas import BoundaryLaw4, InvariantSet, ReducedCase, ReducedPoint
from app.core.exceptions import DomainError, UnsupportedCaseError
from app.core.system import ti_fixed_point

logger = logging.getLogger(__name__)


class BaseReduction:
    """Reduction of the four-variable system to a symmetric pair x = F(y, x), y = F(x, y).

    Subclasses supply the printed right-hand side ``rhs(a, b, lam)`` giving the variable
    paired with ``b`` from its partner ``a``, the resolved partner map ``partner(a, lam)``
    solving ``b = rhs(a, b, lam)`` for ``b``, and the coordinate change to z.
    """

    INVARIANT_SET: InvariantSet
    MAP_ID = "generic"
    SUBSTITUTION = ""
    DIAGONAL_ONLY = False

    def __init__(self, k: int, i: int):
        if not self.supports(k, i):
            raise UnsupportedCaseError(
                f"No reduction for {self.INVARIANT_SET.value} with k={k}, i={i}"
            )
        self.k = k
        self.i = i

    @classmethod
    def supports(cls, k: int, i: int) -> bool:
        raise NotImplementedError

    @property
    def case(self) -> ReducedCase:
        return ReducedCase(
            invariant_set=self.INVARIANT_SET,
            k=self.k,
            i=self.i,
            map_id=self.map_id,
            substitution=self.SUBSTITUTION,
        )

    @property
    def map_id(self) -> str:
        return self.MAP_ID

    def __repr__(self) -> str:
        return f"{type(self).__name__}(k={self.k}, i={self.i})"

    # coordinates

    def domain(self, lam: float) -> Tuple[float, float]:
        return 0.0, 1.0

    def to_reduced(self, z, lam: float):
        raise NotImplementedError

    def from_reduced(self, u, lam: float):
        raise NotImplementedError

    # maps

    def rhs(self, a, b, lam: float):
        raise NotImplementedError

    def partner(self, a, lam: float):
        raise NotImplementedError

    def reduced_map(self, p: ReducedPoint, lam: float) -> ReducedPoint:
        """Apply both right-hand sides once: (x, y) -> (F(y, x), F(x, y))."""
        if not self.in_domain(p, lam):
            raise DomainError(f"{p} is outside the domain of {self!r} at lambda={lam}")
        with np.errstate(all="ignore"):
            x_new = float(self.rhs(p.y, p.x, lam))
            y_new = float(self.rhs(p.x, p.y, lam))
        return ReducedPoint(x=x_new, y=y_new)

    def in_domain(self, p: ReducedPoint, lam: float) -> bool:
        a, b = self.domain(lam)
        return a <= p.x <= b and a <= p.y <= b

    def ti_point(self, lam: float) -> float:
        return float(self.to_reduced(ti_fixed_point(self.k, lam), lam))

    # lift

    def lift_order(self, zx: float, zy: float) -> Tuple[float, float, float, float]:
        """Place the z-values of the two reduced coordinates into (z1, z2, z7, z8)."""
        raise NotImplementedError

    def lift(self, p: ReducedPoint, lam: float) -> BoundaryLaw4:
        if not self.in_domain(p, lam):
            raise DomainError(f"{p} is outside the domain of {self!r} at lambda={lam}")
        zx = float(self.from_reduced(p.x, lam))
        zy = float(self.from_reduced(p.y, lam))
        return BoundaryLaw4.from_array(self.lift_order(zx, zy))


def power_or_one(u, exponent: int):
    """u**exponent with u**0 taken as exactly 1."""
    if exponent == 0:
        return np.ones_like(np.asarray(u, dtype=float))
    return np.power(u, exponent)


def bisect_increasing(h, lo: float, hi: float, like, iterations: int = 64):
    """Vectorised bisection for the root of an elementwise increasing function on [lo, hi]."""
    shape = np.shape(like)
    left = np.full(shape, lo, dtype=float)
    right = np.full(shape, hi, dtype=float)
    with np.errstate(all="ignore"):
        for _ in range(iterations):
            mid = 0.5 * (left + right)
            below = h(mid) < 0
            left = np.where(below, mid, left)
            right = np.where(below, right, mid)
    return 0.5 * (left + right)
