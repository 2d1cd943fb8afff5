"""Two-variable reductions of the boundary-law system on its invariant sets."""
from app.api.schemas import BoundaryLaw4, InvariantSet, ReducedCase, ReducedPoint
from app.core.exceptions import UnsupportedCaseError

from .base import BaseReduction
from .i1_reduction import I1Reduction
from .i2_reduction import I2PowerReduction, I2SquareRootReduction, h_map, h_power, i2_reduction
from .i3_reduction import I3ImplicitReduction, I3PowerReduction, i3_reduction
from .i4_reduction import I4PowerReduction, gamma, gamma_map, gamma_prime_at_fixed_point, i4_reduction

_FACTORIES = {
    InvariantSet.I2: i2_reduction,
    InvariantSet.I3: i3_reduction,
    InvariantSet.I4: i4_reduction,
}


def get_reduction(invariant_set: InvariantSet, k: int, i: int) -> BaseReduction:
    """The reduction for (invariant_set, k, i) or UnsupportedCaseError."""
    invariant_set = InvariantSet(invariant_set)
    if invariant_set == InvariantSet.I1:
        return I1Reduction(k, i)
    return _FACTORIES[invariant_set](k, i)


def _from_case(case: ReducedCase) -> BaseReduction:
    reduction = get_reduction(case.invariant_set, case.k, case.i)
    if reduction.map_id != case.map_id:
        raise UnsupportedCaseError(f"Unknown map {case.map_id} for {case.invariant_set.value}")
    return reduction


def reduced_map(case: ReducedCase, p: ReducedPoint, lam: float) -> ReducedPoint:
    return _from_case(case).reduced_map(p, lam)


def lift(case: ReducedCase, p: ReducedPoint, lam: float) -> BoundaryLaw4:
    return _from_case(case).lift(p, lam)


__all__ = [
    "BaseReduction",
    "I1Reduction",
    "I2PowerReduction",
    "I2SquareRootReduction",
    "I3ImplicitReduction",
    "I3PowerReduction",
    "I4PowerReduction",
    "gamma",
    "gamma_map",
    "gamma_prime_at_fixed_point",
    "get_reduction",
    "h_map",
    "h_power",
    "lift",
    "reduced_map",
]
