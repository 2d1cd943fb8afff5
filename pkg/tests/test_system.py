import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.api.schemas import BoundaryLaw4, InvariantSet, ModelParams
from app.core.exceptions import DomainError, NumericRangeError
from app.core.system import (
    eval_W,
    invariant_set_membership,
    lambda_from_temperature,
    residual,
    ti_fixed_point,
    ti_law,
    w_components,
)
from .test_utils import ti_bisection


def test_lambda_from_temperature():
    """Test the activity exp(-J/T)."""
    assert lambda_from_temperature(0.0, 1.0) == 1.0
    assert lambda_from_temperature(-3.0 * math.log(2), 3.0) == pytest.approx(2.0, rel=1e-14)
    assert lambda_from_temperature(1.0, 1.0) == pytest.approx(0.3678794412, abs=1e-9)


@pytest.mark.parametrize("T", [0.0, -1.0])
def test_lambda_from_temperature_rejects_non_positive_temperature(T):
    """Test that T <= 0 is a domain error."""
    with pytest.raises(DomainError, match="Temperature"):
        lambda_from_temperature(1.0, T)


@pytest.mark.parametrize("k,lam", [(1, 0.5), (2, 1.0), (3, 1.8), (6, 34.8), (4, 100.0)])
def test_ti_fixed_point_matches_bisection(k, lam):
    """Test the TI root against plain bisection."""
    x = ti_fixed_point(k, lam)
    assert 0 < x < 1
    assert x == pytest.approx(ti_bisection(k, lam), abs=1e-13)


def test_ti_fixed_point_rejects_bad_input():
    """Test input validation of the TI equation."""
    with pytest.raises(DomainError):
        ti_fixed_point(0, 1.0)
    with pytest.raises(DomainError):
        ti_fixed_point(2, -1.0)


@pytest.mark.parametrize("k,i,lam", [(3, 1, 1.8), (2, 2, 4.0), (4, 3, 8.0), (5, 1, 0.5)])
def test_ti_law_is_fixed_by_W(k, i, lam):
    """Test that the TI point on all four coordinates is a fixed point of W."""
    params = ModelParams(k=k, i=i, lam=lam)
    law = ti_law(k, lam)
    image = eval_W(law, params)
    assert np.allclose(image.as_array(), law.as_array(), atol=1e-12)
    assert residual(law, params).max_norm < 1e-10


def test_first_component_limit_with_k_equal_i():
    """Test z1' -> 1/(1+lam) as z7, z8 -> 0 for k = i = 1."""
    z1, _, _, _ = w_components(0.3, 0.4, 1e-14, 1e-14, 1, 1, 1.0)
    assert float(z1) == pytest.approx(0.5, abs=1e-12)


def test_residual_positive_off_fixed_point():
    """Test that a non-solution has positive residual."""
    params = ModelParams(k=3, i=1, lam=1.8)
    state = BoundaryLaw4(z1=0.3, z2=0.5, z7=0.2, z8=0.4)
    res = residual(state, params)
    assert res.max_norm > 0
    assert res.max_norm == max(res.components)


def test_eval_W_reports_overflow(mocker):
    """Test that a non-finite image is a numeric-range error."""
    mocker.patch("app.core.system.w_components", return_value=(np.inf, 0.5, 0.5, 0.5))
    with pytest.raises(NumericRangeError):
        eval_W(BoundaryLaw4(z1=0.5, z2=0.5, z7=0.5, z8=0.5), ModelParams(k=2, i=1, lam=1.0))


def test_boundary_law_rejects_non_positive_components():
    """Test that components must be strictly positive."""
    with pytest.raises(ValidationError):
        BoundaryLaw4(z1=0.0, z2=0.5, z7=0.5, z8=0.5)


def test_model_params_validation():
    """Test parameter ranges and the lambda alias."""
    params = ModelParams(k=3, i=4, **{"lambda": 2.0})
    assert params.lam == 2.0
    assert params.model_dump(by_alias=True)["lambda"] == 2.0
    with pytest.raises(ValidationError):
        ModelParams(k=3, i=5, lam=1.0)
    with pytest.raises(ValidationError):
        ModelParams(k=0, i=1, lam=1.0)
    with pytest.raises(ValidationError):
        ModelParams(k=2, i=1, lam=0.0)


@pytest.mark.parametrize("invariant_set,pattern", [
    (InvariantSet.I2, lambda a, b: (a, b, a, b)),
    (InvariantSet.I3, lambda a, b: (a, a, b, b)),
    (InvariantSet.I4, lambda a, b: (a, b, b, a)),
])
def test_W_preserves_invariant_sets(invariant_set, pattern):
    """Test that W maps each invariant set into itself on random points."""
    rng = np.random.default_rng(7)
    params = ModelParams(k=3, i=2, lam=2.5)
    for a, b in rng.uniform(0.01, 0.99, size=(200, 2)):
        state = BoundaryLaw4.from_array(pattern(a, b))
        image = eval_W(state, params)
        assert invariant_set in invariant_set_membership(image, tol=1e-12)


def test_membership_of_diagonal_point():
    """Test that a point of I1 belongs to every invariant set."""
    members = invariant_set_membership(BoundaryLaw4(z1=0.4, z2=0.4, z7=0.4, z8=0.4))
    assert members == frozenset(InvariantSet)


def test_membership_of_generic_point():
    """Test that a generic point lies in no invariant set."""
    assert invariant_set_membership(BoundaryLaw4(z1=0.1, z2=0.2, z7=0.3, z8=0.4)) == frozenset()
