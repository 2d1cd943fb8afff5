import numpy as np
import pytest

from app.api.schemas import BoundaryLaw4, InvariantSet, ModelParams, SolutionClass
from app.core.config import settings
from app.core.exceptions import DomainError, SizeGuardError
from app.core.system import ti_fixed_point
from app.services.measure import (
    NON_A_PAIR_TABLE,
    assign_classes,
    build_tree,
    consistency_check,
    enumerate_admissible,
    find_class_pair_tables,
    finite_volume_measure,
    independence_polynomial,
    partition_function,
    ti_law,
    tree_size,
    weakly_periodic_law,
)
from app.services.phases import enumerate_solutions
from .test_utils import exhaustive_independent_sets, exhaustive_measure


def _as_set(configs):
    return {tuple(int(x) for x in row) for row in configs}


@pytest.mark.parametrize("k,n,expected", [(2, 1, 4), (2, 2, 10), (3, 2, 17), (1, 3, 7), (4, 0, 1)])
def test_tree_size(k, n, expected):
    """Test vertex counts of the ball around the root."""
    assert tree_size(k, n) == expected
    assert build_tree(k, n).n_vertices == expected


def test_tree_labels():
    """Test that no vertex repeats its parent edge label."""
    tree = build_tree(3, 2)
    assert sorted(tree.label[tree.children(0)]) == [1, 2, 3, 4]
    for v in range(1, tree.n_vertices):
        children = tree.children(v)
        assert len(children) == 3 or tree.level[v] == 2
        assert tree.label[v] not in tree.label[children]
    assert tree.prefix(1) == 5
    assert list(tree.boundary) == list(range(5, 17))


def test_class_assignment():
    """Test root class 0, class 3 across an A edge and class 2 across the others."""
    tree = build_tree(2, 2)
    assignment = assign_classes(tree, {1})
    assert assignment.classes[0] == 0
    for v in tree.children(0):
        assert assignment.classes[v] == (3 if tree.label[v] == 1 else 2)
    for v in range(1, tree.n_vertices):
        c, p = assignment.class_pair(v)
        assert c ^ p in (2, 3)


def test_class_assignment_rejects_bad_A():
    """Test validation of A."""
    tree = build_tree(2, 1)
    with pytest.raises(DomainError):
        assign_classes(tree, set())
    with pytest.raises(DomainError):
        assign_classes(tree, {4})
    with pytest.raises(DomainError):
        assign_classes(tree, {1}).class_pair(0)


def test_star_has_nine_independent_sets():
    """Test the k = 2, n = 1 star."""
    assert enumerate_admissible(build_tree(2, 1)).shape == (9, 4)


@pytest.mark.parametrize("k,n", [(2, 2), (3, 2), (1, 4)])
def test_enumeration_matches_exhaustive_filter(k, n):
    """Test the BFS enumeration against filtering all 0/1 assignments."""
    tree = build_tree(k, n)
    configs = enumerate_admissible(tree)
    assert _as_set(configs) == _as_set(exhaustive_independent_sets(tree.parent))
    assert len(_as_set(configs)) == configs.shape[0]


@pytest.mark.parametrize("k,n", [(2, 2), (3, 2)])
def test_independence_polynomial(k, n):
    """Test the independence polynomial against the enumeration."""
    tree = build_tree(k, n)
    configs = enumerate_admissible(tree)
    coef = independence_polynomial(tree)
    assert coef.sum() == configs.shape[0]
    sizes = np.bincount(configs.sum(axis=1))
    assert list(coef) == list(sizes)
    assert np.polynomial.polynomial.polyval(1.7, coef) == pytest.approx(partition_function(tree, 1.7, np.ones(tree.n_vertices)))


def test_partition_function_matches_direct_sum():
    """Test the recursion against direct summation with a nonconstant law."""
    tree = build_tree(2, 2)
    z = np.linspace(0.3, 1.7, tree.boundary.size)
    measure = finite_volume_measure(tree, 1.3, z)
    assert partition_function(tree, 1.3, z) == pytest.approx(measure.partition, rel=1e-12)
    assert measure.probabilities.sum() == pytest.approx(1.0, abs=1e-14)


def test_measure_matches_exhaustive_oracle():
    """Test probabilities configuration by configuration."""
    tree = build_tree(2, 2)
    measure = finite_volume_measure(tree, 0.8, ti_law(0.6))
    configs, probs = exhaustive_measure(tree.parent, tree.level, tree.depth, 0.8, 0.6)
    expected = {tuple(int(x) for x in c): p for c, p in zip(configs, probs)}
    for c, p in zip(measure.configs, measure.probabilities):
        assert p == pytest.approx(expected[tuple(int(x) for x in c)], abs=1e-14)


def test_single_vertex_measure():
    """Test n = 0 with lambda = z = 1."""
    measure = finite_volume_measure(build_tree(2, 0), 1.0, ti_law(1.0))
    assert measure.probabilities == pytest.approx([0.5, 0.5])
    assert measure.partition == pytest.approx(2.0)


def test_small_lambda_concentrates_on_empty():
    """Test that the empty configuration dominates as lambda -> 0."""
    measure = finite_volume_measure(build_tree(2, 2), 1e-9, ti_law(1.0))
    empty = np.nonzero(measure.configs.sum(axis=1) == 0)[0][0]
    assert measure.probabilities[empty] == pytest.approx(1.0, abs=1e-7)


def test_measure_rejects_bad_inputs():
    """Test lambda and law validation."""
    tree = build_tree(2, 1)
    with pytest.raises(DomainError):
        finite_volume_measure(tree, 0.0, ti_law(1.0))
    with pytest.raises(DomainError):
        finite_volume_measure(tree, 1.0, ti_law(-1.0))
    with pytest.raises(DomainError):
        finite_volume_measure(tree, 1.0, [1.0, 2.0])


@pytest.mark.parametrize("k,lam", [(2, 0.5), (2, 1.5), (3, 1.8)])
def test_ti_law_is_consistent(k, lam):
    """Test that the TI fixed point gives a consistent family."""
    tree = build_tree(k, 2)
    assert consistency_check(tree, lam, ti_law(ti_fixed_point(k, lam))) < 1e-12


def test_wrong_constant_law_is_inconsistent():
    """Test that a constant law off the fixed point violates consistency."""
    tree = build_tree(2, 2)
    assert consistency_check(tree, 1.5, ti_law(0.9)) > 1e-3


def test_derived_parent_law_is_consistent():
    """Test consistency for a random boundary law with the parent law derived by recursion."""
    rng = np.random.default_rng(7)
    tree = build_tree(2, 2)
    law = rng.uniform(0.2, 2.0, size=tree.n_vertices)
    assert consistency_check(tree, 1.1, law, parent_law="derived") < 1e-10


def test_consistency_needs_depth():
    """Test that a single vertex has no consistency to check."""
    with pytest.raises(DomainError):
        consistency_check(build_tree(2, 0), 1.0, ti_law(0.5))


def test_size_guard(monkeypatch):
    """Test the vertex limit from settings and its explicit override."""
    monkeypatch.setattr(settings, "HC_MAX_TREE_VERTICES", 5)
    with pytest.raises(SizeGuardError) as e:
        build_tree(2, 2)
    assert e.value.EXIT_CODE == 2
    assert build_tree(2, 2, max_vertices=10).n_vertices == 10
    with pytest.raises(SizeGuardError):
        enumerate_admissible(build_tree(2, 2, max_vertices=10))


@pytest.fixture
def i2_wp_law(params_k3_i1):
    result = enumerate_solutions(params_k3_i1, InvariantSet.I2, 800)
    return next(s.law for s in result.solutions if s.solution_class == SolutionClass.WP)


def test_weakly_periodic_law_is_consistent(i2_wp_law):
    """Test the I2 weakly periodic law at lambda = 1.8 with A = {1}."""
    assignment = assign_classes(build_tree(3, 2), {1})
    law = weakly_periodic_law(assignment, i2_wp_law, 1.8)
    assert consistency_check(assignment.tree, 1.8, law) < 1e-9


def test_class_pair_table_search(i2_wp_law):
    """Test that the default table is among the passing assignments."""
    tables = find_class_pair_tables(i2_wp_law, 3, {1}, 1.8)
    assert NON_A_PAIR_TABLE in tables
    assert len(tables) == 8


def test_ti_law_passes_every_table():
    """Test that equal components make the table irrelevant."""
    z = ti_fixed_point(2, 1.5)
    tables = find_class_pair_tables(BoundaryLaw4(z1=z, z2=z, z7=z, z8=z), 2, {1}, 1.5)
    assert len(tables) == 24


def test_ti_solution_matches_ti_law():
    """Test that the solver's TI law is the constant consistent law."""
    params = ModelParams(k=2, i=1, lam=1.5)
    result = enumerate_solutions(params, InvariantSet.I1, 600)
    (solution,) = result.solutions
    tree = build_tree(2, 2)
    assert consistency_check(tree, 1.5, ti_law(solution.law.z1)) < 1e-12


def test_parent_law_modes():
    """Test that the evaluated mode checks the recursion while the derived mode always passes."""
    tree = build_tree(2, 2)
    law = ti_law(0.9)
    assert consistency_check(tree, 1.5, law) == consistency_check(tree, 1.5, law, parent_law="evaluated")
    assert consistency_check(tree, 1.5, law, parent_law="evaluated") > 1e-3
    assert consistency_check(tree, 1.5, law, parent_law="derived") < 1e-10
    with pytest.raises(DomainError, match="parent_law"):
        consistency_check(tree, 1.5, law, parent_law="recursion")
