"""Finite-volume hard-core measures on a labelled Cayley tree and their consistency."""
import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np

from app.api.schemas import BoundaryLaw4
from app.core.config import settings
from app.core.exceptions import DomainError, SizeGuardError

logger = logging.getLogger(__name__)

Law = Union[Callable[[int], float], Sequence[float], np.ndarray]
ParentLaw = Literal["evaluated", "derived"]

# Class c of a vertex is 2 * (depth parity) + (parity of A-labelled edges on its path).
# A vertex of class c entered by an edge outside A has parent class c ^ 2, by an A edge c ^ 3.
NON_A_PAIR_TABLE: Dict[Tuple[int, int], str] = {
    (0, 2): "z1",
    (2, 0): "z2",
    (1, 3): "z7",
    (3, 1): "z8",
}
_COMPONENTS = ("z1", "z2", "z7", "z8")


@dataclass(frozen=True)
class LabeledTree:
    """Ball of radius depth around the root, vertices in BFS order.

    label[v] is the generator on the edge from parent[v] to v; the root has parent -1, label 0.
    """
    k: int
    depth: int
    parent: np.ndarray
    level: np.ndarray
    label: np.ndarray

    @property
    def n_vertices(self) -> int:
        return int(self.parent.size)

    @property
    def boundary(self) -> np.ndarray:
        return np.nonzero(self.level == self.depth)[0]

    def prefix(self, depth: int) -> int:
        """Number of vertices at distance <= depth; they come first in BFS order."""
        return int(np.count_nonzero(self.level <= depth))

    def children(self, v: int) -> np.ndarray:
        return np.nonzero(self.parent == v)[0]


@dataclass(frozen=True)
class ClassAssignment:
    tree: LabeledTree
    A: FrozenSet[int]
    classes: np.ndarray

    def class_pair(self, v: int) -> Tuple[int, int]:
        if v == 0:
            raise DomainError("The root has no parent class")
        return int(self.classes[v]), int(self.classes[self.tree.parent[v]])


@dataclass(frozen=True)
class FiniteVolumeMeasure:
    tree: LabeledTree
    lam: float
    configs: np.ndarray
    probabilities: np.ndarray
    partition: float


def tree_size(k: int, n: int) -> int:
    if n == 0:
        return 1
    if k == 1:
        return 1 + 2 * n
    return 1 + (k + 1) * (k**n - 1) // (k - 1)


def _guard(n_vertices: int, max_vertices: Optional[int]) -> None:
    limit = max_vertices if max_vertices is not None else settings.HC_MAX_TREE_VERTICES
    if n_vertices > limit:
        raise SizeGuardError(
            f"Tree with {n_vertices} vertices exceeds the limit of {limit}; raise HC_MAX_TREE_VERTICES to override"
        )


def build_tree(k: int, n: int, max_vertices: Optional[int] = None) -> LabeledTree:
    if k < 1 or n < 0:
        raise DomainError(f"Need k >= 1 and n >= 0, got k={k}, n={n}")
    _guard(tree_size(k, n), max_vertices)

    parent, level, label = [-1], [0], [0]
    frontier = [0]
    for depth in range(1, n + 1):
        next_frontier = []
        for v in frontier:
            for a in range(1, k + 2):
                if a == label[v]:
                    continue
                parent.append(v)
                level.append(depth)
                label.append(a)
                next_frontier.append(len(parent) - 1)
        frontier = next_frontier
    logger.debug(f"Built tree k={k}, n={n} with {len(parent)} vertices")
    return LabeledTree(
        k=k,
        depth=n,
        parent=np.array(parent, dtype=int),
        level=np.array(level, dtype=int),
        label=np.array(label, dtype=int),
    )


def assign_classes(tree: LabeledTree, A: Iterable[int]) -> ClassAssignment:
    A = frozenset(A)
    if not A:
        raise DomainError("A must be nonempty")
    if not A <= set(range(1, tree.k + 2)):
        raise DomainError(f"A must be a subset of 1..{tree.k + 1}, got {sorted(A)}")
    classes = np.zeros(tree.n_vertices, dtype=int)
    for v in range(1, tree.n_vertices):
        flip = 3 if int(tree.label[v]) in A else 2
        classes[v] = classes[tree.parent[v]] ^ flip
    return ClassAssignment(tree=tree, A=A, classes=classes)


def enumerate_admissible(tree: LabeledTree, max_vertices: Optional[int] = None) -> np.ndarray:
    """All independent sets of the tree as 0/1 rows, built vertex by vertex in BFS order."""
    _guard(tree.n_vertices, max_vertices)
    configs = np.array([[0], [1]], dtype=np.int8)
    for v in range(1, tree.n_vertices):
        free = configs[configs[:, tree.parent[v]] == 0]
        empty = np.hstack([configs, np.zeros((configs.shape[0], 1), dtype=np.int8)])
        occupied = np.hstack([free, np.ones((free.shape[0], 1), dtype=np.int8)])
        configs = np.vstack([empty, occupied])
    return configs


def _subtree_weights(tree: LabeledTree, lam: float, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Per-vertex (empty, occupied) subtree weights, leaves first."""
    n = tree.n_vertices
    out = np.ones(n, dtype=float)
    occ = np.where(tree.level == tree.depth, lam * z, lam)
    for v in range(n - 1, -1, -1):
        for c in tree.children(v):
            out[v] *= out[c] + occ[c]
            occ[v] *= out[c]
    return out, occ


def independence_polynomial(tree: LabeledTree) -> np.ndarray:
    """Coefficients (ascending) of sum over independent sets of t^|set|."""
    t = np.polynomial.Polynomial([0, 1])
    n = tree.n_vertices
    out: List[np.polynomial.Polynomial] = [np.polynomial.Polynomial([1])] * n
    occ: List[np.polynomial.Polynomial] = [t] * n
    for v in range(n - 1, -1, -1):
        for c in tree.children(v):
            out[v] = out[v] * (out[c] + occ[c])
            occ[v] = occ[v] * out[c]
    return np.rint((out[0] + occ[0]).coef).astype(np.int64)


def _law_values(tree: LabeledTree, law: Law, vertices: np.ndarray) -> np.ndarray:
    """Full-length array of z, filled on the given vertices."""
    z = np.ones(tree.n_vertices, dtype=float)
    if callable(law):
        values = np.array([float(law(int(v))) for v in vertices], dtype=float)
    else:
        values = np.asarray(law, dtype=float)
        if values.shape == (tree.n_vertices,):
            values = values[vertices]
        elif values.shape != (vertices.size,):
            raise DomainError(f"Law has shape {values.shape}, expected {(vertices.size,)}")
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise DomainError("Boundary law must be positive")
    z[vertices] = values
    return z


def partition_function(tree: LabeledTree, lam: float, law: Law) -> float:
    """Z_n by the tree recursion; matches the direct sum of finite_volume_measure."""
    z = _law_values(tree, law, tree.boundary)
    out, occ = _subtree_weights(tree, lam, z)
    return float(out[0] + occ[0])


def finite_volume_measure(tree: LabeledTree, lam: float, law: Law, max_vertices: Optional[int] = None) -> FiniteVolumeMeasure:
    """lam^#sigma * prod over occupied boundary vertices of z_x, normalised by direct summation.

    For n = 0 the boundary is the root itself.
    """
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    boundary = tree.boundary
    z = _law_values(tree, law, boundary)
    configs = enumerate_admissible(tree, max_vertices)
    occupied = configs.sum(axis=1)
    log_w = occupied * np.log(lam) + configs[:, boundary] @ np.log(z[boundary])
    shift = float(log_w.max())
    weights = np.exp(log_w - shift)
    total = float(weights.sum())
    partition = total * float(np.exp(shift))
    return FiniteVolumeMeasure(tree=tree, lam=lam, configs=configs, probabilities=weights / total, partition=partition)


def recursion_law(tree: LabeledTree, lam: float, z: np.ndarray, depth: int) -> np.ndarray:
    """z_x = prod over children y of 1 / (1 + lam*z_y) for x at the given depth."""
    derived = z.copy()
    for v in np.nonzero(tree.level == depth)[0]:
        derived[v] = float(np.prod(1.0 / (1.0 + lam * z[tree.children(v)])))
    return derived


def consistency_check(
    tree: LabeledTree,
    lam: float,
    law: Law,
    parent_law: ParentLaw = "evaluated",
    max_vertices: Optional[int] = None,
) -> float:
    """Max over sigma on V_(n-1) of |sum_omega mu_n(sigma v omega) - mu_(n-1)(sigma)|.

    parent_law="evaluated" reads the law on W_(n-1) from law itself, so the result measures
    how far law is from satisfying the tree recursion between the two levels.
    parent_law="derived" builds the W_(n-1) values from W_n by the recursion; that family is
    consistent for any positive law and serves as a check of the measure code.
    """
    if parent_law not in ("evaluated", "derived"):
        raise DomainError(f"parent_law must be 'evaluated' or 'derived', got {parent_law!r}")
    n = tree.depth
    if n < 1:
        raise DomainError("Consistency needs a tree of depth n >= 1")
    inner = build_tree(tree.k, n - 1, max_vertices)
    size = inner.n_vertices

    outer_z = _law_values(tree, law, tree.boundary)
    fine = finite_volume_measure(tree, lam, outer_z, max_vertices)

    if parent_law == "derived":
        parent_z = recursion_law(tree, lam, outer_z, n - 1)[:size]
    else:
        parent_z = _law_values(tree, law, np.nonzero(tree.level == n - 1)[0])[:size]
    coarse = finite_volume_measure(inner, lam, parent_z, max_vertices)

    prefixes, inverse = np.unique(fine.configs[:, :size], axis=0, return_inverse=True)
    marginal = np.bincount(inverse.ravel(), weights=fine.probabilities, minlength=prefixes.shape[0])
    index = {row.tobytes(): j for j, row in enumerate(prefixes.astype(np.int8))}
    violation = 0.0
    for row, p in zip(coarse.configs, coarse.probabilities):
        j = index.get(row.astype(np.int8).tobytes())
        q = marginal[j] if j is not None else 0.0
        violation = max(violation, abs(q - p))
    logger.debug(f"Consistency k={tree.k}, n={n}, lambda={lam}: violation {violation:.3g}")
    return float(violation)


def ti_law(z: float) -> Callable[[int], float]:
    return lambda v: z


def weakly_periodic_law(
    assignment: ClassAssignment,
    law: BoundaryLaw4,
    lam: float,
    table: Optional[Dict[Tuple[int, int], str]] = None,
) -> Callable[[int], float]:
    """Vertex value chosen by (class(x), class(parent of x)).

    Pairs in the table belong to edges outside A; the value across an A edge into class c
    is N_c^(1 - 1/i) * (1 + lam*N_(c^2))^(-k/i), with N the table values.
    """
    table = table or NON_A_PAIR_TABLE
    tree = assignment.tree
    k, m = tree.k, len(assignment.A)
    values = law.model_dump()
    non_a = {c: values[table[(c, c ^ 2)]] for c in range(4)}
    across_a = {
        c: non_a[c] ** (1.0 - 1.0 / m) * (1.0 + lam * non_a[c ^ 2]) ** (-k / m) for c in range(4)
    }

    def z(v: int) -> float:
        c, p = assignment.class_pair(v)
        return non_a[c] if p == c ^ 2 else across_a[c]
    return z


def find_class_pair_tables(
    law: BoundaryLaw4,
    k: int,
    A: Iterable[int],
    lam: float,
    n: int = 2,
    tol: float = 1e-9,
) -> List[Dict[Tuple[int, int], str]]:
    """Every assignment of (z1, z2, z7, z8) to the non-A class pairs that passes consistency."""
    assignment = assign_classes(build_tree(k, n), A)
    pairs = sorted(NON_A_PAIR_TABLE)
    passing = []
    for perm in itertools.permutations(_COMPONENTS):
        table = dict(zip(pairs, perm))
        generator = weakly_periodic_law(assignment, law, lam, table)
        if consistency_check(assignment.tree, lam, generator) < tol:
            passing.append(table)
    logger.info(f"{len(passing)} of 24 class-pair tables pass at lambda={lam}")
    return passing
