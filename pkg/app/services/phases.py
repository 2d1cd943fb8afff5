"""Solution enumeration on an invariant set, resolution-checked by a 2D grid oracle."""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage, optimize

from app.api.schemas import (
    BifurcationRow,
    BoundaryLaw4,
    InvariantSet,
    ModelParams,
    ReducedPoint,
    Solution,
    SolutionClass,
    SolutionSet,
)
from app.core.config import (
    ACCEPT_RESIDUAL,
    MEMBERSHIP_TOL,
    ORACLE_CHUNK_ROWS,
    ORACLE_RESOLUTION,
    settings,
)
from app.core.exceptions import DomainError, NumericRangeError
from app.core.system import residual
from app.reductions import BaseReduction, get_reduction
from app.services.critical import is_tangent
from app.utils.rootfind import (
    bracketed_roots,
    dedup_points,
    restrict,
    solve_symmetric_system,
)

logger = logging.getLogger(__name__)

AGREEMENT_DISTANCE = 1e-6
ORACLE_RESIDUAL = 1e-12
_MAX_SEEDS = 8


def classify(law: BoundaryLaw4, tol: float = MEMBERSHIP_TOL) -> SolutionClass:
    z = law.as_array()
    return SolutionClass.TI if float(np.ptp(z)) <= tol else SolutionClass.WP


def _partner(reduction: BaseReduction, lam: float):
    return lambda a: reduction.partner(a, lam)


def _residual_signs(reduction: BaseReduction, lam: float, xs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Signs of x - rhs(y, x) on the grid (rows y, columns x) and a finiteness mask."""
    n = xs.size
    signs = np.zeros((n, n), dtype=np.int8)
    valid = np.zeros((n, n), dtype=bool)
    with np.errstate(all="ignore"):
        for start in range(0, n, ORACLE_CHUNK_ROWS):
            ys = xs[start:start + ORACLE_CHUNK_ROWS, None]
            r1 = xs[None, :] - reduction.rhs(ys, xs[None, :], lam)
            r1 = np.broadcast_to(r1, (ys.shape[0], n))
            finite = np.isfinite(r1)
            signs[start:start + ys.shape[0]] = np.where(finite, np.sign(r1), 0).astype(np.int8)
            valid[start:start + ys.shape[0]] = finite
    return signs, valid


def _changes_sign(signs: np.ndarray, valid: np.ndarray) -> np.ndarray:
    corners = [signs[:-1, :-1], signs[:-1, 1:], signs[1:, :-1], signs[1:, 1:]]
    ok = valid[:-1, :-1] & valid[:-1, 1:] & valid[1:, :-1] & valid[1:, 1:]
    lo = np.minimum.reduce(corners)
    hi = np.maximum.reduce(corners)
    return ok & (lo <= 0) & (hi >= 0)


def _image_box(reduction: BaseReduction, lam: float, box: Tuple[float, float], n: int = 512) -> Tuple[float, float]:
    """Hull of rhs(box x box) intersected with box, padded for sampling error."""
    a, b = box
    grid = np.linspace(a, b, n + 1)
    with np.errstate(all="ignore"):
        values = np.asarray(reduction.rhs(grid[:, None], grid[None, :], lam), dtype=float)
    values = np.broadcast_to(values, (n + 1, n + 1))
    ok = np.isfinite(values) & (values >= a) & (values <= b)
    if not np.any(ok):
        return a, b
    lo, hi = float(values[ok].min()), float(values[ok].max())
    pad = 0.01 * (hi - lo) + 4 * (b - a) / n
    return max(a, lo - pad), min(b, hi + pad)


def _oracle_box(reduction: BaseReduction, lam: float) -> Tuple[float, float]:
    # every solution has x = rhs(y, x) with both coordinates in the box, so two passes tighten it
    box = reduction.domain(lam)
    for _ in range(2):
        box = _image_box(reduction, lam, box)
    return box


def _system(reduction: BaseReduction, lam: float):
    def F(p: np.ndarray) -> np.ndarray:
        x, y = float(p[0]), float(p[1])
        with np.errstate(all="ignore"):
            return np.array([x - float(reduction.rhs(y, x, lam)), y - float(reduction.rhs(x, y, lam))])
    return F


def _diagonal_roots(reduction: BaseReduction, lam: float, box: Tuple[float, float], grid_n: int) -> List[float]:
    def g(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return x - reduction.rhs(x, x, lam)
    return bracketed_roots(g, box[0], box[1], grid_n).roots


def _refine_cells(
    reduction: BaseReduction,
    lam: float,
    seeds: np.ndarray,
    x_range: Tuple[float, float],
    y_range: Tuple[float, float],
    min_gap: float,
) -> List[ReducedPoint]:
    """Newton-type 2D solve from each seed; keeps off-diagonal solutions inside the cell box."""
    F = _system(reduction, lam)
    points: List[ReducedPoint] = []
    for seed in seeds:
        try:
            sol = optimize.root(F, seed, method="hybr", options={"xtol": 1e-14})
        except (ValueError, FloatingPointError):
            continue
        x, y = (float(v) for v in sol.x)
        value = F(sol.x)
        if not np.all(np.isfinite(value)) or float(np.max(np.abs(value))) > ORACLE_RESIDUAL:
            continue
        if not (x_range[0] <= x <= x_range[1] and y_range[0] <= y <= y_range[1]):
            continue
        if abs(x - y) <= min_gap:
            continue
        points.append(ReducedPoint(x=x, y=y))
    return points


def grid_oracle(reduction: BaseReduction, lam: float, resolution: Optional[int] = None) -> List[ReducedPoint]:
    """Brute-force scan of the reduced square for cells where both residuals change sign.

    Works on the printed right-hand sides only: diagonal solutions come from a 1D scan of
    x - rhs(x, x), off-diagonal ones from a 2D solve seeded in each connected group of
    candidate cells. The partner map is never resolved, so it need not be monotone.
    """
    resolution = resolution or ORACLE_RESOLUTION
    box = _oracle_box(reduction, lam)
    points = [ReducedPoint(x=r, y=r) for r in _diagonal_roots(reduction, lam, box, resolution)]
    if reduction.DIAGONAL_ONLY:
        return points

    xs = np.linspace(box[0], box[1], resolution + 1)
    signs, valid = _residual_signs(reduction, lam, xs)
    cells = _changes_sign(signs, valid) & _changes_sign(signs.T, valid.T)
    labels, count = ndimage.label(cells, structure=np.ones((3, 3), dtype=int))
    logger.debug(f"Oracle at lambda={lam}: {int(cells.sum())} candidate cells in {count} groups")

    step = xs[1] - xs[0]
    centres = 0.5 * (xs[:-1] + xs[1:])
    for index, (rows, cols) in enumerate(ndimage.find_objects(labels), start=1):
        r, c = np.nonzero(labels[rows, cols] == index)
        seed_x, seed_y = centres[c + cols.start], centres[r + rows.start]
        off = np.abs(seed_x - seed_y) > 2 * step
        if not np.any(off):
            continue
        picks = np.unique(np.linspace(0, int(off.sum()) - 1, min(_MAX_SEEDS, int(off.sum()))).astype(int))
        seeds = np.column_stack([seed_x[off], seed_y[off]])[picks]
        x_range = (xs[cols.start] - step, xs[cols.stop] + step)
        y_range = (xs[rows.start] - step, xs[rows.stop] + step)
        points.extend(_refine_cells(reduction, lam, seeds, x_range, y_range, 2 * step))
    return dedup_points(points)


def _agree(first: Sequence[ReducedPoint], second: Sequence[ReducedPoint]) -> bool:
    if len(first) != len(second):
        return False
    return all(any(p.distance(q) <= AGREEMENT_DISTANCE for q in second) for p in first)


class SolutionEnumerator:
    """Solves one reduced case at one activity and lifts the result to boundary laws."""

    def __init__(self, params: ModelParams, invariant_set: InvariantSet, oracle_resolution: Optional[int] = None):
        self.params = params
        self.invariant_set = InvariantSet(invariant_set)
        self.reduction = get_reduction(self.invariant_set, params.k, params.i)
        self.oracle_resolution = oracle_resolution or ORACLE_RESOLUTION

    def solver_points(self) -> List[ReducedPoint]:
        lam = self.params.lam
        domain = self.reduction.domain(lam)
        if self.reduction.DIAGONAL_ONLY:
            phi = restrict(_partner(self.reduction, lam), domain)
            roots = bracketed_roots(lambda x: phi(x) - x, domain[0], domain[1]).roots
            return [ReducedPoint(x=r, y=r) for r in roots]
        return solve_symmetric_system(_partner(self.reduction, lam), domain, check_monotone=False)

    def oracle_points(self, resolution: Optional[int] = None) -> List[ReducedPoint]:
        return grid_oracle(self.reduction, self.params.lam, resolution or self.oracle_resolution)

    def _solution(self, point: ReducedPoint, tangent: bool) -> Optional[Solution]:
        lam = self.params.lam
        try:
            law = self.reduction.lift(point, lam)
            err = residual(law, self.params).max_norm
        except (DomainError, NumericRangeError, ValueError) as e:
            logger.warning(f"Dropped candidate {point}: {str(e)}")
            return None
        if err >= ACCEPT_RESIDUAL:
            logger.warning(f"Dropped candidate {point}: residual {err:.3g}")
            return None
        solution_class = classify(law)
        return Solution(
            law=law,
            reduced=point,
            solution_class=solution_class,
            residual=err,
            tangent=tangent and solution_class == SolutionClass.TI,
        )

    def run(self) -> SolutionSet:
        lam = self.params.lam
        solver = self.solver_points()
        oracle = self.oracle_points()
        agrees = _agree(solver, oracle)
        if not agrees:
            logger.warning(
                f"Solver and oracle disagree for {self.reduction!r} at lambda={lam}: "
                f"{len(solver)} vs {len(oracle)} points"
            )

        tangent = False
        if not self.reduction.DIAGONAL_ONLY:
            tangent = is_tangent(self.reduction, lam)
            if tangent:
                logger.warning(f"Tangency at lambda={lam} for {self.reduction!r}: the diagonal solution is a double solution")

        solutions = []
        for point in dedup_points(list(solver) + list(oracle)):
            solution = self._solution(point, tangent)
            if solution is not None:
                solutions.append(solution)

        wp = [s.reduced for s in solutions if s.solution_class == SolutionClass.WP]
        for p in wp:
            if not any(p.swapped().distance(q) <= AGREEMENT_DISTANCE for q in wp):
                logger.warning(f"Swap partner of {p} missing at lambda={lam}")

        result = SolutionSet(
            params=self.params,
            invariant_set=self.invariant_set,
            solutions=solutions,
            solver_count=len(solver),
            oracle_count=len(oracle),
            oracle_agrees=agrees,
        )
        logger.info(
            f"{self.reduction.map_id} lambda={lam}: {len(solutions)} solutions "
            f"({result.n_ti} TI, {result.n_wp} WP)"
        )
        return result


def enumerate_solutions(
    params: ModelParams,
    invariant_set: InvariantSet,
    oracle_resolution: Optional[int] = None,
) -> SolutionSet:
    return SolutionEnumerator(params, invariant_set, oracle_resolution).run()


def bifurcation_row(solution_set: SolutionSet) -> BifurcationRow:
    return BifurcationRow(
        lam=solution_set.params.lam,
        n_total=len(solution_set.solutions),
        n_ti=solution_set.n_ti,
        n_wp=solution_set.n_wp,
        tangent=solution_set.tangent,
        coordinates=[s.reduced for s in solution_set.solutions],
    )


def count_vs_lambda(
    params_template: ModelParams,
    invariant_set: InvariantSet,
    lambdas: Iterable[float],
    oracle_resolution: Optional[int] = None,
) -> List[BifurcationRow]:
    """One bifurcation row per activity, in input order."""
    lambdas = list(lambdas)
    if any(not lam > 0 for lam in lambdas):
        raise DomainError(f"All activities must be positive, got {lambdas}")
    # fail fast on an unsupported case before starting workers
    get_reduction(invariant_set, params_template.k, params_template.i)

    def row(lam: float) -> BifurcationRow:
        params = params_template.with_lambda(lam)
        return bifurcation_row(enumerate_solutions(params, invariant_set, oracle_resolution))

    with ThreadPoolExecutor(max_workers=settings.HC_THREADS) as pool:
        return list(pool.map(row, lambdas))
