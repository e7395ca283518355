"""
Constructions Module

The two tiling constructions built on the tiling calculus:

- homothety normalization: turn a tiling with a similar tile L = f_L(K) into
  a tiling of K with a homothetic tile fixed at the same point x_L
- fixed-point relocation: combine tilings with homothetic tiles until some
  homothetic tile is fixed at a requested point

Both are planned first (cheap numeric search) and then materialized.
"""

import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel
from scipy.optimize import linprog
from tenacity import retry, retry_if_exception_type, stop_after_attempt

from simtile.errors import (
    EmptyIntersection,
    EpsNotFound,
    InteriorFixedPointWarning,
    NotFoundWithinBudget,
    PreconditionError,
    StepBudgetExceeded,
    TargetOutsideHull,
)
from simtile.geometry.bodies import Location, bodies_equal, bounding_radius_about, membership
from simtile.geometry.core import Similarity, as_vector, fixed_point, power_near_identity
from simtile.geometry.sampling import PROBE_STREAM, ball_points, stream
from simtile.geometry.tilings import Tile, Tiling, iterate_tiling, meet_pieces, transform_tiling

logger = structlog.get_logger(__name__)

DEFAULT_EPS_MAX = 0.25
DEFAULT_PROBES = 256
EPS_SAFETY = 0.9
MAX_HALVINGS = 40
BISECTION_STEPS = 20
MAX_ITERATIONS = 10_000

# Rotation-period search budget and its growth per retry
ROTATION_K_MAX = 1000
ROTATION_ATTEMPTS = 4

DEFAULT_MAX_STEPS = 60
COLLINEAR_TOLERANCE = 1e-9


class NormalizationPlan(BaseModel):
    """Parameters chosen by the homothety normalization."""

    tile: int
    fixed_point: List[float]
    location: str
    eps: float
    radius: float
    stretch: float
    iterations: int
    ratio: float


def _locally_dominated(
    t: Tiling, tile_index: int, center: np.ndarray, radius: float, probes: int, seed: int, attempt: int
) -> bool:
    """All probes of B(center, radius) that lie in K also lie in the tile."""
    points = ball_points(stream(seed, PROBE_STREAM, attempt), center, radius, probes)
    points = np.vstack([center, points])
    in_ambient = t.ambient.contains(points)
    return bool(np.all(t.tiles[tile_index].body.contains(points[in_ambient])))


def find_eps(
    t: Tiling,
    tile_index: int,
    eps_max: float = DEFAULT_EPS_MAX,
    probes: int = DEFAULT_PROBES,
    seed: int = 0,
) -> float:
    """
    Largest probed radius eps with B_eps(x_L) ∩ K inside L

    Halves eps_max until the probes pass, then bisects between the last
    failing and the first passing radius.

    Raises:
        EpsNotFound: if no radius down to eps_max / 2**40 passes
    """
    center = fixed_point(t.tag(tile_index))
    attempt = 0

    def passes(radius: float) -> bool:
        nonlocal attempt
        attempt += 1
        return _locally_dominated(t, tile_index, center, radius, probes, seed, attempt)

    good = eps_max
    bad = None
    for _ in range(MAX_HALVINGS):
        if passes(good):
            break
        bad, good = good, good / 2.0
    else:
        raise EpsNotFound(f"tile {tile_index} does not dominate any ball around its fixed point down to {good:.3e}")
    if bad is not None:
        for _ in range(BISECTION_STEPS):
            mid = (good + bad) / 2.0
            if passes(mid):
                good = mid
            else:
                bad = mid
    return good


@retry(retry=retry_if_exception_type(NotFoundWithinBudget), stop=stop_after_attempt(ROTATION_ATTEMPTS), reraise=True)
def _rotation_period(rotation: np.ndarray, delta: float, budget: List[int]) -> int:
    """power_near_identity with a budget that grows tenfold per attempt."""
    k_max = budget[0]
    budget[0] *= 10
    return power_near_identity(rotation, delta, k_max)


def plan_normalization(
    t: Tiling,
    tile_index: int,
    eps_max: float = DEFAULT_EPS_MAX,
    probes: int = DEFAULT_PROBES,
    seed: int = 0,
    align_rotation: Optional[float] = None,
) -> NormalizationPlan:
    """
    Choose eps, R, t and d for the homothety normalization

    Args:
        t: The tiling
        tile_index: Index of a tile tagged with f_L, ratio < 1
        eps_max: Largest radius probed
        probes: Probe points per radius
        seed: Probe stream seed
        align_rotation: If set, round d up to a multiple of the smallest k
            with ||M_L^k - I||_max below this value

    Returns:
        NormalizationPlan
    """
    f = t.tag(tile_index)
    if f.scale >= 1.0:
        raise PreconditionError(f"similarity ratio {f.scale} is not < 1")
    if eps_max <= 0 or probes < 1:
        raise PreconditionError("eps_max must be positive and probes at least 1")
    center = fixed_point(f)
    location = membership(t.ambient, center)
    if location == Location.OUTSIDE:
        raise PreconditionError("fixed point of the tile lies outside the ambient body")
    if location == Location.INSIDE:
        logger.warning("interior_fixed_point", tile=tile_index, fixed_point=center.tolist())
        warnings.warn(
            "fixed point lies in the interior of the ambient body; the ambient body is a polytope",
            InteriorFixedPointWarning,
            stacklevel=3,
        )

    eps = EPS_SAFETY * find_eps(t, tile_index, eps_max, probes, seed)
    radius = bounding_radius_about(t.ambient, center)
    stretch = radius / eps
    ratio = f.scale
    iterations = 1
    while not (ratio**iterations < eps and stretch * ratio**iterations < 1.0):
        iterations += 1
        if iterations > MAX_ITERATIONS:
            raise PreconditionError("iteration depth exceeds the supported maximum")
    if align_rotation is not None and not f.is_homothety:
        period = _rotation_period(f.rotation, align_rotation, [ROTATION_K_MAX])
        iterations = -(-iterations // period) * period
    plan = NormalizationPlan(
        tile=tile_index,
        fixed_point=center.tolist(),
        location=str(location),
        eps=eps,
        radius=radius,
        stretch=stretch,
        iterations=iterations,
        ratio=stretch * ratio**iterations,
    )
    logger.info("normalization_plan", **plan.model_dump())
    return plan


def iterate_chain(t: Tiling, tile_index: int, iterations: int) -> Tuple[Tiling, int]:
    """
    Iterate along the tagged chain until f_L^iterations(K) is a tile

    Returns:
        (tiling, index of the tile tagged with f_L^iterations)
    """
    current, index = t, tile_index
    for _ in range(iterations - 1):
        current = iterate_tiling(current, index, pattern=t)
        index += tile_index
    return current, index


def normalize_to_homothety(
    t: Tiling,
    tile_index: int,
    eps_max: float = DEFAULT_EPS_MAX,
    probes: int = DEFAULT_PROBES,
    seed: int = 0,
    align_rotation: Optional[float] = None,
    plan: Optional[NormalizationPlan] = None,
) -> Tiling:
    """
    Tiling of K with a homothetic copy of K fixed at x_L

    Iterates d times to get f_L^d(K) as a tile, maps the whole tiling by
    G(x) = x_L + s M_L^-d (x - x_L) with s = R / eps and meets the result
    with {K}. G o f_L^d is the homothety of ratio s * lambda^d about x_L,
    which becomes the only tagged tile.

    Args:
        t: The tiling
        tile_index: Index of a tile tagged with f_L
        eps_max: Largest radius probed for local domination
        probes: Probe points per radius
        seed: Probe stream seed
        align_rotation: Optional tolerance for aligning M_L^d with I
        plan: Precomputed plan (from plan_normalization)

    Returns:
        Tiling of K whose single tagged tile is a homothety with ratio < 1

    Raises:
        EpsNotFound: if the tile does not dominate a ball around x_L
    """
    plan = plan or plan_normalization(t, tile_index, eps_max, probes, seed, align_rotation)
    chain, index = iterate_chain(t, tile_index, plan.iterations)
    deep = chain.tag(index)
    center = np.array(plan.fixed_point)
    g = Similarity.about(plan.stretch, deep.rotation.T, center)
    transformed = transform_tiling(g, chain)
    trivial = Tiling(t.ambient, [Tile(t.ambient)])
    homothety = Similarity.homothety(plan.ratio, center)
    tiles = []
    for i, _, piece in meet_pieces(transformed, trivial, seed=seed):
        tiles.append(Tile.similar(homothety, t.ambient) if i == index else piece)
    if not any(tile.tagged for tile in tiles):
        raise EmptyIntersection("the homothetic tile vanished in the meet with the ambient body")
    logger.info("normalize_to_homothety", tiles=len(tiles), ratio=plan.ratio, iterations=plan.iterations)
    return Tiling(t.ambient, tiles)


@dataclass(frozen=True, eq=False)
class Candidate:
    """A homothetic tile available to the relocation search, built lazily."""

    ratio: float
    point: np.ndarray
    anchor: Optional[int] = None
    left: Optional["Candidate"] = None
    right: Optional["Candidate"] = None

    @property
    def depth(self) -> int:
        if self.anchor is not None:
            return 0
        return 1 + max(self.left.depth, self.right.depth)

    def materialize(self, anchors: Sequence[Tuple[Tiling, int]]) -> Tuple[Tiling, int]:
        """Build the tiling T_left + f_left(T_right) and the index of the composed tile."""
        if self.anchor is not None:
            return anchors[self.anchor]
        left, left_index = self.left.materialize(anchors)
        right, right_index = self.right.materialize(anchors)
        return iterate_tiling(left, left_index, pattern=right), left_index + right_index


@dataclass(frozen=True, eq=False)
class MovePlan:
    """Outcome of the relocation search."""

    candidate: Candidate
    steps: int
    distance: float
    correction_anchor: Optional[int] = None
    correction_scale: Optional[float] = None

    def summary(self) -> dict:
        return {
            "steps": self.steps,
            "distance": self.distance,
            "corrected": self.correction_anchor is not None,
            "ratio": self.candidate.ratio,
            "fixed_point": self.candidate.point.tolist(),
        }


def composed_fixed_point(ratio_a: float, point_a: np.ndarray, ratio_b: float, point_b: np.ndarray) -> np.ndarray:
    """Fixed point of h_a o h_b for homotheties h_a, h_b (ratios in (0, 1))."""
    return ((1.0 - ratio_a) * point_a + ratio_a * (1.0 - ratio_b) * point_b) / (1.0 - ratio_a * ratio_b)


def hull_distance(points: np.ndarray, target: np.ndarray) -> float:
    """Max-norm distance from target to the convex hull of points (one LP)."""
    k, n = points.shape
    # variables: weights w_1..w_k, slack s
    cost = np.zeros(k + 1)
    cost[-1] = 1.0
    ones = np.ones((n, 1))
    A_ub = np.vstack([np.hstack([points.T, -ones]), np.hstack([-points.T, -ones])])
    b_ub = np.concatenate([target, -target])
    A_eq = np.concatenate([np.ones(k), [0.0]]).reshape(1, -1)
    result = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=[(0, None)] * (k + 1), method="highs")
    return float(result.fun)


def _anchors(tilings: Sequence[Tiling]) -> List[Tuple[Tiling, int]]:
    if not tilings:
        raise PreconditionError("fixed-point relocation needs at least one tiling")
    ambient = tilings[0].ambient
    anchors = []
    for number, t in enumerate(tilings):
        if not bodies_equal(t.ambient, ambient):
            raise PreconditionError(f"tiling {number} tiles a different ambient body")
        index = t.first_tagged()
        if not t.tag(index).is_homothety:
            raise PreconditionError(f"tiling {number}: tagged tile is not homothetic; normalize it first")
        anchors.append((t, index))
    return anchors


def _correction(anchor_points: np.ndarray, candidate: Candidate, target: np.ndarray) -> Optional[Tuple[int, float]]:
    """Anchor a and scale mu >= 1 with the candidate on the segment (p_a, target]."""
    for a, p in enumerate(anchor_points):
        towards = target - p
        reach = float(np.linalg.norm(towards))
        offset = candidate.point - p
        along = float(np.linalg.norm(offset))
        if reach == 0.0 or along <= COLLINEAR_TOLERANCE or along > reach:
            continue
        if np.linalg.norm(offset - (offset @ towards) / reach**2 * towards) > COLLINEAR_TOLERANCE * max(1.0, reach):
            continue
        if offset @ towards <= 0:
            continue
        mu = reach / (along + candidate.ratio * (reach - along))
        return a, mu
    return None


def plan_fixed_point_move(
    tilings: Sequence[Tiling], target, eps: float, max_steps: int = DEFAULT_MAX_STEPS
) -> MovePlan:
    """
    Search for a composition whose homothetic tile is fixed at the target

    Each step composes an anchor with a pooled candidate (in either order)
    and keeps the pair whose composed fixed point is nearest the target. As
    soon as a candidate lies on the segment from an anchor to the target,
    the expanding homothety about that anchor finishes the move exactly.

    Args:
        tilings: Tilings with homothety-tagged tiles over one ambient body
        target: Requested fixed point
        eps: Accepted distance
        max_steps: Composition budget

    Returns:
        MovePlan

    Raises:
        TargetOutsideHull: if the target is farther than eps from the anchor hull
        StepBudgetExceeded: if the budget runs out
    """
    anchors = _anchors(tilings)
    target = as_vector(target, anchors[0][0].dim)
    anchor_ratios = np.array([t.tag(i).scale for t, i in anchors])
    anchor_points = np.array([fixed_point(t.tag(i)) for t, i in anchors])
    if hull_distance(anchor_points, target) > eps:
        raise TargetOutsideHull(f"target {target.tolist()} lies outside the hull of the fixed points")

    pool = [Candidate(float(r), p, anchor=a) for a, (r, p) in enumerate(zip(anchor_ratios, anchor_points))]
    for steps in range(max_steps + 1):
        distances = [float(np.linalg.norm(c.point - target)) for c in pool]
        best = int(np.argmin(distances))
        if distances[best] <= eps:
            return MovePlan(pool[best], steps, distances[best])
        for candidate in sorted(pool, key=lambda c: float(np.linalg.norm(c.point - target))):
            correction = _correction(anchor_points, candidate, target)
            if correction is not None:
                return MovePlan(candidate, steps + 1, 0.0, correction[0], correction[1])
        if steps == max_steps:
            break
        pool.append(_best_composition(pool, anchor_ratios, anchor_points, target))
        logger.debug("move_step", step=steps + 1, distance=float(np.linalg.norm(pool[-1].point - target)))
    raise StepBudgetExceeded(f"target not reached within {max_steps} composition steps")


def _best_composition(
    pool: List[Candidate], anchor_ratios: np.ndarray, anchor_points: np.ndarray, target: np.ndarray
) -> Candidate:
    ratios = np.array([c.ratio for c in pool])
    points = np.array([c.point for c in pool])
    best = None
    for a, (ratio_a, point_a) in enumerate(zip(anchor_ratios, anchor_points)):
        outer = composed_fixed_point(ratio_a, point_a, ratios[:, None], points)
        inner = composed_fixed_point(ratios[:, None], points, ratio_a, point_a)
        for composed, anchor_first in ((outer, True), (inner, False)):
            distances = np.linalg.norm(composed - target, axis=1)
            # Compositions already pooled make no progress
            known = np.min(np.linalg.norm(composed[:, None, :] - points[None, :, :], axis=2), axis=1) <= 1e-12
            distances[known] = np.inf
            j = int(np.argmin(distances))
            if best is None or distances[j] < best[0]:
                best = (float(distances[j]), a, j, anchor_first, composed[j])
    if not np.isfinite(best[0]):
        raise StepBudgetExceeded("composition search stalled: every composition is already pooled")
    _, a, j, anchor_first, point = best
    anchor = pool[a]
    left, right = (anchor, pool[j]) if anchor_first else (pool[j], anchor)
    return Candidate(left.ratio * right.ratio, point, left=left, right=right)


def move_fixed_point(
    tilings: Sequence[Tiling],
    target,
    eps: float,
    max_steps: int = DEFAULT_MAX_STEPS,
    plan: Optional[MovePlan] = None,
) -> Tiling:
    """
    Tiling of K with a homothetic tile fixed within eps of the target

    Args:
        tilings: Tilings with homothety-tagged tiles over one ambient body
        target: Requested fixed point
        eps: Accepted distance
        max_steps: Composition budget
        plan: Precomputed plan (from plan_fixed_point_move)

    Returns:
        Tiling whose single tagged tile is a homothety of ratio in (0, 1)
    """
    plan = plan or plan_fixed_point_move(tilings, target, eps, max_steps)
    anchors = _anchors(tilings)
    tiling, index = plan.candidate.materialize(anchors)
    if plan.correction_anchor is None:
        return tiling.with_single_tag(index)

    target = as_vector(target, tiling.dim)
    center = fixed_point(anchors[plan.correction_anchor][0].tag(anchors[plan.correction_anchor][1]))
    expand = Similarity.homothety(plan.correction_scale, center)
    ambient = tiling.ambient
    trivial = Tiling(ambient, [Tile(ambient)])
    homothety = Similarity.homothety(plan.correction_scale * plan.candidate.ratio, target)
    tiles = []
    for i, _, piece in meet_pieces(transform_tiling(expand, tiling), trivial):
        tiles.append(Tile.similar(homothety, ambient) if i == index else piece)
    logger.info(
        "move_fixed_point",
        steps=plan.steps,
        scale=plan.correction_scale,
        ratio=homothety.scale,
        tiles=len(tiles),
    )
    return Tiling(ambient, tiles)


def fixed_point_error(t: Tiling, target) -> float:
    """Distance from the single tagged tile's fixed point to the target."""
    return float(np.linalg.norm(fixed_point(t.tag(t.first_tagged())) - as_vector(target, t.dim)))

