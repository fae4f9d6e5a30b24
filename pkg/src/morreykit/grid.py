"""Uniform grids on centered boxes, sampled functions, and ball quadrature.

Everything downstream consumes the primitives defined here: cell-centered
uniform grids on [-L, L]^n for n in {1, 2}, cellwise-constant sampled
functions, and overlap measures |cell ∩ B| used to integrate over balls.
In 1D the overlap of a cell with an interval is computed exactly; in 2D
interior and exterior cells are classified exactly through corner distances
and boundary cells get an area fraction from a 4x4 midpoint subsample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConfigurationError",
    "Domain",
    "SampledFunction",
    "Ball",
    "BallFamily",
    "make_domain",
    "sample",
    "ball_volume",
    "ball_family",
    "family_from_points",
    "overlap_measures",
    "ball_integral",
    "ball_mass",
    "CumulativeMass",
    "BallMassEvaluator",
    "geometric_ladder",
]

# relative slack for closed containment tests on ball placement
_CONTAINMENT_SLACK = 1e-9

# per-axis midpoint subsample count for 2D boundary cells
_SUBSAMPLE = 4


class ConfigurationError(ValueError):
    """An unsupported discretization or an empty geometric family."""


@dataclass(frozen=True)
class Domain:
    """Uniform cell-centered grid on the box [-half_width, half_width]^dimension.

    Cell centers sit at -L + (i + 1/2) h per axis with h = 2L/N.  N is kept
    even so the origin always falls on a cell edge (1D) or corner (2D); no
    cell center ever coincides with the origin.
    """

    dimension: int
    half_width: float
    points_per_axis: int

    @property
    def cell_size(self) -> float:
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def cell_volume(self) -> float:
        return self.cell_size**self.dimension

    @property
    def cell_count(self) -> int:
        return self.points_per_axis**self.dimension

    def axis_centers(self) -> np.ndarray:
        h = self.cell_size
        return -self.half_width + (np.arange(self.points_per_axis) + 0.5) * h

    def axis_edges(self) -> np.ndarray:
        h = self.cell_size
        return -self.half_width + np.arange(self.points_per_axis + 1) * h

    def center_mesh(self) -> tuple[np.ndarray, ...]:
        """Cell-center coordinate arrays, one per axis (meshgrid in 2D)."""
        c = self.axis_centers()
        if self.dimension == 1:
            return (c,)
        return tuple(np.meshgrid(c, c, indexing="ij"))

    def contains_ball(self, center: tuple[float, ...], radius: float) -> bool:
        slack = _CONTAINMENT_SLACK * max(1.0, self.half_width)
        return all(abs(c) + radius <= self.half_width + slack for c in center)

    def cell_index(self, point: tuple[float, ...]) -> tuple[int, ...]:
        """Index of the cell containing ``point`` (clamped to the box)."""
        h = self.cell_size
        n_max = self.points_per_axis - 1
        return tuple(
            int(min(n_max, max(0, math.floor((x + self.half_width) / h))))
            for x in point
        )


def make_domain(dimension: int, half_width: float, points_per_axis: int) -> Domain:
    if dimension not in (1, 2):
        raise ConfigurationError(f"dimension must be 1 or 2, got {dimension}")
    if not half_width > 0:
        raise ConfigurationError(f"half_width must be positive, got {half_width}")
    n = points_per_axis
    if n < 8 or n % 2 != 0:
        raise ConfigurationError(
            f"points_per_axis must be an even integer >= 8, got {n}"
        )
    return Domain(dimension, float(half_width), int(n))


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Cellwise-constant function: one value per grid cell.

    Values must be finite everywhere; the array is copied and frozen.  A
    ``form`` tag survives from the built-in catalog so that closed-form
    integrals remain recoverable where they exist.
    """

    domain: Domain
    values: np.ndarray
    form: str | None = None

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        n = self.domain.points_per_axis
        expect = (n,) if self.domain.dimension == 1 else (n, n)
        if vals.shape != expect:
            raise ValueError(f"values shape {vals.shape} != grid shape {expect}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("sampled values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)


def sample(expr, domain: Domain, form: str | None = None) -> SampledFunction:
    """Evaluate ``expr`` at every cell center.

    ``expr`` receives one coordinate array in 1D and two (meshgrid) arrays
    in 2D.  Non-finite values are rejected.
    """
    mesh = domain.center_mesh()
    vals = np.asarray(expr(*mesh), dtype=float)
    if vals.shape != mesh[0].shape:
        vals = np.broadcast_to(vals, mesh[0].shape).copy()
    if not np.all(np.isfinite(vals)):
        raise ValueError("expression produced non-finite values at cell centers")
    return SampledFunction(domain, vals, form=form)


@dataclass(frozen=True)
class Ball:
    """Closed ball B(center, radius); Euclidean in 2D, an interval in 1D."""

    center: tuple[float, ...]
    radius: float

    def __post_init__(self) -> None:
        center = tuple(float(c) for c in self.center)
        if len(center) not in (1, 2):
            raise ValueError(f"center must have 1 or 2 coordinates, got {center}")
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))


def ball_volume(dimension: int, radius: float) -> float:
    """Lebesgue measure of a ball: 2r in 1D, pi r^2 in 2D."""
    if dimension == 1:
        return 2.0 * radius
    return math.pi * radius * radius


@dataclass(frozen=True, eq=False)
class BallFamily:
    """Containment-filtered collection of balls over a center/radius lattice."""

    domain: Domain
    centers: tuple[tuple[float, ...], ...]
    radii: tuple[float, ...]
    balls: tuple[Ball, ...]
    dropped: int

    def __len__(self) -> int:
        return len(self.balls)

    def __iter__(self):
        return iter(self.balls)


def ball_family(
    domain: Domain,
    center_stride: int,
    r_min: float,
    rho: float,
    count: int,
) -> BallFamily:
    """Build the family over strided cell centers and a geometric radius ladder.

    Pairs whose ball pokes out of the box are dropped (and counted); an empty
    result is a configuration error.
    """
    if center_stride < 1 or int(center_stride) != center_stride:
        raise ConfigurationError(f"center_stride must be a positive integer, got {center_stride}")
    if r_min < domain.cell_size:
        raise ConfigurationError(
            f"r_min {r_min} is below the cell size {domain.cell_size}"
        )
    if not rho > 1:
        raise ConfigurationError(f"radius ratio rho must exceed 1, got {rho}")
    if count < 1:
        raise ConfigurationError(f"count must be >= 1, got {count}")
    axis = domain.axis_centers()[:: int(center_stride)]
    if domain.dimension == 1:
        centers = tuple((float(x),) for x in axis)
    else:
        centers = tuple((float(x), float(y)) for x in axis for y in axis)
    radii = tuple(float(r_min * rho**k) for k in range(count))
    return family_from_points(domain, centers, radii)


def family_from_points(
    domain: Domain,
    centers,
    radii,
) -> BallFamily:
    """Containment-filter an explicit center/radius lattice into a family."""
    centers = tuple(tuple(float(c) for c in ctr) for ctr in centers)
    radii = tuple(float(r) for r in radii)
    balls = []
    dropped = 0
    for ctr in centers:
        for r in radii:
            if domain.contains_ball(ctr, r):
                balls.append(Ball(ctr, r))
            else:
                dropped += 1
    if not balls:
        raise ConfigurationError(
            "ball family is empty after containment filtering; enlarge the box "
            "or shrink the radii"
        )
    return BallFamily(domain, centers, radii, tuple(balls), dropped)


def _axis_window(domain: Domain, lo: float, hi: float) -> tuple[int, int]:
    # one guard cell each side; overlap formulas are zero-safe outside the ball
    h = domain.cell_size
    L = domain.half_width
    i0 = int(math.floor((lo + L) / h)) - 1
    i1 = int(math.ceil((hi + L) / h)) + 1
    return max(0, i0), min(domain.points_per_axis, i1)


def overlap_measures(
    domain: Domain, ball: Ball
) -> tuple[tuple[slice, ...], np.ndarray]:
    """Per-cell measure of cell ∩ ball on a bounding window.

    Returns the window slices into the grid arrays and the matching array of
    overlap measures (lengths in 1D, areas in 2D).
    """
    h = domain.cell_size
    edges = domain.axis_edges()
    if domain.dimension == 1:
        (a,) = ball.center
        lo, hi = a - ball.radius, a + ball.radius
        i0, i1 = _axis_window(domain, lo, hi)
        left = edges[i0:i1]
        right = edges[i0 + 1 : i1 + 1]
        ov = np.clip(np.minimum(right, hi) - np.maximum(left, lo), 0.0, None)
        return (slice(i0, i1),), ov

    ax, ay = ball.center
    r = ball.radius
    i0, i1 = _axis_window(domain, ax - r, ax + r)
    j0, j1 = _axis_window(domain, ay - r, ay + r)
    cx = domain.axis_centers()[i0:i1]
    cy = domain.axis_centers()[j0:j1]
    half = 0.5 * h
    nx = np.clip(np.abs(ax - cx) - half, 0.0, None)
    ny = np.clip(np.abs(ay - cy) - half, 0.0, None)
    fx = np.abs(ax - cx) + half
    fy = np.abs(ay - cy) + half
    near2 = nx[:, None] ** 2 + ny[None, :] ** 2
    far2 = fx[:, None] ** 2 + fy[None, :] ** 2
    r2 = r * r
    ov = np.zeros(near2.shape)
    ov[far2 <= r2] = h * h
    boundary = (far2 > r2) & (near2 < r2)
    if np.any(boundary):
        bi, bj = np.nonzero(boundary)
        off = ((np.arange(_SUBSAMPLE) + 0.5) / _SUBSAMPLE - 0.5) * h
        px = cx[bi][:, None, None] + off[None, :, None]
        py = cy[bj][:, None, None] + off[None, None, :]
        inside = (px - ax) ** 2 + (py - ay) ** 2 <= r2
        frac = inside.mean(axis=(1, 2))
        ov[bi, bj] = frac * h * h
    return (slice(i0, i1), slice(j0, j1)), ov


def ball_integral(f: SampledFunction, ball: Ball) -> float:
    """Integral of a cellwise-constant function over a ball in the box.

    Balls not contained in the box are rejected outright so truncation can
    never happen silently.
    """
    d = f.domain
    if not d.contains_ball(ball.center, ball.radius):
        raise ValueError(
            f"ball B({ball.center}, {ball.radius}) is not contained in the box "
            f"[-{d.half_width}, {d.half_width}]^{d.dimension}"
        )
    window, ov = overlap_measures(d, ball)
    return float(np.sum(f.values[window] * ov))


def ball_mass(domain: Domain, cell_masses: np.ndarray, ball: Ball) -> float:
    """Ball total of per-cell masses, allocated proportionally to overlap.

    A cell's mass is spread uniformly over the cell, so a partial overlap
    contributes mass * (overlap / cell volume); a full overlap contributes
    the exact cell mass.
    """
    window, ov = overlap_measures(domain, ball)
    return float(np.sum(cell_masses[window] * (ov / domain.cell_volume)))


class CumulativeMass:
    """Piecewise-linear cumulative mass of per-cell masses on a 1D grid.

    Interval totals become two interpolations on the edge-anchored cumsum,
    which matches the proportional-allocation rule of ``ball_mass`` exactly
    and costs O(log N) per query instead of O(N).
    """

    def __init__(self, domain: Domain, cell_masses: np.ndarray) -> None:
        if domain.dimension != 1:
            raise ValueError("CumulativeMass is 1D only")
        self.domain = domain
        self.edges = domain.axis_edges()
        self.cum = np.concatenate(([0.0], np.cumsum(cell_masses)))

    def interval(self, lo, hi):
        """Mass of [lo, hi] (arrays allowed); clamped to the box."""
        return np.interp(hi, self.edges, self.cum) - np.interp(
            lo, self.edges, self.cum
        )


class BallMassEvaluator:
    """Repeated ball-mass queries against one fixed array of cell masses.

    1D queries go through the cumulative-mass fast path; 2D queries fall back
    to per-ball overlap windows.  Both agree with ``ball_mass`` to rounding.
    """

    def __init__(self, domain: Domain, cell_masses: np.ndarray) -> None:
        self.domain = domain
        self.cell_masses = np.asarray(cell_masses, dtype=float)
        self._cum = CumulativeMass(domain, self.cell_masses) if domain.dimension == 1 else None

    def mass(self, ball: Ball) -> float:
        if self._cum is not None:
            (a,) = ball.center
            return float(self._cum.interval(a - ball.radius, a + ball.radius))
        return ball_mass(self.domain, self.cell_masses, ball)

    def masses_at(self, center: tuple[float, ...], radii: np.ndarray) -> np.ndarray:
        """Vector of ball masses at one center over many radii."""
        radii = np.asarray(radii, dtype=float)
        if self._cum is not None:
            (a,) = center
            return np.asarray(self._cum.interval(a - radii, a + radii), dtype=float)
        return np.array(
            [ball_mass(self.domain, self.cell_masses, Ball(center, r)) for r in radii]
        )


def geometric_ladder(r_min: float, r_max: float, steps: int) -> np.ndarray:
    """Geometric radius ladder with ``steps`` rungs from r_min to r_max."""
    if not (r_min > 0 and r_max > r_min):
        raise ValueError(f"need 0 < r_min < r_max, got [{r_min}, {r_max}]")
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    return np.geomspace(r_min, r_max, steps)
