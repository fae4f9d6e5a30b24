"""Positive weights on the grid and their Muckenhoupt-style ball products.

A weight carries cell-center values plus per-cell masses (exact closed-form
integrals for the power family |x|^beta, midpoint masses otherwise), so that
weighted ball measures stay finite and honest even when the pointwise values
blow up at the origin.  On top of that sit the two-factor ball products that
detect membership in the classical weight classes, their suprema over ball
families, a nested-ball doubling check, and a divergence detector used to
mark out-of-class configurations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import (
    Ball,
    BallFamily,
    BallMassEvaluator,
    Domain,
    SampledFunction,
    ball_volume,
    overlap_measures,
)

__all__ = [
    "Weight",
    "ConstantEstimate",
    "constant_weight",
    "power_weight",
    "weight_from_samples",
    "weight_power",
    "scale_weight",
    "weighted_measure",
    "ap_product",
    "apq_product",
    "ap_constant",
    "apq_constant",
    "doubling_check",
    "detect_divergence",
    "power_weight_in_class",
]


@dataclass(frozen=True, eq=False)
class Weight:
    """Strictly positive weight with per-cell masses.

    ``power_exponent`` tags members of the |x|^beta family; derived powers of
    tagged weights recompute exact masses from the tag instead of raising the
    sampled values, so singular-cell integrals stay closed-form.
    """

    fn: SampledFunction
    cell_masses: np.ndarray
    power_exponent: float | None = None

    def __post_init__(self) -> None:
        vals = self.fn.values
        if not np.all(vals > 0):
            raise ValueError("weight values must be strictly positive")
        masses = np.array(self.cell_masses, dtype=float)
        if masses.shape != vals.shape:
            raise ValueError("cell_masses shape must match the value grid")
        if not (np.all(np.isfinite(masses)) and np.all(masses > 0)):
            raise ValueError("cell masses must be finite and positive")
        masses.flags.writeable = False
        object.__setattr__(self, "cell_masses", masses)

    @property
    def domain(self) -> Domain:
        return self.fn.domain

    @property
    def values(self) -> np.ndarray:
        return self.fn.values


def constant_weight(domain: Domain, value: float = 1.0) -> Weight:
    if not value > 0:
        raise ValueError(f"constant weight must be positive, got {value}")
    n = domain.points_per_axis
    shape = (n,) if domain.dimension == 1 else (n, n)
    vals = np.full(shape, float(value))
    fn = SampledFunction(domain, vals, form=f"constant:{value}")
    return Weight(fn, vals * domain.cell_volume, power_exponent=0.0 if value == 1.0 else None)


def _power_values(domain: Domain, gamma: float) -> np.ndarray:
    mesh = domain.center_mesh()
    if domain.dimension == 1:
        r = np.abs(mesh[0])
    else:
        r = np.hypot(mesh[0], mesh[1])
    return r**gamma


def _power_cell_masses_1d(domain: Domain, gamma: float) -> np.ndarray:
    edges = domain.axis_edges()
    e0, e1 = edges[:-1], edges[1:]
    # N is even, so the origin is a shared edge and no cell straddles it
    lo = np.minimum(np.abs(e0), np.abs(e1))
    hi = np.maximum(np.abs(e0), np.abs(e1))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if gamma == -1.0:
            mass = np.log(hi / lo)
        else:
            g1 = gamma + 1.0
            mass = (hi**g1 - lo**g1) / g1
    # non-integrable cells at the origin: regularize with the center value
    centers = domain.axis_centers()
    fallback = np.abs(centers) ** gamma * domain.cell_size
    return np.where(np.isfinite(mass) & (mass > 0), mass, fallback)


def _origin_cell_mass_2d(h: float, gamma: float) -> float:
    # exact mass of [0,h]^2 under |x|^gamma via adaptive quadrature
    from scipy.integrate import dblquad

    val, _ = dblquad(
        lambda y, x: (x * x + y * y) ** (gamma / 2.0),
        0.0,
        h,
        0.0,
        h,
        epsabs=1e-13,
        epsrel=1e-11,
    )
    return float(val)


def _power_cell_masses_2d(domain: Domain, gamma: float) -> np.ndarray:
    vals = _power_values(domain, gamma)
    masses = vals * domain.cell_volume
    m = domain.points_per_axis // 2
    if gamma > -2.0 + 1e-9:
        # the four cells meeting the origin share one exact mass by symmetry
        corner = _origin_cell_mass_2d(domain.cell_size, gamma)
        for i, j in ((m - 1, m - 1), (m - 1, m), (m, m - 1), (m, m)):
            masses[i, j] = corner
    return masses


def _power_weight_unchecked(domain: Domain, gamma: float) -> Weight:
    vals = _power_values(domain, gamma)
    fn = SampledFunction(domain, vals, form=f"power:{gamma}")
    if domain.dimension == 1:
        masses = _power_cell_masses_1d(domain, gamma)
    else:
        masses = _power_cell_masses_2d(domain, gamma)
    return Weight(fn, masses, power_exponent=gamma)


def power_weight(beta: float, domain: Domain) -> Weight:
    """The weight |x|^beta with exact singular-cell masses.

    Requires beta > -dimension so the weight is locally integrable.
    """
    if not beta > -domain.dimension:
        raise ValueError(
            f"|x|^beta is not locally integrable for beta = {beta} in "
            f"dimension {domain.dimension}"
        )
    return _power_weight_unchecked(domain, float(beta))


def weight_from_samples(fn: SampledFunction) -> Weight:
    """Wrap strictly positive samples as a weight with midpoint cell masses."""
    return Weight(fn, fn.values * fn.domain.cell_volume)


def weight_power(w: Weight, s: float) -> Weight:
    """The weight w^s.

    For tagged power weights the result is rebuilt from the combined exponent
    so its singular-cell masses stay exact (or regularized when the power is
    no longer integrable); untagged weights raise values pointwise.
    """
    if s == 1.0:
        return w
    if w.power_exponent is not None:
        return _power_weight_unchecked(w.domain, w.power_exponent * s)
    vals = w.values**s
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"weight power {s} overflowed")
    fn = SampledFunction(w.domain, vals)
    return Weight(fn, vals * w.domain.cell_volume)


def scale_weight(w: Weight, c: float) -> Weight:
    if not c > 0:
        raise ValueError(f"scale must be positive, got {c}")
    fn = SampledFunction(w.domain, w.values * c, form=w.fn.form)
    tag = w.power_exponent if c == 1.0 else None
    return Weight(fn, w.cell_masses * c, power_exponent=tag)


def weighted_measure(w: Weight, ball: Ball) -> float:
    """w(B): the ball total of the weight's cell masses."""
    d = w.domain
    if not d.contains_ball(ball.center, ball.radius):
        raise ValueError(
            f"ball B({ball.center}, {ball.radius}) is not contained in the box"
        )
    return BallMassEvaluator(d, w.cell_masses).mass(ball)


@dataclass(frozen=True)
class ConstantEstimate:
    """A supremum over a sample family with the witness that attains it."""

    value: float
    witness: Ball | None
    samples: int
    metadata: dict = field(default_factory=dict)


def _window_quantities(domain: Domain, ball: Ball):
    window, ov = overlap_measures(domain, ball)
    lebesgue = float(np.sum(ov))
    frac = ov / domain.cell_volume
    return window, frac, lebesgue


def _avg(masses: np.ndarray, window, frac: np.ndarray, lebesgue: float) -> float:
    return float(np.sum(masses[window] * frac)) / lebesgue


def _sup_reciprocal(values: np.ndarray, window, frac: np.ndarray) -> float:
    vals = values[window][frac > 0]
    return float(np.max(1.0 / vals))


def ap_product(w: Weight, p: float, ball: Ball, _dual: Weight | None = None) -> float:
    """Two-factor ball product for the p-th weight class.

    For p > 1: (avg_B w) * (avg_B w^{-1/(p-1)})^{p-1}; for p = 1 the second
    factor degenerates to the essential sup of 1/w over cells meeting B.
    Averages use the quadrature measure of B so the product is >= 1 to
    rounding for every weight.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    d = w.domain
    if not d.contains_ball(ball.center, ball.radius):
        raise ValueError(f"ball B({ball.center}, {ball.radius}) is not contained in the box")
    window, frac, leb = _window_quantities(d, ball)
    a1 = _avg(w.cell_masses, window, frac, leb)
    if p == 1:
        return a1 * _sup_reciprocal(w.values, window, frac)
    sigma = _dual if _dual is not None else weight_power(w, -1.0 / (p - 1.0))
    a2 = _avg(sigma.cell_masses, window, frac, leb)
    return a1 * a2 ** (p - 1.0)


def apq_product(
    w: Weight,
    p: float,
    q: float,
    ball: Ball,
    _wq: Weight | None = None,
    _dual: Weight | None = None,
) -> float:
    """Two-factor ball product for the off-diagonal (p, q) weight class.

    (avg_B w^q)^{1/q} * (avg_B w^{-p'})^{1/p'} for p > 1, with the second
    factor replaced by ess-sup of 1/w when p = 1.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if not q > p:
        raise ValueError(f"need q > p, got p={p}, q={q}")
    d = w.domain
    if not d.contains_ball(ball.center, ball.radius):
        raise ValueError(f"ball B({ball.center}, {ball.radius}) is not contained in the box")
    window, frac, leb = _window_quantities(d, ball)
    wq = _wq if _wq is not None else weight_power(w, q)
    a1 = _avg(wq.cell_masses, window, frac, leb) ** (1.0 / q)
    if p == 1:
        return a1 * _sup_reciprocal(w.values, window, frac)
    p_dual = p / (p - 1.0)
    sigma = _dual if _dual is not None else weight_power(w, -p_dual)
    a2 = _avg(sigma.cell_masses, window, frac, leb) ** (1.0 / p_dual)
    return a1 * a2


def _sup_over_family(products, family: BallFamily, metadata: dict) -> ConstantEstimate:
    best = -math.inf
    witness = None
    for ball, val in zip(family.balls, products):
        if val > best:
            best, witness = val, ball
    return ConstantEstimate(
        value=best, witness=witness, samples=len(family), metadata=metadata
    )


def ap_constant(w: Weight, p: float, family: BallFamily) -> ConstantEstimate:
    """Supremum of ap_product over the family, with its witness ball."""
    dual = weight_power(w, -1.0 / (p - 1.0)) if p > 1 else None
    products = [ap_product(w, p, b, _dual=dual) for b in family]
    meta = {
        "grid_points": w.domain.points_per_axis,
        "family_size": len(family),
        "p": p,
    }
    return _sup_over_family(products, family, meta)


def apq_constant(w: Weight, p: float, q: float, family: BallFamily) -> ConstantEstimate:
    """Supremum of apq_product over the family, with its witness ball."""
    wq = weight_power(w, q)
    dual = weight_power(w, -p / (p - 1.0)) if p > 1 else None
    products = [apq_product(w, p, q, b, _wq=wq, _dual=dual) for b in family]
    meta = {
        "grid_points": w.domain.points_per_axis,
        "family_size": len(family),
        "p": p,
        "q": q,
    }
    return _sup_over_family(products, family, meta)


def doubling_check(w: Weight, p: float, outer: Ball, inner: Ball) -> float:
    """Ratio [w(B)/w(E)] / (|B|/|E|)^p for a sub-ball E of B.

    A finite-family certificate for the doubling growth bound; the Lebesgue
    measures are analytic, the weighted ones quadrature.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    dist = math.dist(outer.center, inner.center)
    if dist + inner.radius > outer.radius * (1.0 + 1e-12):
        raise ValueError(
            f"B({inner.center}, {inner.radius}) is not contained in "
            f"B({outer.center}, {outer.radius})"
        )
    d = w.domain
    ratio_w = weighted_measure(w, outer) / weighted_measure(w, inner)
    ratio_leb = ball_volume(d.dimension, outer.radius) / ball_volume(
        d.dimension, inner.radius
    )
    return ratio_w / ratio_leb**p


def detect_divergence(values, factor: float = 2.0) -> bool:
    """True when a refinement sequence is monotone and grows >= factor per step.

    Needs at least three levels; anything shorter is never called diverging.
    """
    vals = [float(v) for v in values]
    if len(vals) < 3:
        return False
    for lo, hi in zip(vals[:-1], vals[1:]):
        if not hi > lo or hi < factor * lo:
            return False
    return True


def power_weight_in_class(beta: float, p: float, dimension: int) -> bool:
    """Textbook membership test for |x|^beta in the p-th weight class."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if p == 1:
        return -dimension < beta <= 0
    return -dimension < beta < dimension * (p - 1.0)
