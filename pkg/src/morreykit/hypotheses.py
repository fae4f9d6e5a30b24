"""Finite-sample checkers for the sufficient conditions on shape-function pairs.

Each sufficient condition relates a pair (psi1, psi2) through a supremum or a
tail integral in the radius; the checkers here estimate the best constant over
a sample of (center, radius) pairs, report the witness attaining it, and are
explicit about truncation: adaptive quadrature runs to a finite horizon and
catalog shape functions contribute an analytic bound for the discarded tail,
so an estimate is flagged as certified only when that bound exists.  Two
auxiliary verifiers exercise the nondecreasing-numerator comparison and the
average-versus-norm bound that the main estimates lean on, and a third checks
the off-ball tail against its integral majorant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .grid import Ball, BallMassEvaluator, CumulativeMass, Domain, SampledFunction, overlap_measures
from .norms import PsiFunction, weighted_lp_norm
from .weights import Weight, weight_power

__all__ = [
    "ConditionEstimate",
    "condition_ladder",
    "log_grid",
    "sup_condition_constant",
    "integral_condition_constant",
    "weighted_integral_condition_constant",
    "MonotoneComparisonReport",
    "monotone_comparison_verify",
    "average_vs_norm_verify",
    "tail_bound_verify",
]


@dataclass(frozen=True)
class ConditionEstimate:
    """Best constant over the sampled pairs, with provenance.

    ``value`` is None when the condition has no finite constant to report
    (a divergent tail, or every sample skipped).  ``certified`` means the
    truncated part is covered by an analytic tail bound.
    """

    value: float | None
    witness: tuple | None
    samples: int
    skipped: int = 0
    diverging: bool = False
    certified: bool = True
    residual_bound: float | None = None
    truncation: dict = field(default_factory=dict)


def _normalize_samples(samples) -> list[tuple[tuple[float, ...], float]]:
    out = []
    for item in samples:
        if isinstance(item, Ball):
            out.append((item.center, item.radius))
        else:
            a, r = item
            center = tuple(float(c) for c in (a if isinstance(a, (tuple, list)) else (a,)))
            out.append((center, float(r)))
    if not out:
        raise ValueError("need at least one (center, radius) sample")
    return out


def log_grid(lo: float, hi: float, nodes_per_decade: int = 64) -> np.ndarray:
    """Geometric grid with at least nodes_per_decade points per decade."""
    if not (lo > 0 and hi > lo):
        raise ValueError(f"need 0 < lo < hi, got [{lo}, {hi}]")
    decades = math.log10(hi / lo)
    count = max(8, int(math.ceil(nodes_per_decade * decades)) + 1)
    return np.geomspace(lo, hi, count)


def condition_ladder(
    psi1: PsiFunction,
    psi2: PsiFunction,
    lo: float,
    hi: float,
    nodes_per_decade: int = 64,
) -> np.ndarray:
    """Radius ladder for sup-type checks: geometric plus declared structure
    points of both shape functions, so spikes are never skipped over."""
    base = log_grid(lo, hi, nodes_per_decade)
    extra = [psi1.special_points(lo, hi), psi2.special_points(lo, hi)]
    ladder = np.unique(np.concatenate([base, *extra]))
    return ladder[(ladder >= lo) & (ladder <= hi)]


def sup_condition_constant(
    psi1: PsiFunction, psi2: PsiFunction, samples, t_ladder
) -> ConditionEstimate:
    """Best constant for sup_{t > r} psi1(a, t) <= C psi2(a, r) on the ladder.

    Samples with no ladder point beyond their radius are skipped and counted.
    """
    pairs = _normalize_samples(samples)
    ladder = np.asarray(t_ladder, dtype=float)
    if ladder.ndim != 1 or ladder.size == 0:
        raise ValueError("t_ladder must be a non-empty 1D array")
    best = None
    witness = None
    skipped = 0
    for a, r in pairs:
        ts = ladder[ladder > r]
        if ts.size == 0:
            skipped += 1
            continue
        num = float(np.max(psi1(a, ts)))
        den = float(np.asarray(psi2(a, r)))
        if not den > 0:
            raise ValueError(f"psi2 must be positive at (a={a}, r={r}), got {den}")
        cand = num / den
        if best is None or cand > best:
            best, witness = cand, (a, r)
    return ConditionEstimate(
        value=best,
        witness=witness,
        samples=len(pairs),
        skipped=skipped,
        certified=True,
        truncation={"t_max": float(np.max(ladder))},
    )


def integral_condition_constant(
    psi1: PsiFunction,
    psi2: PsiFunction,
    samples,
    t_max: float = 50.0,
) -> ConditionEstimate:
    """Best constant for int_r^inf psi1(a, t) dt/t <= C psi2(a, r).

    The integral runs adaptively to t_max; a catalog tail bound certifies the
    remainder.  A shape function with a divergent tail is reported as
    diverging, not as a number.
    """
    pairs = _normalize_samples(samples)
    if psi1.tail_divergent:
        return ConditionEstimate(
            value=None,
            witness=None,
            samples=len(pairs),
            diverging=True,
            certified=True,
            truncation={"t_max": t_max},
        )
    best = None
    witness = None
    residual = 0.0
    certified = True
    for a, r in pairs:
        if not r < t_max:
            raise ValueError(f"sample radius {r} must be below t_max {t_max}")
        den = float(np.asarray(psi2(a, r)))
        if not den > 0:
            raise ValueError(f"psi2 must be positive at (a={a}, r={r}), got {den}")
        val, _ = quad(
            lambda t: float(np.asarray(psi1(a, t))) / t,
            r,
            t_max,
            limit=200,
            epsabs=1e-12,
            epsrel=1e-10,
        )
        tail = psi1.tail_bound(a, t_max)
        if tail is None:
            certified = False
        else:
            residual = max(residual, tail / den)
        cand = val / den
        if best is None or cand > best:
            best, witness = cand, (a, r)
    return ConditionEstimate(
        value=best,
        witness=witness,
        samples=len(pairs),
        certified=certified,
        residual_bound=residual if certified else None,
        truncation={"t_max": t_max},
    )


def weighted_integral_condition_constant(
    psi1: PsiFunction,
    psi2: PsiFunction,
    w: Weight,
    p: float,
    q: float,
    samples,
    t_max: float = 50.0,
    nodes_per_decade: int = 64,
) -> ConditionEstimate:
    """Best constant for the weighted tail condition

        int_r^inf [w^p(B(a,t))^{1/p} / w^q(B(a,t))^{1/q}] psi1(a, t) dt/t
            <= C psi2(a, r).

    Radii are capped at admissibility inside the box (reported as truncation)
    and the integral is a trapezoid rule on a log-spaced grid, so the estimate
    is never certified; it is still flagged diverging when psi1 alone has a
    divergent tail.
    """
    if not (1 <= p < q):
        raise ValueError(f"need 1 <= p < q, got p={p}, q={q}")
    pairs = _normalize_samples(samples)
    d = w.domain
    wp = weight_power(w, p)
    wq = weight_power(w, q)
    ev_p = BallMassEvaluator(d, wp.cell_masses)
    ev_q = BallMassEvaluator(d, wq.cell_masses)
    best = None
    witness = None
    skipped = 0
    cap_min = math.inf
    for a, r in pairs:
        cap = min(t_max, min(d.half_width - abs(c) for c in a))
        if cap <= r * (1.0 + 1e-12):
            skipped += 1
            continue
        cap_min = min(cap_min, cap)
        den = float(np.asarray(psi2(a, r)))
        if not den > 0:
            raise ValueError(f"psi2 must be positive at (a={a}, r={r}), got {den}")
        ts = log_grid(r, cap, nodes_per_decade)
        mp = ev_p.masses_at(a, ts)
        mq = ev_q.masses_at(a, ts)
        g = (mp ** (1.0 / p) / mq ** (1.0 / q)) * np.asarray(psi1(a, ts), dtype=float)
        integral = float(np.trapezoid(g, np.log(ts)))
        cand = integral / den
        if best is None or cand > best:
            best, witness = cand, (a, r)
    return ConditionEstimate(
        value=best,
        witness=witness,
        samples=len(pairs),
        skipped=skipped,
        diverging=psi1.tail_divergent,
        certified=False,
        truncation={
            "t_max": t_max,
            "t_cap_min": None if math.isinf(cap_min) else cap_min,
        },
    )


@dataclass(frozen=True)
class MonotoneComparisonReport:
    """Empirical constants for the nondecreasing-numerator comparisons."""

    sup_ratio_max: float
    sup_witness: tuple | None
    integral_ratio_max: float
    integral_witness: tuple | None
    samples: int
    skipped: int


def monotone_comparison_verify(
    phi,
    w: Weight,
    p: float,
    samples,
    s_ladder,
) -> MonotoneComparisonReport:
    """Empirical constants in the comparison of phi(a, r) / w(B(a, r))^{1/p}
    against its tail supremum and tail integral over s > r.

    ``phi`` must be nondecreasing in the radius (checked on the ladder, and
    rejected otherwise).  Only admissible ladder radii participate.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    pairs = _normalize_samples(samples)
    d = w.domain
    ladder = np.asarray(s_ladder, dtype=float)
    ev_w = BallMassEvaluator(d, w.cell_masses)
    best_sup = -math.inf
    best_int = -math.inf
    wit_sup = wit_int = None
    skipped = 0
    for a, r in pairs:
        adm = ladder[[d.contains_ball(a, float(s)) for s in ladder]]
        if adm.size == 0 or not d.contains_ball(a, r):
            skipped += 1
            continue
        phi_all = np.asarray(phi(a, adm), dtype=float)
        if np.any(np.diff(phi_all) < -1e-12 * np.max(np.abs(phi_all))):
            raise ValueError(f"phi must be nondecreasing in the radius at a={a}")
        ss = adm[adm > r]
        if ss.size == 0:
            skipped += 1
            continue
        phi_r = float(np.asarray(phi(a, r)))
        wb_r = ev_w.mass(Ball(a, r)) ** (1.0 / p)
        phi_s = np.asarray(phi(a, ss), dtype=float)
        wb_s = ev_w.masses_at(a, ss) ** (1.0 / p)
        sup_term = float(np.max(phi_s / wb_s))
        if sup_term > 0:
            ratio = phi_r / (wb_r * sup_term)
            if ratio > best_sup:
                best_sup, wit_sup = ratio, (a, r)
        integral = float(np.trapezoid(phi_s / wb_s, np.log(ss)))
        if integral > 0:
            ratio = phi_r / (wb_r * integral)
            if ratio > best_int:
                best_int, wit_int = ratio, (a, r)
    return MonotoneComparisonReport(
        sup_ratio_max=best_sup,
        sup_witness=wit_sup,
        integral_ratio_max=best_int,
        integral_witness=wit_int,
        samples=len(pairs),
        skipped=skipped,
    )


def average_vs_norm_verify(
    f: SampledFunction, w: Weight, p: float, balls
) -> tuple[float, Ball | None, int]:
    """Max over balls of [avg_B |f|] / [w(B)^{-1/p} ||f||_{L^p_w(B)}].

    Returns (max ratio, witness, skipped) where balls with vanishing norm are
    skipped.  The ratio is bounded by the p-th weight-class ball product to
    the power 1/p.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    d = f.domain
    ev_w = BallMassEvaluator(d, w.cell_masses)
    best = -math.inf
    witness = None
    skipped = 0
    for ball in balls:
        window, ov = overlap_measures(d, ball)
        leb = float(np.sum(ov))
        avg = float(np.sum(np.abs(f.values[window]) * ov)) / leb
        norm = weighted_lp_norm(f, w, p, ball)
        if norm == 0.0:
            skipped += 1
            continue
        wb = ev_w.mass(ball)
        ratio = avg / (wb ** (-1.0 / p) * norm)
        if ratio > best:
            best, witness = ratio, ball
    return best, witness, skipped


def tail_bound_verify(
    f: SampledFunction,
    w: Weight,
    p: float,
    samples,
    nodes_per_decade: int = 64,
) -> tuple[float, tuple | None, int]:
    """Compare the off-ball tail sum of |f(y)| / |a - y|^n with its majorant
    int_r^R w(B(a,s))^{-1/p} ||f||_{L^p_w(B(a,s))} ds/s over the box.

    Returns (max ratio, witness, skipped).
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    pairs = _normalize_samples(samples)
    d = f.domain
    n = d.dimension
    mesh = d.center_mesh()
    absf = np.abs(f.values)
    dens = absf**p * w.cell_masses
    ev_dens = BallMassEvaluator(d, dens)
    ev_w = BallMassEvaluator(d, w.cell_masses)
    best = -math.inf
    witness = None
    skipped = 0
    for a, r in pairs:
        cap = min(d.half_width - abs(c) for c in a)
        if cap <= r * (1.0 + 1e-12):
            skipped += 1
            continue
        window, ov = overlap_measures(d, Ball(a, r))
        outside = np.full(absf.shape, d.cell_volume)
        outside[window] -= ov
        if n == 1:
            dist = np.abs(mesh[0] - a[0])
        else:
            dist = np.hypot(mesh[0] - a[0], mesh[1] - a[1])
        # cells fully inside the ball contribute nothing; keep 0 * inf out
        safe = np.where(outside > 0, dist, 1.0)
        lhs = float(np.sum(absf * safe**-n * (outside / d.cell_volume)))
        ss = log_grid(r, cap, nodes_per_decade)
        norms = ev_dens.masses_at(a, ss) ** (1.0 / p)
        wbs = ev_w.masses_at(a, ss) ** (1.0 / p)
        g = norms / wbs
        rhs = float(np.trapezoid(g, np.log(ss)))
        if rhs <= 0:
            skipped += 1
            continue
        ratio = lhs / rhs
        if ratio > best:
            best, witness = ratio, (a, r)
    return best, witness, skipped
