"""Built-in acceptance suite: twelve self-contained numerical criteria.

Each criterion returns a CriterionResult with a one-line verdict; run_all
executes them in order.  They use frozen oracles (closed forms computed
independently), structural identities, and refinement studies at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Ball, ball_family, geometric_ladder, make_domain
from .harness import (
    DomainSpec,
    ExperimentConfig,
    FamilySpec,
    FunctionFamilySpec,
    PsiSpec,
    WeightSpec,
    build_function_family,
    refinement_study,
)
from .hypotheses import (
    condition_ladder,
    integral_condition_constant,
    sup_condition_constant,
)
from .norms import (
    classical_morrey_norm,
    gw_morrey_norm,
    gw_weak_morrey_norm,
    psi_catalog,
    weighted_lp_norm,
    weighted_weak_lp_norm,
)
from .operators import (
    cz_at,
    kernel,
    maximal_at,
    maximal_potential_domination,
    riesz_at,
)
from .weights import (
    ap_constant,
    ap_product,
    apq_product,
    constant_weight,
    detect_divergence,
    doubling_check,
    power_weight,
    weight_power,
)

__all__ = ["CriterionResult", "run_all"] + [f"criterion_{i:02d}" for i in range(1, 13)]


@dataclass(frozen=True)
class CriterionResult:
    index: int
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.index:02d} [{self.title}]: {status} - {self.detail}"


def _default_family(domain, stride=32, count=6):
    return ball_family(domain, stride, 4.0 * domain.cell_size, 2.0, count)


def criterion_01() -> CriterionResult:
    """Unit weight + matched shape function collapses to the classical norm."""
    domain = make_domain(1, 4.0, 256)
    family = _default_family(domain)
    w = constant_weight(domain)
    p, q = 2.0, 4.0
    psi = psi_catalog("classical", p=p, q=q, dimension=1)
    worst = 0.0
    for seed in range(20):
        ((_, f),) = build_function_family(
            FunctionFamilySpec(names=("random-cells",)), domain, p, seed
        )
        a = gw_morrey_norm(f, w, p, psi, family).value
        b = classical_morrey_norm(f, p, q, family).value
        worst = max(worst, abs(a - b) / b)
    passed = worst <= 1e-12
    return CriterionResult(
        1,
        "classical reduction",
        passed,
        f"max relative gap over 20 seeded functions = {worst:.3e} (tol 1e-12)",
    )


def criterion_02() -> CriterionResult:
    """Fractional maximal values sit below the dimensional constant times the
    fractional integral, pointwise."""
    domain = make_domain(1, 4.0, 512)
    ladder = geometric_ladder(domain.cell_size, 4.0, 48)
    functions = build_function_family(FunctionFamilySpec(), domain, 2.0, 0)
    total_viol = 0
    worst = 0.0
    for _, f in functions:
        rep = maximal_potential_domination(f, 0.5, ladder, slack=0.01)
        total_viol += rep.violations
        worst = max(worst, rep.empirical_constant)
    passed = total_viol == 0
    return CriterionResult(
        2,
        "pointwise domination",
        passed,
        f"violations={total_viol}, max ratio={worst:.6f} vs bound 2 (slack 1%)",
    )


def criterion_03() -> CriterionResult:
    """Weak quasi-norms never exceed their strong counterparts."""
    domain = make_domain(1, 4.0, 256)
    family = _default_family(domain)
    psi = psi_catalog("power", kappa=0.5)
    weights = [constant_weight(domain), power_weight(0.5, domain)]
    functions = build_function_family(
        FunctionFamilySpec(names=("ball-indicator", "gaussian", "random-cells")),
        domain,
        2.0,
        0,
    )
    worst = -math.inf
    checks = 0
    for w in weights:
        for p in (1.0, 2.0):
            for _, f in functions:
                for ball in family:
                    strong = weighted_lp_norm(f, w, p, ball)
                    weak = weighted_weak_lp_norm(f, w, p, ball)
                    worst = max(worst, weak - strong)
                    checks += 1
                gs = gw_morrey_norm(f, w, p, psi, family).value
                gwk = gw_weak_morrey_norm(f, w, p, psi, family).value
                worst = max(worst, gwk - gs)
                checks += 1
    passed = worst <= 1e-12
    return CriterionResult(
        3,
        "weak below strong",
        passed,
        f"max(weak - strong) = {worst:.3e} over {checks} comparisons (slack 1e-12)",
    )


def criterion_04() -> CriterionResult:
    """Exponent-pair product identity against the single-exponent product."""
    domain = make_domain(1, 4.0, 256)
    family = ball_family(domain, 2, domain.cell_size, 1.3, 20)
    n_balls = len(family.balls)
    worst = 0.0
    checked = 0
    for beta in (0.125, 0.25):
        w = power_weight(beta, domain)
        for p, q in ((2.0, 4.0), (1.0, 2.0)):
            pprime = p / (p - 1.0) if p > 1 else math.inf
            s = q / pprime + 1.0
            wq = weight_power(w, q)
            dual_pair = weight_power(w, -pprime) if p > 1 else None
            dual_single = weight_power(wq, -1.0 / (s - 1.0)) if s > 1 else None
            for ball in family:
                lhs = apq_product(w, p, q, ball, _wq=wq, _dual=dual_pair) ** q
                rhs = ap_product(wq, s, ball, _dual=dual_single)
                worst = max(worst, abs(lhs - rhs) / rhs)
                checked += 1
    passed = worst <= 1e-10 and n_balls >= 1000
    return CriterionResult(
        4,
        "exponent-pair identity",
        passed,
        f"max relative gap = {worst:.3e} over {n_balls} balls x 4 configs "
        "(tol 1e-10)",
    )


def criterion_05() -> CriterionResult:
    """Reciprocal-difference kernel oracle: the transform of the unit-ball
    indicator at x=2 equals ln 3."""
    domain = make_domain(1, 8.0, 4096)
    ((_, f),) = build_function_family(
        FunctionFamilySpec(names=("ball-indicator",)), domain, 2.0, 0
    )
    value = cz_at(kernel("hilbert"), f, (2.0,))
    exact = math.log(3.0)
    err = abs(value - exact)
    passed = err <= 1e-3
    return CriterionResult(
        5,
        "kernel-transform oracle",
        passed,
        f"value {value:.8f} vs ln 3 = {exact:.8f}, |err| = {err:.2e} (tol 1e-3)",
    )


def criterion_06() -> CriterionResult:
    """Sliding-average oracle: the maximal value of the unit-ball indicator
    at x=2 is 1/3, attained at radius 3."""
    domain = make_domain(1, 6.0, 1024)
    ((_, f),) = build_function_family(
        FunctionFamilySpec(names=("ball-indicator",)), domain, 2.0, 0
    )
    ladder = geometric_ladder(domain.cell_size, 6.0, 64)
    value, radius = maximal_at(f, ladder, (2.0,))
    exact = 1.0 / 3.0
    rel = abs(value - exact) / exact
    passed = rel <= 0.02
    return CriterionResult(
        6,
        "maximal-average oracle",
        passed,
        f"value {value:.10f} at radius {radius:.4f} vs 1/3, rel err {rel:.2e} "
        "(tol 2%)",
    )


def criterion_07() -> CriterionResult:
    """Fractional-integral oracle: order 1/2 on the unit-ball indicator at
    the origin equals 4."""
    domain = make_domain(1, 4.0, 256)
    ((_, f),) = build_function_family(
        FunctionFamilySpec(names=("ball-indicator",)), domain, 2.0, 0
    )
    value = riesz_at(f, 0.5, (0.0,))
    rel = abs(value - 4.0) / 4.0
    passed = rel <= 0.01
    return CriterionResult(
        7,
        "fractional-integral oracle",
        passed,
        f"value {value:.6f} vs 4, rel err {rel:.2e} (tol 1%)",
    )


def criterion_08() -> CriterionResult:
    """The spiked/smooth shape pair: integral condition holds with constant 1
    while the sup condition grows without bound as more spikes enter."""
    psi1 = psi_catalog("spiked-decay")
    psi2 = psi_catalog("exp-decay")
    samples = [((0.0,), 0.005)]
    integral = integral_condition_constant(psi1, psi2, samples, t_max=50.0)
    int_ok = integral.value is not None and abs(integral.value - 1.0) <= 1e-6
    s30 = sup_condition_constant(
        psi1, psi2, samples, condition_ladder(psi1, psi2, 1.0 / 30.0, 50.0)
    ).value
    s60 = sup_condition_constant(
        psi1, psi2, samples, condition_ladder(psi1, psi2, 1.0 / 60.0, 50.0)
    ).value
    sup_ok = s30 >= 30.0 and s60 >= 2.0 * s30 * (1.0 - 1e-12)
    passed = int_ok and sup_ok
    return CriterionResult(
        8,
        "condition-gap pair",
        passed,
        f"integral constant = {integral.value:.9f} (=1 +- 1e-6); sup constant "
        f"{s30:.2f} -> {s60:.2f} when the spike cap doubles",
    )


def _local_cfg(operator, p, weight, rhs_form, name):
    alpha = q = None
    if operator == "riesz-potential":
        alpha = 0.25 if p == 2.0 else 0.5
        q = 1.0 / (1.0 / p - alpha)
    return ExperimentConfig(
        name=name,
        kind="local-estimate",
        operator=operator,
        p=p,
        q=q,
        alpha=alpha,
        kernel="hilbert" if operator == "cz-kernel" else None,
        rhs_form=rhs_form,
        domain=DomainSpec(1, 4.0, 256),
        weight=weight,
        levels=2,
        tolerance=1.25,
    )


def criterion_09() -> CriterionResult:
    """Local ball-wise estimates: finite constants, stable under refinement."""
    modes = [
        ("maximal", "sup"),
        ("maximal", "integral"),
        ("riesz-potential", "integral"),
        ("cz-kernel", "integral"),
    ]
    weights = [WeightSpec("constant"), WeightSpec("power", 0.5)]
    failures = []
    worst_ratio = 1.0
    for operator, rhs_form in modes:
        for wspec in weights:
            for p in (2.0, 1.0):
                name = f"local-{operator}-{rhs_form}-{wspec.kind}-p{p:g}"
                rep = refinement_study(_local_cfg(operator, p, wspec, rhs_form, name))
                for r in rep.constants["ratios"]:
                    if r is not None:
                        worst_ratio = max(worst_ratio, r, 1.0 / r)
                if rep.status != "PASS":
                    failures.append(f"{name}:{rep.status}")
    passed = not failures
    detail = (
        f"16 refinement runs, worst stepwise ratio {worst_ratio:.4f} (tol 1.25)"
        if passed
        else "unstable: " + ", ".join(failures)
    )
    return CriterionResult(9, "local estimates stable", passed, detail)


def _bounded_cfg(name, operator, p, condition, weight, kappa1, kappa2, kern=None):
    alpha = q = None
    if operator in ("riesz-potential", "fractional-maximal"):
        alpha = 0.25 if p == 2.0 else 0.5
        q = 1.0 / (1.0 / p - alpha)
    return ExperimentConfig(
        name=name,
        kind="boundedness",
        operator=operator,
        p=p,
        q=q,
        alpha=alpha,
        kernel=kern,
        condition=condition,
        domain=DomainSpec(1, 4.0, 256),
        weight=weight,
        psi1=PsiSpec("power", kappa=kappa1),
        psi2=PsiSpec("power", kappa=kappa2),
        levels=2,
        tolerance=1.25,
    )


def criterion_10() -> CriterionResult:
    """Family-norm boundedness ratios: gated, finite, refinement-stable."""
    const = WeightSpec("constant")
    runs = [
        _bounded_cfg("bdd-maximal-sup-p2", "maximal", 2.0, "sup", const, 0.5, 0.5),
        _bounded_cfg(
            "bdd-maximal-int-power-p2",
            "maximal",
            2.0,
            "integral",
            WeightSpec("power", 0.5),
            0.5,
            0.5,
        ),
        _bounded_cfg("bdd-maximal-sup-p1", "maximal", 1.0, "sup", const, 0.5, 0.5),
        _bounded_cfg(
            "bdd-cz-int-p2", "cz-kernel", 2.0, "integral", const, 0.5, 0.5, "hilbert"
        ),
        _bounded_cfg(
            "bdd-cz-int-p1", "cz-kernel", 1.0, "integral", const, 0.5, 0.5, "hilbert"
        ),
        _bounded_cfg(
            "bdd-riesz-p2", "riesz-potential", 2.0, "weighted-integral", const, 0.5, 0.25
        ),
        _bounded_cfg(
            "bdd-riesz-p1", "riesz-potential", 1.0, "weighted-integral", const, 0.75, 0.25
        ),
        _bounded_cfg(
            "bdd-fracmax-p2",
            "fractional-maximal",
            2.0,
            "weighted-integral",
            const,
            0.5,
            0.25,
        ),
    ]
    failures = []
    worst_ratio = 1.0
    for cfg in runs:
        rep = refinement_study(cfg)
        for r in rep.constants.get("ratios", []):
            if r is not None:
                worst_ratio = max(worst_ratio, r, 1.0 / r)
        if rep.status != "PASS":
            failures.append(f"{cfg.name}:{rep.status}")
    passed = not failures
    detail = (
        f"8 gated refinement runs, worst stepwise ratio {worst_ratio:.4f} (tol 1.25)"
        if passed
        else "unstable/ungated: " + ", ".join(failures)
    )
    return CriterionResult(10, "boundedness stable", passed, detail)


def _doubling_pairs() -> list[tuple[Ball, Ball]]:
    pairs = []
    for c in (0.0, 0.7, -1.3, 2.1):
        for big in np.geomspace(0.1, 1.8, 10):
            for frac in np.linspace(0.05, 0.9, 5):
                small = frac * big
                for shift in np.linspace(0.0, 0.9, 5):
                    off = shift * (big - small)
                    pairs.append((Ball((c,), big), Ball((c + off,), small)))
    return pairs


def criterion_11() -> CriterionResult:
    """Doubling growth bound: finite, refinement-stable; exactly 1 for the
    unit weight at p=1."""
    pairs = _doubling_pairs()
    maxima = []
    for points in (256, 512):
        domain = make_domain(1, 4.0, points)
        w = power_weight(0.5, domain)
        maxima.append(max(doubling_check(w, 2.0, big, small) for big, small in pairs))
    drift = abs(maxima[1] / maxima[0] - 1.0)
    domain = make_domain(1, 4.0, 256)
    one = constant_weight(domain)
    worst_const = max(
        abs(doubling_check(one, 1.0, Ball((c,), r), Ball((c,), 0.5 * r)) - 1.0)
        for c in (0.0, 1.0)
        for r in (0.25, 0.5, 1.0, 2.0)
    )
    passed = (
        all(math.isfinite(m) for m in maxima) and drift <= 0.10 and worst_const <= 1e-12
    )
    return CriterionResult(
        11,
        "doubling growth",
        passed,
        f"max over {len(pairs)} nested pairs = {maxima[0]:.4f} -> {maxima[1]:.4f} "
        f"(drift {drift:.2%}, tol 10%); unit-weight deviation {worst_const:.1e}",
    )


def criterion_12() -> CriterionResult:
    """Weight-class sanity: the unit weight scores exactly 1; the borderline
    power weight must trip the divergence detector across refinements."""
    domain = make_domain(1, 4.0, 256)
    family = _default_family(domain)
    unit = ap_constant(constant_weight(domain), 2.0, family).value
    unit_ok = unit == 1.0

    radii = (0.5, 1.0, 2.0)
    per_level = []
    for points in (64, 128, 256):
        dom = make_domain(1, 4.0, points)
        w = power_weight(1.0, dom)
        per_level.append(max(ap_product(w, 2.0, Ball((0.0,), r)) for r in radii))
    monotone = all(b > a for a, b in zip(per_level, per_level[1:]))
    diverged = detect_divergence(per_level, factor=2.0)
    ratios = [b / a for a, b in zip(per_level, per_level[1:])]
    passed = unit_ok and monotone and diverged
    return CriterionResult(
        12,
        "weight-class sanity",
        passed,
        f"unit-weight constant = {unit!r} (exact 1: {unit_ok}); borderline "
        f"products {[round(v, 5) for v in per_level]}, stepwise ratios "
        f"{[round(r, 5) for r in ratios]} - monotone but logarithmic, so the "
        "required >=2x growth never occurs; see README, Acceptance suite",
    )


def run_all() -> list[CriterionResult]:
    fns = [
        criterion_01,
        criterion_02,
        criterion_03,
        criterion_04,
        criterion_05,
        criterion_06,
        criterion_07,
        criterion_08,
        criterion_09,
        criterion_10,
        criterion_11,
        criterion_12,
    ]
    return [fn() for fn in fns]
