"""Condition checkers: closed-form constants, truncation semantics, verifiers."""

import math

import numpy as np
import pytest

from morreykit import (
    Ball,
    SampledFunction,
    average_vs_norm_verify,
    condition_ladder,
    constant_weight,
    integral_condition_constant,
    log_grid,
    make_domain,
    monotone_comparison_verify,
    psi_catalog,
    sample,
    sup_condition_constant,
    tail_bound_verify,
    weighted_integral_condition_constant,
)


class TestLogGrid:
    def test_endpoints_and_density(self):
        g = log_grid(0.1, 10.0, 32)
        assert g[0] == pytest.approx(0.1, rel=1e-15)
        assert g[-1] == pytest.approx(10.0, rel=1e-15)
        assert g.size >= 2 * 32  # two decades
        narrow = log_grid(1.0, 1.01)
        assert narrow.size >= 8

    def test_rejects_bad_span(self):
        with pytest.raises(ValueError):
            log_grid(0.0, 1.0)
        with pytest.raises(ValueError):
            log_grid(2.0, 1.0)


class TestSupCondition:
    def test_power_pair_matches_direct_ladder_maximum(self):
        psi1 = psi_catalog("power", kappa=0.7)
        psi2 = psi_catalog("power", kappa=0.4)
        ladder = np.geomspace(0.05, 20.0, 200)
        samples = [((0.0,), 0.1), ((1.0,), 0.5), ((0.0,), 2.0)]
        est = sup_condition_constant(psi1, psi2, samples, ladder)
        expected = -math.inf
        exp_wit = None
        for a, r in samples:
            ts = ladder[ladder > r]
            cand = float(np.max(ts**-0.7)) / r**-0.4
            if cand > expected:
                expected, exp_wit = cand, (a, r)
        assert est.value == pytest.approx(expected, rel=1e-14)
        assert est.witness == exp_wit
        assert est.skipped == 0 and est.certified

    def test_growing_numerator_peaks_at_ladder_top(self):
        psi1 = psi_catalog("power", kappa=-0.5)  # increasing in the radius
        psi2 = psi_catalog("power", kappa=0.0)
        ladder = np.geomspace(0.1, 8.0, 50)
        est = sup_condition_constant(psi1, psi2, [((0.0,), 1.0)], ladder)
        assert est.value == pytest.approx(math.sqrt(8.0), rel=1e-12)

    def test_sample_beyond_ladder_is_skipped(self):
        psi = psi_catalog("power", kappa=0.5)
        ladder = np.geomspace(0.1, 1.0, 10)
        est = sup_condition_constant(psi, psi, [((0.0,), 2.0)], ladder)
        assert est.value is None and est.skipped == 1

    def test_spiked_pair_needs_structure_points(self):
        psi1 = psi_catalog("spiked-decay")
        psi2 = psi_catalog("exp-decay")
        r = 1.0 / 30.0
        ladder = condition_ladder(psi1, psi2, r, 2.0)
        est = sup_condition_constant(psi1, psi2, [((0.0,), r)], ladder)
        # the ladder keeps the spike at 1/29, where the numerator reaches 29
        assert est.value >= 29.0 / psi2(None, r) * (1 - 1e-12)


class TestIntegralCondition:
    def test_power_pair_closed_form(self):
        kappa = 0.6
        psi = psi_catalog("power", kappa=kappa)
        t_max = 40.0
        samples = [((0.0,), 0.2), ((0.5,), 1.0), ((0.0,), 3.0)]
        est = integral_condition_constant(psi, psi, samples, t_max=t_max)
        # int_r^T t^{-k-1} dt / r^{-k} = (1 - (r/T)^k)/k, largest at smallest r
        expected = (1.0 - (0.2 / t_max) ** kappa) / kappa
        assert est.value == pytest.approx(expected, rel=1e-8)
        assert est.witness == ((0.0,), 0.2)
        assert est.certified
        # residual bound: T^{-k}/k over psi2, maximized at the largest radius
        want_resid = (t_max**-kappa / kappa) / 3.0**-kappa
        assert est.residual_bound == pytest.approx(want_resid, rel=1e-12)

    def test_divergent_tail_reported_not_estimated(self):
        flat = psi_catalog("power", kappa=0.0)
        target = psi_catalog("power", kappa=0.5)
        est = integral_condition_constant(flat, target, [((0.0,), 0.5)])
        assert est.diverging and est.value is None

    def test_uncertified_without_tail_bound(self):
        bare = psi_catalog("custom", fn=lambda a, r: np.exp(-np.asarray(r, dtype=float)))
        target = psi_catalog("power", kappa=0.5)
        est = integral_condition_constant(bare, target, [((0.0,), 0.5)], t_max=30.0)
        assert not est.certified
        assert est.residual_bound is None
        assert est.value is not None and est.value > 0

    def test_radius_at_horizon_rejected(self):
        psi = psi_catalog("power", kappa=0.5)
        with pytest.raises(ValueError):
            integral_condition_constant(psi, psi, [((0.0,), 60.0)], t_max=50.0)


class TestWeightedIntegralCondition:
    def test_constant_weight_closed_form(self):
        d = make_domain(1, 4.0, 256)
        w = constant_weight(d)
        p, q, kappa = 1.0, 2.0, 1.0
        psi1 = psi_catalog("power", kappa=kappa)
        psi2 = psi_catalog("power", kappa=kappa)
        r = 0.25
        t_max = 3.0
        est = weighted_integral_condition_constant(
            psi1, psi2, w, p, q, [((0.0,), r)], t_max=t_max, nodes_per_decade=256
        )
        # integrand (2t)^{1/p - 1/q} t^{-kappa - 1}; s = 1/p - 1/q
        s = 1.0 / p - 1.0 / q
        closed = 2.0**s * (t_max ** (s - kappa) - r ** (s - kappa)) / (s - kappa)
        expected = closed / r**-kappa
        assert est.value == pytest.approx(expected, rel=5e-3)
        assert not est.certified
        assert est.truncation["t_cap_min"] == pytest.approx(t_max)

    def test_divergent_numerator_flagged(self):
        d = make_domain(1, 4.0, 64)
        w = constant_weight(d)
        flat = psi_catalog("power", kappa=0.0)
        est = weighted_integral_condition_constant(
            flat, flat, w, 1.0, 2.0, [((0.0,), 0.5)], t_max=3.0
        )
        assert est.diverging

    def test_stranded_sample_skipped_and_bad_exponents_rejected(self):
        d = make_domain(1, 4.0, 64)
        w = constant_weight(d)
        psi = psi_catalog("power", kappa=0.5)
        est = weighted_integral_condition_constant(
            psi, psi, w, 1.0, 2.0, [((3.9,), 1.0)], t_max=3.0
        )
        assert est.skipped == 1 and est.value is None
        with pytest.raises(ValueError):
            weighted_integral_condition_constant(psi, psi, w, 2.0, 2.0, [((0.0,), 0.5)])


class TestVerifiers:
    def test_monotone_comparison_constant_ratio(self):
        d = make_domain(1, 4.0, 128)
        w = constant_weight(d)
        phi = lambda a, r: np.asarray(r, dtype=float)  # noqa: E731
        ladder = log_grid(0.25, 3.0, 32)
        rep = monotone_comparison_verify(phi, w, 1.0, [((0.0,), 0.5)], ladder)
        # phi / w(B)^{1/p} is identically 1/2, so the sup comparison is exact
        assert rep.sup_ratio_max == pytest.approx(1.0, rel=1e-12)
        assert rep.integral_ratio_max > 0
        assert rep.skipped == 0

    def test_monotone_comparison_rejects_decreasing(self):
        d = make_domain(1, 4.0, 64)
        w = constant_weight(d)
        phi = lambda a, r: 1.0 / np.asarray(r, dtype=float)  # noqa: E731
        with pytest.raises(ValueError):
            monotone_comparison_verify(phi, w, 1.0, [((0.0,), 0.5)], log_grid(0.25, 3.0))

    def test_average_vs_norm_unit_weight_is_identity(self):
        d = make_domain(1, 4.0, 128)
        w = constant_weight(d)
        f = sample(lambda x: np.abs(np.sin(x)) + 0.1, d)
        balls = [Ball((0.0,), 1.0), Ball((1.0,), 0.5), Ball((-2.0,), 1.5)]
        best, witness, skipped = average_vs_norm_verify(f, w, 1.0, balls)
        assert best == pytest.approx(1.0, rel=1e-12)
        assert witness in balls and skipped == 0

    def test_average_vs_norm_skips_null_balls(self):
        d = make_domain(1, 4.0, 128)
        w = constant_weight(d)
        zero = SampledFunction(d, np.zeros(128))
        best, witness, skipped = average_vs_norm_verify(zero, w, 2.0, [Ball((0.0,), 1.0)])
        assert skipped == 1 and witness is None

    def test_tail_bound_ratio_finite_and_skips_stranded(self):
        d = make_domain(1, 4.0, 256)
        w = constant_weight(d)
        f = sample(lambda x: np.exp(-(x**2)), d)
        samples = [((0.0,), 0.5), ((1.0,), 0.5), ((3.9,), 1.0)]
        best, witness, skipped = tail_bound_verify(f, w, 2.0, samples)
        assert skipped == 1
        assert witness in [s for s in samples[:2]]
        assert math.isfinite(best) and best > 0
