"""Experiment harness: config validation, runs, gating, refinement, determinism."""

import math
from dataclasses import replace

import numpy as np
import pytest

from morreykit import (
    Ball,
    ConfigurationError,
    DomainSpec,
    ExperimentConfig,
    FamilySpec,
    FunctionFamilySpec,
    PsiSpec,
    WeightSpec,
    boundedness_experiment,
    build_function_family,
    canonical_json,
    local_estimate_experiment,
    local_pair_value,
    make_domain,
    refinement_study,
    report_to_dict,
    run_experiment,
    validate_config,
)


def local_cfg(**overrides) -> ExperimentConfig:
    base = dict(
        name="t-local",
        kind="local-estimate",
        operator="maximal",
        p=2.0,
        domain=DomainSpec(dimension=1, half_width=4.0, points=128),
        family=FamilySpec(center_stride=32, count=4),
        radii_steps=24,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def bounded_cfg(**overrides) -> ExperimentConfig:
    base = dict(
        name="t-bounded",
        kind="boundedness",
        operator="maximal",
        p=2.0,
        psi1=PsiSpec(tag="power", kappa=0.5),
        psi2=PsiSpec(tag="power", kappa=0.5),
        domain=DomainSpec(dimension=1, half_width=4.0, points=128),
        family=FamilySpec(center_stride=32, count=4),
        radii_steps=24,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestValidateConfig:
    def test_fills_defaults(self):
        cfg = validate_config(local_cfg())
        assert cfg.rhs_form == "integral"
        cfg2 = validate_config(bounded_cfg())
        assert cfg2.condition == "integral"

    def test_rejects_unknown_kind_operator_weight_function(self):
        with pytest.raises(ConfigurationError):
            validate_config(local_cfg(kind="mystery"))
        with pytest.raises(ConfigurationError):
            validate_config(local_cfg(operator="laplacian"))
        with pytest.raises(ConfigurationError):
            validate_config(local_cfg(weight=WeightSpec(kind="exotic")))
        with pytest.raises(ConfigurationError):
            validate_config(
                local_cfg(functions=FunctionFamilySpec(names=("sawtooth",)))
            )

    def test_fractional_exponent_relation_enforced(self):
        cfg = local_cfg(operator="riesz-potential", alpha=0.25, q=3.0)
        with pytest.raises(ConfigurationError) as err:
            validate_config(cfg)
        msg = str(err.value)
        assert "0.25" in msg and "3.0" in msg and "2.0" in msg
        ok = validate_config(local_cfg(operator="riesz-potential", alpha=0.25, q=4.0))
        assert ok.q == 4.0

    def test_fractional_requires_alpha_and_q(self):
        with pytest.raises(ConfigurationError):
            validate_config(local_cfg(operator="riesz-potential"))
        with pytest.raises(ConfigurationError):
            validate_config(local_cfg(operator="fractional-maximal", alpha=0.25))

    def test_plain_operators_reject_fractional_parameters(self):
        with pytest.raises(ConfigurationError):
            validate_config(local_cfg(alpha=0.5))
        with pytest.raises(ConfigurationError):
            validate_config(local_cfg(q=4.0))

    def test_kernel_requirements(self):
        with pytest.raises(ConfigurationError):
            validate_config(local_cfg(operator="cz-kernel"))
        with pytest.raises(ConfigurationError):
            validate_config(local_cfg(operator="cz-kernel", kernel="riesz-1"))
        ok = validate_config(local_cfg(operator="cz-kernel", kernel="hilbert"))
        assert ok.kernel == "hilbert"

    def test_rhs_form_and_condition_placement(self):
        with pytest.raises(ConfigurationError):
            validate_config(local_cfg(condition="integral"))
        with pytest.raises(ConfigurationError):
            validate_config(
                local_cfg(operator="riesz-potential", alpha=0.25, q=4.0, rhs_form="sup")
            )
        with pytest.raises(ConfigurationError):
            validate_config(bounded_cfg(rhs_form="integral"))
        with pytest.raises(ConfigurationError):
            validate_config(bounded_cfg(psi1=None))
        with pytest.raises(ConfigurationError):
            validate_config(bounded_cfg(operator="cz-kernel", kernel="hilbert", condition="sup"))
        with pytest.raises(ConfigurationError):
            validate_config(
                bounded_cfg(
                    operator="riesz-potential", alpha=0.25, q=4.0, condition="integral"
                )
            )

    def test_numeric_bounds(self):
        for bad in (
            dict(p=0.5),
            dict(tolerance=1.0),
            dict(levels=0),
            dict(radii_steps=1),
            dict(nodes_per_decade=4),
            dict(t_max=0.0),
            dict(seed=-1),
        ):
            with pytest.raises(ConfigurationError):
                validate_config(local_cfg(**bad))


class TestFunctionFamily:
    def test_catalog_shapes(self):
        d = make_domain(1, 4.0, 64)
        fams = dict(build_function_family(FunctionFamilySpec(), d, 2.0, 0))
        x = d.axis_centers()
        assert np.array_equal(fams["ball-indicator"].values, (np.abs(x) <= 1).astype(float))
        assert np.array_equal(
            fams["annulus-indicator"].values,
            ((np.abs(x) >= 1) & (np.abs(x) <= 2)).astype(float),
        )
        tp = fams["truncated-power"].values
        inside = np.abs(x) <= 1
        assert np.allclose(tp[inside], np.abs(x[inside]) ** -0.2)  # 0.4 * n / p
        assert np.all(tp[~inside] == 0)

    def test_truncated_power_exponent_guard(self):
        d = make_domain(1, 4.0, 64)
        spec = FunctionFamilySpec(names=("truncated-power",), power_exponent=0.6)
        with pytest.raises(ConfigurationError):
            build_function_family(spec, d, 2.0, 0)  # needs gamma < n/p = 0.5

    def test_random_cells_anchored_across_resolutions(self):
        spec = FunctionFamilySpec(names=("random-cells",))
        coarse = make_domain(1, 4.0, 64)
        fine = make_domain(1, 4.0, 128)
        (_, fc) = build_function_family(spec, coarse, 2.0, 9)[0]
        (_, ff) = build_function_family(spec, fine, 2.0, 9, base_points=64)[0]
        assert np.array_equal(ff.values[0::2], fc.values)
        assert np.array_equal(ff.values[1::2], fc.values)


class TestLocalEstimate:
    def test_report_structure_and_witness_reproduction(self):
        cfg = local_cfg()
        rep = local_estimate_experiment(cfg)
        assert rep.status == "PASS"
        assert rep.rows and rep.empirical_constant is not None
        finite = [r["ratio"] for r in rep.rows if math.isfinite(r["ratio"])]
        assert rep.empirical_constant == pytest.approx(max(finite), rel=1e-15)
        c = rep.constants
        assert c["pairs_evaluated"] == len(rep.rows)
        assert rep.flagged == {"zero_rhs_positive_lhs": 0}
        wit = rep.witness
        lhs, rhs = local_pair_value(
            cfg, wit["function"], Ball(tuple(wit["center"]), wit["radius"])
        )
        assert lhs == pytest.approx(wit["lhs"], rel=1e-12)
        assert rhs == pytest.approx(wit["rhs"], rel=1e-12)
        assert rep.empirical_constant == pytest.approx(lhs / rhs, rel=1e-12)
        marked = [r for r in rep.rows if r["is_witness"]]
        assert marked and any(
            r["ratio"] == pytest.approx(rep.empirical_constant, rel=1e-15)
            for r in marked
        )

    def test_sup_form_also_passes_and_differs(self):
        int_rep = local_estimate_experiment(local_cfg())
        sup_rep = local_estimate_experiment(local_cfg(rhs_form="sup"))
        assert sup_rep.status == "PASS"
        assert sup_rep.empirical_constant != int_rep.empirical_constant

    def test_deterministic_reports(self):
        a = local_estimate_experiment(local_cfg())
        b = local_estimate_experiment(local_cfg())
        assert canonical_json(report_to_dict(a)) == canonical_json(report_to_dict(b))

    def test_kind_mismatch_rejected(self):
        with pytest.raises(ConfigurationError):
            local_estimate_experiment(bounded_cfg())
        with pytest.raises(ConfigurationError):
            boundedness_experiment(local_cfg())

    def test_pair_without_tail_window_rejected(self):
        cfg = local_cfg()
        with pytest.raises(ValueError):
            local_pair_value(cfg, "gaussian", Ball((2.0,), 1.5))


class TestBoundedness:
    def test_power_pair_passes_gate_and_reports(self):
        rep = boundedness_experiment(bounded_cfg())
        assert rep.status == "PASS"
        gate = rep.constants["condition_gate"]
        assert gate["condition"] == "integral"
        assert math.isfinite(gate["constant"])
        assert len(gate["probe_values"]) == 3
        assert rep.constants["functions_skipped_zero_source"] == 0
        assert len(rep.rows) == 5
        for row in rep.rows:
            assert row["ratio"] == pytest.approx(
                row["target_norm"] / row["source_norm"], rel=1e-15
            )
        best = max(r["ratio"] for r in rep.rows)
        assert rep.empirical_constant == pytest.approx(best, rel=1e-15)
        assert rep.witness["target_witness"]["radius"] > 0

    def test_weak_target_at_p_one(self):
        rep = boundedness_experiment(
            bounded_cfg(p=1.0, psi1=PsiSpec(tag="power", kappa=0.5))
        )
        assert rep.status == "PASS"
        assert rep.witness["target_witness"]["level"] is not None

    def test_fractional_weighted_gate(self):
        rep = boundedness_experiment(
            bounded_cfg(
                operator="riesz-potential",
                alpha=0.25,
                q=4.0,
                psi1=PsiSpec(tag="power", kappa=0.5),
                psi2=PsiSpec(tag="power", kappa=0.25),
            )
        )
        assert rep.status == "PASS"
        assert rep.constants["condition_gate"]["condition"] == "weighted-integral"
        assert not rep.constants["condition_gate"]["certified"]

    def test_divergent_pair_is_hypothesis_unmet(self):
        rep = boundedness_experiment(
            bounded_cfg(
                condition="sup",
                psi1=PsiSpec(tag="spiked-decay"),
                psi2=PsiSpec(tag="exp-decay"),
            )
        )
        assert rep.status == "HYPOTHESIS-UNMET"
        assert rep.rows == ()
        assert rep.empirical_constant is None
        probes = rep.constants["condition_gate"]["probe_values"]
        assert probes[-1] > 2.0 * probes[-2] > 4.0 * probes[0]

    def test_flat_shape_integral_diverges_cleanly(self):
        rep = boundedness_experiment(
            bounded_cfg(
                psi1=PsiSpec(tag="power", kappa=0.0),
                psi2=PsiSpec(tag="power", kappa=0.5),
            )
        )
        assert rep.status == "HYPOTHESIS-UNMET"
        assert rep.constants["condition_gate"]["diverging"]


class TestRefinement:
    def test_needs_two_levels(self):
        with pytest.raises(ConfigurationError):
            refinement_study(local_cfg(levels=1))

    def test_local_refinement_passes_and_tracks_ratios(self):
        cfg = local_cfg(levels=2)
        rep = refinement_study(cfg)
        assert rep.status == "PASS"
        assert [row["level"] for row in rep.rows] == [0, 1]
        assert rep.rows[1]["points"] == 2 * rep.rows[0]["points"]
        ratio = rep.rows[1]["ratio_to_previous"]
        assert 1.0 / cfg.tolerance <= ratio <= cfg.tolerance
        assert len(rep.constants["class_estimates"]) == 2

    def test_out_of_class_weight_not_applicable(self):
        cfg = local_cfg(
            weight=WeightSpec(kind="power", beta=3.0),
            levels=3,
            domain=DomainSpec(dimension=1, half_width=4.0, points=64),
        )
        rep = refinement_study(cfg)
        assert rep.status == "NOT-APPLICABLE"
        est = rep.constants["class_estimates"]
        assert est[1] > 2 * est[0] and est[2] > 2 * est[1]
        assert rep.constants["ratios"] == []

    def test_unmet_gate_outranks_everything(self):
        cfg = bounded_cfg(
            condition="sup",
            psi1=PsiSpec(tag="spiked-decay"),
            psi2=PsiSpec(tag="exp-decay"),
            levels=2,
        )
        rep = refinement_study(cfg)
        assert rep.status == "HYPOTHESIS-UNMET"

    def test_dispatch_matches_direct_calls(self):
        cfg = local_cfg(levels=2)
        via_dispatch = run_experiment(cfg)
        direct = refinement_study(cfg)
        assert canonical_json(report_to_dict(via_dispatch)) == canonical_json(
            report_to_dict(direct)
        )
        single = local_cfg()
        assert canonical_json(report_to_dict(run_experiment(single))) == canonical_json(
            report_to_dict(local_estimate_experiment(single))
        )


class TestConfigImmutability:
    def test_validate_returns_new_config(self):
        cfg = local_cfg()
        out = validate_config(cfg)
        assert cfg.rhs_form is None  # input untouched
        assert out is not cfg
        assert replace(out, rhs_form=None) == cfg
