"""Canonical serialization: JSON bytes, CSV layout, config hashing."""

import json
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morreykit import (
    ExperimentReport,
    canonical_json,
    config_hash,
    report_to_dict,
    write_report,
)
from tests.test_harness import local_cfg


def tiny_report(**overrides):
    base = dict(
        name="r-demo",
        kind="local-estimate",
        status="PASS",
        empirical_constant=1.5,
        witness={"function": "gaussian", "center": [0.25], "radius": 0.5},
        constants={"empirical_constant": 1.5},
        rows=(
            {"experiment": "r-demo", "lhs": 0.1, "ratio": 1.5, "is_witness": True},
            {"experiment": "r-demo", "lhs": 0.2, "ratio": 0.5, "is_witness": False,
             "extra": "note"},
        ),
        flagged={"zero_rhs_positive_lhs": 0},
        provenance={"seed": 0},
    )
    base.update(overrides)
    return ExperimentReport(**base)


class TestCanonicalJson:
    def test_sorted_keys_and_exact_floats(self):
        text = canonical_json({"b": 0.1, "a": 2, "c": [True, False, None]})
        assert text == '{"a":2,"b":0.10000000000000001,"c":[true,false,null]}'

    def test_floats_survive_round_trip(self):
        values = [0.1, 1 / 3, 1e-300, 6.02e23, -0.0, 123456789.123456789]
        text = canonical_json(values)
        assert json.loads(text) == values

    def test_non_finite_encoded_as_strings(self):
        text = canonical_json({"a": math.inf, "b": -math.inf, "c": math.nan})
        assert text == '{"a":"Infinity","b":"-Infinity","c":"NaN"}'
        assert json.loads(text)  # stays standard JSON

    def test_rejects_non_string_keys_and_unknown_types(self):
        with pytest.raises(TypeError):
            canonical_json({1: "x"})
        with pytest.raises(TypeError):
            canonical_json({"x": object()})

    @given(
        st.dictionaries(
            st.text(min_size=1, max_size=8),
            st.one_of(
                st.integers(-(10**12), 10**12),
                st.floats(allow_nan=False, allow_infinity=False, width=64),
                st.text(max_size=12),
                st.booleans(),
                st.none(),
            ),
            max_size=6,
        )
    )
    def test_agrees_with_json_loads(self, payload):
        assert json.loads(canonical_json(payload)) == payload

    def test_numpy_scalars_reduced(self):
        rep = tiny_report(empirical_constant=np.float64(1.5))
        d = report_to_dict(rep)
        assert isinstance(d["empirical_constant"], float)
        assert canonical_json(d)


class TestConfigHash:
    def test_stable_and_sensitive(self):
        cfg = local_cfg()
        assert config_hash(cfg) == config_hash(local_cfg())
        assert config_hash(cfg) != config_hash(replace(cfg, seed=1))
        assert config_hash(cfg) != config_hash(replace(cfg, p=2.5))
        assert len(config_hash(cfg)) == 64


class TestCsvAndFiles:
    def test_csv_column_union_preserves_first_appearance(self, tmp_path):
        paths = write_report(tiny_report(), tmp_path, formats=("csv",))
        lines = paths[0].read_text().splitlines()
        assert lines[0] == "experiment,lhs,ratio,is_witness,extra"
        assert lines[1] == "r-demo,0.10000000000000001,1.5,true,"
        assert lines[2].endswith(",false,note")

    def test_empty_rows_fall_back_to_status_line(self, tmp_path):
        rep = tiny_report(rows=(), status="HYPOTHESIS-UNMET", empirical_constant=None)
        paths = write_report(rep, tmp_path, formats=("csv",))
        assert paths[0].read_text() == (
            "experiment,status\nr-demo,HYPOTHESIS-UNMET\n"
        )

    def test_json_file_is_canonical_bytes(self, tmp_path):
        rep = tiny_report()
        (path,) = write_report(rep, tmp_path, formats=("json",))
        assert path.read_text() == canonical_json(report_to_dict(rep)) + "\n"

    def test_slug_sanitizes_name(self, tmp_path):
        rep = tiny_report(name="weird name/x")
        (path,) = write_report(rep, tmp_path, formats=("json",))
        assert path.name == "weird-name-x.json"

    def test_unknown_format_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            write_report(tiny_report(), tmp_path, formats=("yaml",))
