"""
Tests for run configuration parsing, overrides and toll resolution.
"""

from __future__ import annotations

import json

import numpy as np
import pytest

from dcq.config import load_config, parse_config, resolve_toll
from dcq.errors import ConfigParseError, DcqError, DriverParameterError, TollTooShort
from dcq.stochastic import CauchyStd
from dcq.tolls import ConstantToll, ImpulseToll, PrefixToll, StoredToll

HALF_THIRD = [{"b": 1, "p": "1/2"}, {"b": 1, "p": "1/3"}]


def minimal(**extra):
    return {"branches": HALF_THIRD, "toll": {"kind": "impulse", "j": 0}, **extra}


class TestParseConfig:
    def test_defaults(self):
        config = parse_config(minimal())
        assert config.horizon == 10**6
        assert config.envelope is None
        assert config.formats == ("json", "csv")
        assert config.spec().m == 2

    def test_echo_parses_back_to_equal_config(self):
        data = minimal(
            horizon=5000,
            truncation=50,
            replicas=8,
            seed=123,
            tolerances={"root_tol": 1e-12, "report_tol": 1e-8},
            envelope={"c": 2.0, "eta": 0.5},
            output={"dir": "results", "formats": ["json"]},
            checkpoint_factor=1.5,
            mgf=[0.1, 0.2],
        )
        config = parse_config(data)
        assert parse_config(config.to_dict()) == config
        assert config.to_dict()["envelope"] == {"c": 2.0, "eta": 0.5}

    def test_echo_is_json_serializable(self):
        assert json.loads(json.dumps(parse_config(minimal()).to_dict()))["horizon"] == 10**6

    def test_float_ratio_is_a_parse_error(self):
        data = minimal()
        data["branches"] = [{"b": 1, "p": 0.5}, {"b": 1, "p": "1/3"}]
        with pytest.raises(ConfigParseError, match="string"):
            parse_config(data)

    @pytest.mark.parametrize(
        "data",
        [
            [],
            {"toll": {"kind": "impulse"}},
            minimal(extra_key=1),
            minimal(horizon="big"),
            minimal(horizon=True),
            minimal(mgf=0.1),
            minimal(output={"formats": ["xml"]}),
            {"branches": HALF_THIRD, "toll": {"kind": "sawtooth"}},
            {"branches": [{"b": 1}], "toll": {"kind": "impulse"}},
            {"branches": HALF_THIRD, "toll": {"kind": "file"}},
            {"branches": HALF_THIRD, "toll": {"kind": "constant", "value": "one"}},
        ],
    )
    def test_parse_errors(self, data):
        with pytest.raises(ConfigParseError):
            parse_config(data)

    @pytest.mark.parametrize(
        "data",
        [
            minimal(horizon=0),
            minimal(seed=2**64),
            minimal(checkpoint_factor=1.0),
            minimal(replicas=0),
        ],
    )
    def test_validation_errors(self, data):
        with pytest.raises(DcqError) as excinfo:
            parse_config(data)
        assert excinfo.value.exit_code == 2

    def test_unknown_driver(self):
        with pytest.raises(DriverParameterError):
            parse_config({"branches": HALF_THIRD, "toll": {"kind": "driver", "variant": "pareto"}})

    def test_branch_errors_surface_on_spec(self):
        config = parse_config({"branches": [{"b": 0.5, "p": "1/2"}], "toll": {"kind": "impulse"}})
        with pytest.raises(DcqError):
            config.spec()


class TestOverrides:
    def test_none_is_ignored(self):
        config = parse_config(minimal())
        assert config.with_overrides(seed=None, horizon=None) is config

    def test_scalar_overrides(self):
        config = parse_config(minimal()).with_overrides(horizon=100, seed=5, truncation=7)
        assert (config.horizon, config.seed, config.truncation) == (100, 5, 7)

    def test_output_dir_keeps_formats(self):
        config = parse_config(minimal(output={"dir": "a", "formats": ["csv"]}))
        changed = config.with_overrides(output_dir="b")
        assert changed.output_dir == "b"
        assert changed.formats == ("csv",)

    def test_mgf_points(self):
        config = parse_config(minimal()).with_overrides(mgf_points=[0.1, 0.3])
        assert config.mgf_points == (0.1, 0.3)

    def test_overrides_are_validated(self):
        with pytest.raises(DcqError):
            parse_config(minimal()).with_overrides(horizon=-5)


class TestLoadConfig:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigParseError, match="Cannot read"):
            load_config(tmp_path / "missing.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{not json")
        with pytest.raises(ConfigParseError, match="not valid JSON"):
            load_config(path)

    def test_relative_toll_file(self, tmp_path):
        (tmp_path / "tolls.csv").write_text("1\n2\n3\n")
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"branches": HALF_THIRD, "toll": {"kind": "file", "path": "tolls.csv"}}))
        toll = resolve_toll(load_config(path))
        assert isinstance(toll, StoredToll)
        assert toll.values.tolist() == [1.0, 2.0, 3.0]
        with pytest.raises(TollTooShort):
            toll.dense(10)

    def test_json_toll_file(self, tmp_path):
        (tmp_path / "tolls.json").write_text("[0.5, 1.5]")
        config = parse_config(
            {"branches": HALF_THIRD, "toll": {"kind": "file", "path": "tolls.json"}}, base_dir=tmp_path
        )
        assert resolve_toll(config).values.tolist() == [0.5, 1.5]

    def test_zero_tail_toll_file(self, tmp_path):
        (tmp_path / "tolls.csv").write_text("1\n0\n2\n0\n")
        config = parse_config(
            {"branches": HALF_THIRD, "toll": {"kind": "file", "path": "tolls.csv", "zero_tail": True}},
            base_dir=tmp_path,
        )
        toll = resolve_toll(config)
        assert toll.support == 2
        assert toll.dense(6).tolist() == [1.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0]
        assert config.to_dict()["toll"]["zero_tail"] is True

    def test_zero_tail_must_be_boolean(self):
        with pytest.raises(ConfigParseError, match="zero_tail"):
            parse_config({"branches": HALF_THIRD, "toll": {"kind": "file", "path": "t.csv", "zero_tail": "yes"}})

    @pytest.mark.parametrize("content", ["{\"a\": 1}", "[\"x\"]"])
    def test_bad_json_toll_file(self, tmp_path, content):
        (tmp_path / "tolls.json").write_text(content)
        config = parse_config(
            {"branches": HALF_THIRD, "toll": {"kind": "file", "path": "tolls.json"}}, base_dir=tmp_path
        )
        with pytest.raises(ConfigParseError, match="does not hold numbers"):
            resolve_toll(config)


class TestResolveToll:
    @pytest.mark.parametrize(
        "toll,cls",
        [
            ({"kind": "impulse", "j": 3}, ImpulseToll),
            ({"kind": "prefix", "n0": 2}, PrefixToll),
            ({"kind": "constant", "value": 1}, ConstantToll),
        ],
    )
    def test_deterministic_kinds(self, toll, cls):
        assert isinstance(resolve_toll(parse_config({"branches": HALF_THIRD, "toll": toll})), cls)

    def test_driver_toll(self):
        config = parse_config(
            {"branches": HALF_THIRD, "toll": {"kind": "driver", "variant": "cauchy"}, "horizon": 20, "seed": 9}
        )
        assert config.driver().variant == CauchyStd()
        first = resolve_toll(config)
        assert len(first) == 21
        assert np.array_equal(first.values, resolve_toll(config).values)
        assert not np.array_equal(first.values, resolve_toll(config, replica=1).values)

    def test_non_driver_has_no_driver(self):
        assert parse_config(minimal()).driver() is None
