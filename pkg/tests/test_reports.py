import json

import jsonschema
import numpy as np
import pytest

from convsym.reports import SCHEMAS, clean, dumps, load_schema, validate
from convsym.suites import SUITES, run_suite
from convsym.tolerance import DEFAULT_TOL


def test_clean_maps_numpy_and_non_finite():
    obj = {"a": np.float64(np.inf), "b": np.arange(3), "c": (np.int64(2), np.bool_(True)), "d": float("nan")}
    assert clean(obj) == {"a": None, "b": [0, 1, 2], "c": [2, True], "d": None}


def test_dumps_is_sorted_and_stable():
    text = dumps({"b": 1.0, "a": [np.float32(0.5)]})
    assert text == '{\n  "a": [\n    0.5\n  ],\n  "b": 1.0\n}\n'
    assert json.loads(text) == {"a": [0.5], "b": 1.0}


@pytest.mark.parametrize("name", SCHEMAS)
def test_schemas_are_valid_draft_2020(name):
    jsonschema.Draft202012Validator.check_schema(load_schema(name))


def test_validate_rejects_missing_seed():
    with pytest.raises(jsonschema.ValidationError):
        validate({"metric": "busemann", "value": 1.0, "error_bar": 0.0}, "metric")


def test_suite_summary_validates_and_lists_every_property():
    out = run_suite("geometry", trials=2, seed=3, tol=DEFAULT_TOL)
    validate(out, "suite")
    assert out["passed"]
    assert {p["name"] for p in out["properties"]} == {fn.__name__.removeprefix("prop_") for fn in SUITES["geometry"]}


def test_suite_output_depends_only_on_seed():
    a = dumps(run_suite("star", trials=3, seed=11, tol=DEFAULT_TOL))
    b = dumps(run_suite("star", trials=3, seed=11, tol=DEFAULT_TOL))
    assert a == b


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope")


@pytest.mark.parametrize("name", sorted(SUITES))
def test_each_suite_passes(name):
    out = run_suite(name, trials=3, seed=0, tol=DEFAULT_TOL)
    failed = [p for p in out["properties"] if p["n_failed"]]
    assert out["passed"], failed
