import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from revex import jsonio


def test_floats_keep_17_digits():
    assert jsonio.format_float(0.1) == "0.10000000000000001"
    assert jsonio.format_float(1.0) == "1"
    with pytest.raises(ValueError):
        jsonio.format_float(math.nan)


def test_layout():
    text = jsonio.dumps({"a": [1, 2], "b": {"c": [{"d": None}]}, "e": True})
    assert text == '{\n  "a": [1, 2],\n  "b": {\n    "c": [\n      {"d": null}\n    ]\n  },\n  "e": true\n}\n'


def test_numpy_scalars():
    assert jsonio.dumps_line([np.float64(0.5), np.int64(3)]) == "[0.5, 3]"


def test_atomic_write_leaves_no_temp(tmp_path):
    target = tmp_path / "sub" / "x.json"
    jsonio.write_json(target, {"k": 1})
    assert jsonio.read_json(target) == {"k": 1}
    assert [p.name for p in target.parent.iterdir()] == ["x.json"]


json_values = st.recursive(
    st.none() | st.booleans() | st.integers() | st.floats(allow_nan=False, allow_infinity=False)
    | st.text(),
    lambda children: st.lists(children, max_size=4) | st.dictionaries(st.text(), children, max_size=4),
    max_leaves=20,
)


@given(json_values)
def test_round_trip(value):
    assert json.loads(jsonio.dumps(value)) == value
    assert json.loads(jsonio.dumps_line(value)) == value
