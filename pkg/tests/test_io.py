import json
from fractions import Fraction

import pytest
from hypothesis import given

from icx.conjugate import SeparableFunction
from icx.core import INF
from icx.functions import FiniteFunction
from icx.io import (InputError, instance_to_json, parse_bounds, parse_instance, parse_vector)
from icx.sets import DiscreteSet
from strategies import any_functions, small_sets


@given(small_sets())
def test_set_roundtrip(S):
    assert parse_instance(json.loads(json.dumps(instance_to_json(S)))) == S


@given(any_functions())
def test_function_roundtrip(f):
    g = parse_instance(json.loads(json.dumps(instance_to_json(f))))
    assert g.table == f.table and g.integer_valued == f.integer_valued


def test_separable_roundtrip():
    psi = SeparableFunction.of([(0, [0, 1, 1]), (-1, ["1/2"])])
    back = parse_instance(instance_to_json(psi))
    assert back == psi and back.pieces[1][1][0] == Fraction(1, 2)


def test_kind_is_inferred():
    assert isinstance(parse_instance({"points": [[0]]}), DiscreteSet)
    assert isinstance(parse_instance({"values": [{"x": [0], "f": "1"}]}), FiniteFunction)


@pytest.mark.parametrize("payload", [
    {"dim": 2, "points": [[0, 0], [1]]},
    {"dim": 3, "points": [[0, 0]]},
    {"dim": 1, "points": []},
    {"values": [{"x": [0], "f": "0.5"}]},
    {"values": [{"x": [0], "f": "1/0"}]},
    {"values": [{"x": [0]}]},
    {"values": [{"x": [0], "f": "1/2"}], "integer_valued": True},
    {"kind": "separable", "pieces": [{"lo": 0, "values": ["0", "1", "0"]}], "tag": "convex"},
    {"something": 1},
    [1, 2],
])
def test_malformed_payloads(payload):
    with pytest.raises(InputError):
        parse_instance(payload)


def test_vector_parsing():
    assert parse_vector("1/2,1") == (Fraction(1, 2), 1)
    assert parse_vector('["-1", 2]', integral=True) == (-1, 2)
    with pytest.raises(InputError):
        parse_vector("1/2", integral=True)
    with pytest.raises(InputError):
        parse_vector("")
    assert parse_bounds('["-inf", 3]') == (-INF, 3)
    assert parse_bounds("inf,-2") == (INF, -2)
