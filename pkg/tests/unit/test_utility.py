import json

import numpy as np
import pytest

from orthoqkd.utility import (
    config_hash,
    draw_seed,
    dumps,
    evaluate_bool,
    spawn_generators,
    stable_float,
    stable_json,
)


@pytest.mark.parametrize("value,expected", [(True, True), ("yes", True), (" FALSE ", False), (None, False)])
def test_evaluate_bool(value, expected):
    assert evaluate_bool(value) is expected


def test_evaluate_bool_rejects_other_values():
    with pytest.raises(ValueError):
        evaluate_bool("maybe")
    with pytest.raises(TypeError):
        evaluate_bool(1)


def test_spawned_streams_are_independent_of_later_names():
    short = spawn_generators(5, ["alice", "bob"])
    longer = spawn_generators(5, ["alice", "bob", "eve"])
    assert short["bob"].random() == longer["bob"].random()
    assert short["alice"].random() != short["bob"].random()


def test_draw_seed_is_reproducible():
    assert draw_seed(np.random.default_rng(1)) == draw_seed(np.random.default_rng(1))


def test_stable_json_normalises_numpy_values():
    value = stable_json({"a": np.float64(0.1 + 0.2), "b": np.arange(2), "c": np.bool_(True)})
    assert value == {"a": 0.3, "b": [0, 1], "c": True}
    assert stable_float(1 / 3, digits=3) == 0.333


def test_dumps_sorts_keys():
    assert list(json.loads(dumps({"b": 1, "a": 2}))) == ["a", "b"]


def test_config_hash_ignores_key_order():
    assert config_hash({"a": 1, "b": [1.0]}) == config_hash({"b": [1.0], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})
