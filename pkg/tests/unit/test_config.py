import json
from unittest import TestCase

import pytest

from orthoqkd.analysis.models import BobInformation, ChiScope
from orthoqkd.attacks.params import AttackKind, LegSelection
from orthoqkd.cli.config import (
    OutputFormat,
    ScenarioCommand,
    ScenarioConfig,
    SuiteName,
    parse_config,
    serialize,
)
from orthoqkd.exceptions import ScenarioConfigError
from orthoqkd.protocols.base import ProtocolId


def _text(**kwargs):
    return json.dumps(kwargs)


class TestParseConfig(TestCase):
    def test_run_scenario_with_attack_aliases(self):
        config = parse_config(
            _text(
                command="run",
                protocol="DLL_GV",
                n=8,
                seed=3,
                attack={"kind": "symmetric_ng", "theta": 0.6, "lambda": 0.5},
            )
        )
        self.assertEqual(config.command, ScenarioCommand.run)
        self.assertEqual(config.protocol, ProtocolId.DLL_GV)
        self.assertEqual(config.attack.kind, AttackKind.symmetric_ng)
        self.assertEqual(config.attack.attacked_fraction, 0.5)

    def test_defaults(self):
        config = parse_config(_text(command="sweep", protocol="PP"))
        self.assertEqual(config.resolution, 200)
        self.assertEqual(config.formats, [OutputFormat.csv, OutputFormat.json])
        self.assertEqual(config.suites, list(SuiteName))
        self.assertEqual(config.interpretation.bob_information, BobInformation.bitwise)
        self.assertTrue(config.all_interpretations)

    def test_top_level_aliases(self):
        config = parse_config(
            _text(command="sweep", protocol="PP", out="results", format="json")
        )
        self.assertEqual(config.output_dir, "results")
        self.assertEqual(config.formats, [OutputFormat.json])

    def test_interpretation_and_string_flags(self):
        config = parse_config(
            _text(
                command="threshold",
                protocol="CL",
                interpretation={"bob_information": "symbol", "chi_scope": "qubit", "legs": "first"},
                all_interpretations="false",
            )
        )
        self.assertEqual(config.interpretation.chi_scope, ChiScope.qubit)
        self.assertEqual(config.interpretation.legs, LegSelection.first)
        self.assertFalse(config.all_interpretations)

    def test_overrides_apply_before_validation(self):
        config = parse_config(_text(command="suites"), {"seed": 11, "resolution": 60})
        self.assertEqual(config.seed, 11)
        self.assertEqual(config.resolution, 60)


@pytest.mark.parametrize(
    "raw,message",
    [
        ({"command": "run", "protocol": "PP", "n": 8}, "seed"),
        ({"command": "sweep"}, "protocol"),
        ({"command": "run", "protocol": "PP", "seed": 1, "colour": "red"}, "colour"),
        ({"command": "run", "protocol": "PP", "seed": 1, "attack": {"kind": "symmetric", "alpha": 1}}, "attack.alpha"),
        ({"command": "threshold", "protocol": "PP", "interpretation": {"mood": "x"}}, "interpretation.mood"),
        ({"command": "sweep", "protocol": "PP", "resolution": 1}, "resolution"),
        ({"command": "suites", "seed": 1, "samples": 0}, "samples"),
        ({"command": "sweep", "protocol": "PP", "formats": []}, "formats"),
    ],
)
def test_invalid_scenarios(raw, message):
    with pytest.raises(ScenarioConfigError) as excinfo:
        parse_config(json.dumps(raw))
    assert message in str(excinfo.value)


@pytest.mark.parametrize(
    "raw",
    [
        {"command": "run", "protocol": "DLL_GV", "seed": 1, "attack": {"kind": "symmetric_ng", "theta": 0.6, "lambda": 1.3}},
        {"command": "run", "protocol": "PP", "seed": 1, "n": 6},
        {"command": "launch", "protocol": "PP"},
        {"command": "sweep", "protocol": "BB84"},
        {"command": "sweep", "protocol": "PP", "formats": ["xml"]},
    ],
)
def test_rejected_values(raw):
    with pytest.raises(ScenarioConfigError):
        parse_config(json.dumps(raw))


def test_malformed_json_is_a_config_error():
    with pytest.raises(ScenarioConfigError):
        parse_config("{not json")
    with pytest.raises(ScenarioConfigError):
        parse_config("[1, 2]")


def test_serialize_round_trips():
    config = parse_config(
        _text(
            command="run",
            protocol="PP_GV",
            n=8,
            seed=42,
            attack={"kind": "symmetric", "theta": 0.3},
        )
    )
    again = parse_config(serialize(config))
    assert again == config
    assert again.config_hash == config.config_hash


def test_config_hash_tracks_content():
    first = parse_config(_text(command="run", protocol="PP", seed=1))
    second = parse_config(_text(command="run", protocol="PP", seed=2))
    assert first.config_hash != second.config_hash


def test_protocol_config_carries_run_options():
    config = ScenarioConfig.from_dict(
        {"command": "run", "protocol": "GV", "n": 16, "seed": 7, "mode": "qsdc", "jitter_slots": 2}
    )
    protocol_config = config.protocol_config()
    assert protocol_config.n == 16
    assert protocol_config.jitter_slots == 2
    assert str(protocol_config.mode) == "qsdc"
