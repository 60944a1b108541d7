import numpy as np
import pytest

from orthoqkd.analysis.grid import build_grid
from orthoqkd.analysis.models import BobInformation, ChiScope, Interpretation
from orthoqkd.analysis.threshold import (
    boundary_edges,
    default_bell_threshold,
    monotonicity_violations,
    threshold_table,
    tolerable_error,
)
from orthoqkd.protocols.base import ProtocolId


RESOLUTION = 200
TOLERANCE = 2e-3


def _e0(protocol, bob_information=BobInformation.bitwise, chi_scope=ChiScope.symbol):
    interpretation = Interpretation(bob_information=bob_information, chi_scope=chi_scope)
    return tolerable_error(build_grid(protocol, RESOLUTION, interpretation))


@pytest.mark.parametrize(
    "protocol,bob_information,chi_scope,expected",
    [
        (ProtocolId.PP, BobInformation.bitwise, ChiScope.symbol, 0.2558),
        (ProtocolId.PP, BobInformation.error_rate, ChiScope.symbol, 0.2034),
        (ProtocolId.CL, BobInformation.error_rate, ChiScope.symbol, 0.2034),
        (ProtocolId.CL, BobInformation.error_rate, ChiScope.qubit, 0.2600),
        (ProtocolId.DLL, BobInformation.bitwise, ChiScope.symbol, 0.2558),
        (ProtocolId.DLL, BobInformation.bitwise, ChiScope.qubit, 0.3406),
        (ProtocolId.CL_GV, BobInformation.symbol, ChiScope.symbol, 0.2719),
        (ProtocolId.CL_GV, BobInformation.symbol, ChiScope.qubit, 0.3618),
        (ProtocolId.PP, BobInformation.symbol, ChiScope.symbol, 0.2558),
    ],
)
def test_tolerable_error_rates(protocol, bob_information, chi_scope, expected):
    result = _e0(protocol, bob_information, chi_scope)
    assert result.finite
    assert result.e0 == pytest.approx(expected, abs=TOLERANCE)


@pytest.mark.parametrize("protocol", [ProtocolId.CL_GV, ProtocolId.DLL_GV])
def test_two_bit_reordering_variants_tolerate_about_a_quarter(protocol):
    result = _e0(protocol, BobInformation.symbol, ChiScope.symbol)
    assert abs(result.e0 - 0.267) <= 0.005


def test_reordering_variant_shares_the_attack_model():
    assert _e0(ProtocolId.PP_GV).e0 == pytest.approx(_e0(ProtocolId.PP).e0, abs=1e-9)


def test_threshold_lies_on_the_boundary():
    result = _e0(ProtocolId.PP)
    assert 0.0 < result.theta <= np.pi / 2
    assert 0.0 < result.attacked_fraction <= 1.0
    payload = result.to_dict()
    assert payload["label"] == "bitwise/symbol"
    assert payload["note"] is None


def test_boundary_edges_are_sorted_by_error():
    edges = boundary_edges(build_grid(ProtocolId.DLL, 50))
    assert edges
    lowest = [edge[0] for edge in edges]
    assert lowest == sorted(lowest)


def test_grid_without_boundary_has_no_finite_threshold():
    grid = build_grid(ProtocolId.PP, 50, theta_max=0.05)
    result = tolerable_error(grid)
    assert not result.finite
    assert result.to_dict()["note"] == "no finite threshold"


def test_monotonicity_violations_report_rows():
    violations = monotonicity_violations(build_grid(ProtocolId.PP, 50))
    for violation in violations:
        assert violation["sign_changes"] > 1
        assert 0.0 <= violation["lambda"] <= 1.0


def test_threshold_table_covers_every_combination():
    table = threshold_table([ProtocolId.GV, "PP"], resolution=50)
    assert len(table) == 2 * len(Interpretation.variants())
    assert {result.protocol for result in table} == {ProtocolId.GV, ProtocolId.PP}


def test_default_bell_threshold_uses_the_default_reading():
    assert default_bell_threshold(ProtocolId.PP_GV) == pytest.approx(0.2558, abs=5e-3)
