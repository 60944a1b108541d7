import numpy as np
import pytest

from orthoqkd.analysis.measures import (
    bit_errors,
    bob_information,
    error_rate,
    eve_information,
    symbol_information,
)
from orthoqkd.exceptions import AnalysisError, MeasurementError
from orthoqkd.infotheory import binary_entropy
from orthoqkd.qstate import BELL_BASIS, PSI_PLUS, DensityMatrix, Z_BASIS


TWO_BIT = ("00", "01", "10", "11")


def test_error_rate_accepts_index_or_state():
    rho = BELL_BASIS[PSI_PLUS].to_density_matrix()
    assert error_rate(rho, PSI_PLUS) == pytest.approx(0.0, abs=1e-12)
    assert error_rate(rho, BELL_BASIS[PSI_PLUS]) == pytest.approx(0.0, abs=1e-12)


def test_error_rate_of_maximally_mixed_pair():
    assert error_rate(DensityMatrix.maximally_mixed(2), PSI_PLUS) == pytest.approx(0.75)


def test_error_rate_needs_two_qubits():
    with pytest.raises(MeasurementError):
        error_rate(DensityMatrix.maximally_mixed(1), PSI_PLUS)


def test_eve_information_rejects_empty_ensemble():
    with pytest.raises(AnalysisError):
        eve_information([])


def test_eve_information_is_holevo_bound():
    ensemble = [(0.5, Z_BASIS[0].to_density_matrix()), (0.5, Z_BASIS[1].to_density_matrix())]
    assert eve_information(ensemble) == pytest.approx(1.0)


def test_bit_errors_separate_the_two_positions():
    confusion = np.eye(4)
    # symbol 00 read as 01 half the time: only the second bit flips
    confusion[0] = [0.5, 0.5, 0.0, 0.0]
    errors = bit_errors(confusion, TWO_BIT)
    assert errors == pytest.approx([0.0, 0.125])


def test_symbol_information_extremes():
    assert symbol_information(np.eye(4)) == pytest.approx(2.0)
    assert symbol_information(np.full((4, 4), 0.25)) == pytest.approx(0.0, abs=1e-12)


def test_bob_information_readings_agree_on_a_perfect_channel():
    for mode in ("bitwise", "error_rate", "symbol"):
        assert bob_information(np.eye(4), TWO_BIT, 0.0, mode) == pytest.approx(2.0)


def test_bob_information_error_rate_scales_with_bits():
    value = bob_information(np.eye(2), ("0", "1"), 0.11, "error_rate")
    assert value == pytest.approx(1.0 - binary_entropy(0.11))
    value = bob_information(np.eye(4), TWO_BIT, 0.11, "error_rate")
    assert value == pytest.approx(2.0 * (1.0 - binary_entropy(0.11)))


def test_bob_information_error_rate_never_rises_past_half():
    uniform = np.full((4, 4), 0.25)
    assert bob_information(uniform, TWO_BIT, 0.75, "error_rate") == pytest.approx(0.0, abs=1e-12)
    rates = np.linspace(0.0, 0.75, 31)
    values = bob_information(np.stack([uniform] * len(rates)), TWO_BIT, rates, "error_rate")
    assert np.all(np.diff(values) <= 1e-12)


def test_bob_information_supports_stacked_confusions():
    stack = np.stack([np.eye(2), np.full((2, 2), 0.5)])
    values = bob_information(stack, ("0", "1"), np.array([0.0, 0.5]), "bitwise")
    assert values == pytest.approx([1.0, 0.0], abs=1e-12)


def test_bob_information_rejects_unknown_reading():
    with pytest.raises(AnalysisError):
        bob_information(np.eye(2), ("0", "1"), 0.0, "holistic")
