import numpy as np
import pytest

from orthoqkd.attacks.params import AttackKind, AttackParams, LegSelection, ProbeRecord
from orthoqkd.attacks.probes import (
    PROBE_QUBITS,
    flip_rate,
    generic_probe_operators,
    generic_probe_unitary,
    gram_matrix,
    ng_attack,
    ng_unitary,
    probe_attack,
    probe_vectors,
    symmetric_attack,
    symmetric_attack_unitary,
)
from orthoqkd.exceptions import AttackConfigError
from orthoqkd.qstate import BELL_BASIS, PSI_PLUS, Z_BASIS, partial_trace


def test_attack_params_defaults():
    params = AttackParams(kind=AttackKind.symmetric, theta=0.4)
    assert params.theta_prime == 0.4
    assert params.overlap_epsilon == 0.0
    assert params.legs == LegSelection.both
    assert params.is_probe_attack


def test_ng_params_force_cosine_overlaps():
    params = AttackParams(kind=AttackKind.symmetric_ng, theta=0.6)
    assert params.overlap_epsilon == pytest.approx(np.cos(0.6))
    assert params.overlap_e == pytest.approx(np.cos(0.6))


def test_lambda_alias_is_translated():
    params = AttackParams.from_dict({"kind": "symmetric_ng", "theta": 0.6, "lambda": 0.25})
    assert params.attacked_fraction == 0.25


@pytest.mark.parametrize(
    "kwargs",
    [
        {"kind": AttackKind.symmetric, "attacked_fraction": 1.3},
        {"kind": AttackKind.symmetric, "theta": float("inf")},
        {"kind": AttackKind.symmetric, "overlap_epsilon": 1.5},
        {"kind": AttackKind.symmetric_ng, "theta": 0.6, "overlap_e": 0.1},
        {"kind": AttackKind.timing_delay, "delay_slots": -1},
    ],
)
def test_attack_params_validation(kwargs):
    with pytest.raises(AttackConfigError):
        AttackParams(**kwargs)


def test_leg_selection_covers():
    assert LegSelection.both.covers("first")
    assert LegSelection.second.covers("second")
    assert not LegSelection.second.covers("first")


@pytest.mark.parametrize("theta", [0.0, 0.3, 1.0, np.pi / 2, np.pi])
def test_ng_unitary_is_unitary(theta):
    unitary = ng_unitary(theta)
    assert unitary.shape == (2 ** (1 + PROBE_QUBITS),) * 2
    assert np.allclose(unitary.conj().T @ unitary, np.eye(8))


def test_ng_unitary_rejects_non_finite_angle():
    with pytest.raises(AttackConfigError):
        ng_unitary(float("nan"))


def test_symmetric_unitary_maps_ready_state_as_promised():
    theta = 0.7
    unitary = symmetric_attack_unitary(theta, theta, 0.3, 0.2)
    out0 = unitary[:, 0]
    # |0>|00> keeps the qubit with amplitude cos(theta)
    assert np.linalg.norm(out0[:4]) == pytest.approx(np.cos(theta))
    assert np.linalg.norm(out0[4:]) == pytest.approx(np.sin(theta))


def test_probe_vectors_reproduce_gram():
    gram = gram_matrix(0.4, -0.3)
    vectors = probe_vectors(gram)
    assert np.allclose(vectors.conj() @ vectors.T, gram)


def test_probe_vectors_reject_unsatisfiable_overlaps():
    with pytest.raises(AttackConfigError):
        probe_vectors(gram_matrix(0.0, 0.0, cross=0.9))


def test_generic_probe_overlap():
    c0, c1 = generic_probe_operators(0.5)
    assert (c0.conj().T @ c1)[0, 0].real == pytest.approx(0.5)
    unitary = generic_probe_unitary(c0, c1)
    assert np.allclose(unitary.conj().T @ unitary, np.eye(4))


def test_generic_probe_rejects_non_unitary_operator():
    with pytest.raises(AttackConfigError):
        generic_probe_unitary(np.eye(2), np.diag([1.0, 0.0]))


def test_flip_rate_matches_ng_unitary():
    theta = 1.1
    record = probe_attack(Z_BASIS[0], AttackParams(kind=AttackKind.symmetric_ng, theta=theta))
    qubit = partial_trace(record.joint_state, [0])
    assert qubit.entries[1, 1].real == pytest.approx(flip_rate(theta))


def test_probe_attack_records_probe_qubits():
    params = AttackParams(kind=AttackKind.symmetric, theta=0.5)
    record = symmetric_attack(BELL_BASIS[PSI_PLUS], params, target=1)
    assert record.probe_qubits == (2, 3)
    assert record.joint_state.num_qubits == 4
    assert record.probe_state().num_qubits == 2
    assert record.summary()["probe_purity"] <= 1.0


def test_symmetric_attack_refuses_other_kinds():
    with pytest.raises(AttackConfigError):
        symmetric_attack(Z_BASIS[0], AttackParams(kind=AttackKind.generic_probe))


def test_ng_attack_respects_attacked_fraction():
    params = AttackParams(kind=AttackKind.symmetric_ng, theta=0.5, attacked_fraction=0.0)
    record = ng_attack(Z_BASIS[0], params, np.random.default_rng(1))
    assert not record.attacked
    assert record.joint_state is None


def test_probe_record_summary_can_dump_matrices():
    params = AttackParams(kind=AttackKind.symmetric_ng, theta=0.5)
    record = ng_attack(Z_BASIS[0], params, np.random.default_rng(1))
    summary = record.summary(dump_matrices=True)
    assert summary["kind"] == "symmetric_ng"
    assert len(summary["joint_state"]["real"]) == 8


def test_unattacked_record_has_no_probe():
    assert ProbeRecord(kind=AttackKind.symmetric, particle_ids=()).probe_state() is None
