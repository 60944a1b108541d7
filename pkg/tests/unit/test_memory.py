import numpy as np
import pytest

from orthoqkd.attacks.params import AttackKind, AttackParams
from orthoqkd.attacks.probes import probe_attack
from orthoqkd.exceptions import ProtocolError, RegisterSizeError
from orthoqkd.protocols.memory import ParticleMemory
from orthoqkd.qstate import BELL_BASIS, PAULI_X, PSI_PLUS, X_BASIS, Z_BASIS


@pytest.fixture
def memory():
    return ParticleMemory()


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def test_prepare_hands_out_sequential_ids(memory):
    assert memory.prepare(BELL_BASIS[PSI_PLUS]) == (0, 1)
    assert memory.prepare(Z_BASIS[0]) == (2,)
    assert len(memory) == 3
    assert 2 in memory


def test_state_of_respects_requested_order(memory):
    memory.prepare(Z_BASIS[0])
    memory.prepare(Z_BASIS[1])
    swapped = memory.state_of([1, 0])
    assert swapped.fidelity(BELL_BASIS[PSI_PLUS]) == pytest.approx(0.5)
    assert swapped.entries[2, 2].real == pytest.approx(1.0)


def test_apply_unitary_on_one_half(memory):
    first, second = memory.prepare(BELL_BASIS[PSI_PLUS])
    memory.apply_unitary(PAULI_X, [second])
    # X on the second qubit turns Psi+ into Phi+
    assert memory.state_of([first, second]).fidelity(BELL_BASIS[0]) == pytest.approx(1.0)


def test_measure_splits_the_group(memory, rng):
    first, second = memory.prepare(BELL_BASIS[PSI_PLUS])
    outcome = memory.measure([first], Z_BASIS, rng)
    partner = memory.state_of([second])
    assert partner.fidelity(Z_BASIS[1 - outcome]) == pytest.approx(1.0)


def test_replace_state_discards_correlations(memory):
    first, second = memory.prepare(BELL_BASIS[PSI_PLUS])
    memory.replace_state(second, X_BASIS[0])
    joint = memory.state_of([first, second])
    assert joint.purity() == pytest.approx(0.5)
    assert memory.state_of([second]).fidelity(X_BASIS[0]) == pytest.approx(1.0)


def test_replace_with_mixed(memory):
    (particle,) = memory.prepare(Z_BASIS[0])
    memory.replace_with_mixed(particle)
    assert memory.state_of([particle]).purity() == pytest.approx(0.5)


def test_discard_removes_particles(memory):
    first, second = memory.prepare(BELL_BASIS[PSI_PLUS])
    memory.discard([first])
    assert first not in memory
    assert second in memory
    with pytest.raises(ProtocolError):
        memory.state_of([first])


def test_attack_traces_the_probe_out(memory):
    first, second = memory.prepare(BELL_BASIS[PSI_PLUS])
    params = AttackParams(kind=AttackKind.symmetric_ng, theta=0.8)
    record = memory.attack(second, lambda state, target: probe_attack(state, params, target), "first")
    assert record.particle_ids == (second,)
    assert record.leg == "first"
    assert memory.state_of([first, second]).num_qubits == 2
    assert memory.state_of([first, second]).fidelity(BELL_BASIS[PSI_PLUS]) < 1.0


def test_merging_past_the_register_cap_fails(memory):
    pairs = [memory.prepare(BELL_BASIS[PSI_PLUS]) for _ in range(3)]
    with pytest.raises(RegisterSizeError):
        memory.state_of([pid for pair in pairs for pid in pair])


def test_duplicate_ids_are_rejected(memory):
    (particle,) = memory.prepare(Z_BASIS[0])
    with pytest.raises(ProtocolError):
        memory.apply_unitary(np.eye(4), [particle, particle])
