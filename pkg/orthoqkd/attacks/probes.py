"""
Probe interactions: the conditional-probe unitary, the asymmetric four-vector probe and its
symmetric special case.

Probes that need four named vectors (eps0, eps1, E0, E1) live in a two-qubit register that
starts in |00>. The vectors are realised from their Gram matrix, so any overlap set with a
positive semidefinite Gram matrix can be built. The default set has vanishing cross
overlaps <eps_j|E_k> = 0, which is what keeps the interaction an isometry.
"""
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space

from orthoqkd.attacks.params import AttackKind, AttackParams, ProbeRecord
from orthoqkd.exceptions import AttackConfigError
from orthoqkd.qstate import (
    IDENTITY,
    NORM_TOLERANCE,
    PSD_TOLERANCE,
    DensityMatrix,
    QuantumState,
    StateVector,
    apply_unitary,
    ry,
    tensor,
)


PROBE_QUBITS = 2
PROBE_READY = StateVector.from_label("00")


def _check_unitary(matrix: np.ndarray, name: str) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise AttackConfigError(f"{name} must be a square matrix, got shape {matrix.shape}.")
    if np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))) > NORM_TOLERANCE:
        raise AttackConfigError(f"{name} is not unitary.")
    return matrix


def generic_probe_unitary(c0: np.ndarray, c1: np.ndarray) -> np.ndarray:
    """U = |0><0| (x) C0 + |1><1| (x) C1 on qubit (x) probe."""
    c0 = _check_unitary(c0, "C0")
    c1 = _check_unitary(c1, "C1")
    if c0.shape != c1.shape:
        raise AttackConfigError("C0 and C1 must act on the same probe space.")
    return np.kron(np.diag([1, 0]), c0) + np.kron(np.diag([0, 1]), c1)


def generic_probe_operators(overlap: float) -> Tuple[np.ndarray, np.ndarray]:
    """C0 = I and a Y rotation C1 with <0|C0^dag C1|0> = overlap on a one-qubit probe."""
    if abs(overlap) > 1.0:
        raise AttackConfigError(f"Probe overlap must have magnitude at most 1, got {overlap}.")
    return IDENTITY, ry(2.0 * np.arccos(overlap))


def gram_matrix(overlap_epsilon: float, overlap_e: float, cross: float = 0.0) -> np.ndarray:
    """Gram matrix of (eps0, eps1, E0, E1)."""
    return np.array(
        [
            [1.0, overlap_epsilon, cross, cross],
            [overlap_epsilon, 1.0, cross, cross],
            [cross, cross, 1.0, overlap_e],
            [cross, cross, overlap_e, 1.0],
        ],
        dtype=complex,
    )


def probe_vectors(gram: np.ndarray) -> np.ndarray:
    """
    Vectors whose pairwise inner products reproduce `gram`.

    Returns: one row per vector, each of length `gram.shape[0]`.
    """
    gram = np.asarray(gram, dtype=complex)
    values, vectors = np.linalg.eigh((gram + gram.conj().T) / 2)
    if values[0] < -PSD_TOLERANCE:
        raise AttackConfigError(
            f"Probe overlaps are unsatisfiable: Gram matrix has eigenvalue {values[0]:.3g}."
        )
    factor = vectors * np.sqrt(np.clip(values, 0.0, None))
    return factor.conj()


def _complete_isometry(columns: np.ndarray, positions: Sequence[int]) -> np.ndarray:
    dimension = columns.shape[0]
    gram = columns.conj().T @ columns
    if np.max(np.abs(gram - np.eye(columns.shape[1]))) > 1e-12:
        raise AttackConfigError("Probe interaction is not an isometry for these overlaps.")
    complement = null_space(columns.conj().T)
    unitary = np.zeros((dimension, dimension), dtype=complex)
    free = [index for index in range(dimension) if index not in positions]
    for column, position in enumerate(positions):
        unitary[:, position] = columns[:, column]
    for column, position in enumerate(free):
        unitary[:, position] = complement[:, column]
    return unitary


def _four_vector_unitary(
    stay: Tuple[float, float], flip: Tuple[float, float], vectors: np.ndarray
) -> np.ndarray:
    """
    |0>|E> -> stay0 |0>|eps0> + flip0 |1>|E0>
    |1>|E> -> stay1 |1>|eps1> + flip1 |0>|E1>
    completed to a unitary on qubit (x) two-qubit probe, with |E> = |00>.
    """
    eps0, eps1, big_e0, big_e1 = vectors
    zero, one = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    out0 = stay[0] * np.kron(zero, eps0) + flip[0] * np.kron(one, big_e0)
    out1 = stay[1] * np.kron(one, eps1) + flip[1] * np.kron(zero, big_e1)
    # |0>|00> is column 0 and |1>|00> is column 4
    return _complete_isometry(np.stack([out0, out1], axis=1), positions=[0, 4])


def symmetric_attack_unitary(
    theta: float, theta_prime: float, overlap_epsilon: float, overlap_e: float
) -> np.ndarray:
    vectors = probe_vectors(gram_matrix(overlap_epsilon, overlap_e))
    return _four_vector_unitary(
        stay=(np.cos(theta), np.cos(theta_prime)),
        flip=(np.sin(theta), np.sin(theta_prime)),
        vectors=vectors,
    )


def ng_unitary(theta: float) -> np.ndarray:
    """Symmetric single-qubit probe: amplitudes sqrt((1 +/- cos theta) / 2), overlaps cos theta."""
    if not np.isfinite(theta):
        raise AttackConfigError(f"theta must be finite, got {theta}.")
    cosine = float(np.clip(np.cos(theta), -1.0, 1.0))
    stay = np.sqrt((1.0 + cosine) / 2.0)
    flip = np.sqrt((1.0 - cosine) / 2.0)
    vectors = probe_vectors(gram_matrix(cosine, cosine))
    return _four_vector_unitary(stay=(stay, stay), flip=(flip, flip), vectors=vectors)


def flip_rate(theta: float) -> float:
    """Probability that one attacked qubit is flipped in the computational basis."""
    return (1.0 - np.cos(theta)) / 2.0


def probe_unitary(params: AttackParams) -> Tuple[np.ndarray, StateVector]:
    """
    Interaction unitary on qubit (x) probe for a probe-based attack, and the probe's ready state.
    """
    if params.kind == AttackKind.generic_probe:
        c0, c1 = generic_probe_operators(params.overlap_epsilon)  # type: ignore
        return generic_probe_unitary(c0, c1), StateVector.from_label("0")
    if params.kind == AttackKind.symmetric:
        unitary = symmetric_attack_unitary(
            params.theta, params.theta_prime, params.overlap_epsilon, params.overlap_e  # type: ignore
        )
        return unitary, PROBE_READY
    if params.kind == AttackKind.symmetric_ng:
        return ng_unitary(params.theta), PROBE_READY
    raise AttackConfigError(f"Attack kind '{params.kind}' does not use a probe.")


def interact(
    state: QuantumState, params: AttackParams, target: int = 0
) -> Tuple[DensityMatrix, Tuple[int, ...]]:
    """
    Attach a fresh probe after the last qubit of `state` and let it interact with `target`.

    Returns: the joint density matrix and the probe's qubit indices within it.
    """
    unitary, ready = probe_unitary(params)
    rho = state if isinstance(state, DensityMatrix) else state.to_density_matrix()
    joint = tensor(rho, ready.to_density_matrix())
    probe = tuple(range(rho.num_qubits, joint.num_qubits))
    joint = apply_unitary(joint, unitary, [target, *probe])
    return joint, probe


def probe_attack(
    state: QuantumState,
    params: AttackParams,
    target: int = 0,
    particle_ids: Optional[Tuple[int, ...]] = None,
) -> ProbeRecord:
    """Run any probe-based attack on qubit `target` of `state` and record the joint state."""
    joint, probe = interact(state, params, target)
    return ProbeRecord(
        kind=params.kind,
        particle_ids=particle_ids if particle_ids is not None else (target,),
        joint_state=joint,
        probe_qubits=probe,
    )


def symmetric_attack(
    state: QuantumState,
    params: AttackParams,
    rng: Optional[np.random.Generator] = None,
    target: int = 0,
    particle_ids: Optional[Tuple[int, ...]] = None,
) -> ProbeRecord:
    """
    Apply the asymmetric four-vector probe to qubit `target` of `state`.

    The interaction itself is deterministic; `rng` is accepted so every attack shares one
    call shape.
    """
    if params.kind not in (AttackKind.symmetric, AttackKind.symmetric_ng):
        raise AttackConfigError(f"symmetric_attack cannot run a '{params.kind}' attack.")
    return probe_attack(state, params, target, particle_ids)


def ng_attack(
    state: QuantumState,
    params: AttackParams,
    rng: np.random.Generator,
    target: int = 0,
    particle_ids: Optional[Tuple[int, ...]] = None,
) -> ProbeRecord:
    """
    Attack qubit `target` with a fresh symmetric probe with probability `attacked_fraction`.

    One uniform draw is taken from `rng` on every call. An unattacked record carries no
    particle ids and no joint state.
    """
    if params.kind != AttackKind.symmetric_ng:
        raise AttackConfigError(f"ng_attack cannot run a '{params.kind}' attack.")
    if rng.random() >= params.attacked_fraction:
        return ProbeRecord(kind=params.kind, particle_ids=())
    return probe_attack(state, params, target, particle_ids)
