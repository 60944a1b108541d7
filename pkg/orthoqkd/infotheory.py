"""
Classical and quantum information measures. Logarithms are base 2 throughout.
"""
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np
from scipy.special import entr
from scipy.stats import entropy

from orthoqkd.exceptions import MeasurementError, StateValidationError
from orthoqkd.qstate import (
    DensityMatrix,
    PAULI_Y,
    PSD_TOLERANCE,
    QuantumState,
    StateVector,
    partial_trace,
)


ArrayLike = Union[float, np.ndarray]

# magic basis: Phi+, i Phi-, i Psi+, Psi-
_MAGIC_BASIS = np.array(
    [
        [1, 0, 0, 1],
        [1j, 0, 0, -1j],
        [0, 1j, 1j, 0],
        [0, 1, -1, 0],
    ],
    dtype=complex,
) / np.sqrt(2)
_SPIN_FLIP = np.kron(PAULI_Y, PAULI_Y)


@dataclass(frozen=True, eq=False)
class ProbDist:
    probabilities: np.ndarray

    def __post_init__(self):
        probabilities = np.asarray(self.probabilities, dtype=float).reshape(-1)
        if probabilities.size == 0:
            raise StateValidationError("A probability distribution needs at least one entry.")
        if np.any(probabilities < 0):
            raise StateValidationError(f"Negative probability in {probabilities}.")
        if abs(probabilities.sum() - 1.0) > 1e-12:
            raise StateValidationError(f"Probabilities sum to {probabilities.sum()}, expected 1.")
        object.__setattr__(self, "probabilities", probabilities)

    @property
    def dimension(self) -> int:
        return self.probabilities.size


@dataclass(frozen=True)
class DualityPair:
    distinguishability: float
    coherence: float

    def __post_init__(self):
        for name in ("distinguishability", "coherence"):
            value = getattr(self, name)
            if not -PSD_TOLERANCE <= value <= 1 + PSD_TOLERANCE:
                raise StateValidationError(f"{name} must lie in [0, 1], got {value}.")
        if self.total > 1 + PSD_TOLERANCE:
            raise StateValidationError(f"P + C = {self.total} exceeds 1.")

    @property
    def total(self) -> float:
        return self.distinguishability + self.coherence


@dataclass(frozen=True)
class MonogamyTriple:
    e_ab: float
    e_ae: float
    e_abe: float

    @property
    def residual(self) -> float:
        """The 3-tangle read as the monogamy slack."""
        return self.e_abe - self.e_ab - self.e_ae

    @property
    def satisfied(self) -> bool:
        return self.e_ab + self.e_ae <= self.e_abe + 1e-9


def _check_unit_interval(value: float, name: str) -> None:
    if not 0.0 <= value <= 1.0:
        raise MeasurementError(f"{name} must lie in [0, 1], got {value}.")


def binary_entropy(p: ArrayLike) -> ArrayLike:
    """H2(p), elementwise for arrays."""
    p = np.asarray(p, dtype=float)
    value = (entr(p) + entr(1.0 - p)) / np.log(2)
    return float(value) if value.ndim == 0 else value


def shannon_entropy(p: ProbDist) -> float:
    return float(entropy(p.probabilities, base=2))


def entropic_knowledge(p: ProbDist) -> float:
    """Relative entropy of `p` to the uniform distribution, log2(d) - H(p)."""
    return float(np.log2(p.dimension) - shannon_entropy(p))


def von_neumann_entropy(rho: QuantumState) -> float:
    if isinstance(rho, StateVector):
        return 0.0
    eigenvalues = rho.eigenvalues()
    return float(np.sum(entr(eigenvalues)) / np.log(2))


def holevo_bound(ensemble: Sequence[Tuple[float, DensityMatrix]]) -> float:
    if not ensemble:
        raise MeasurementError("The Holevo bound of an empty ensemble is undefined.")
    weights = ProbDist(np.array([weight for weight, _ in ensemble]))
    dimension = ensemble[0][1].dimension
    if any(rho.dimension != dimension for _, rho in ensemble):
        raise MeasurementError("Ensemble states do not share one dimension.")
    average = DensityMatrix.mixture(list(zip(weights.probabilities, (rho for _, rho in ensemble))))
    conditional = sum(
        weight * von_neumann_entropy(rho) for weight, (_, rho) in zip(weights.probabilities, ensemble)
    )
    return max(0.0, von_neumann_entropy(average) - conditional)


def mutual_information_binary(e: float) -> float:
    """Capacity-style information of a binary symmetric channel with flip rate `e`."""
    _check_unit_interval(e, "error rate")
    return 1.0 - binary_entropy(e)


def duality_quantities(u: StateVector, d: StateVector) -> DualityPair:
    """
    Distinguishability and coherence of two pure probe states.

    P is the success rate of unambiguous discrimination, 1 - |<u|d>|, and C = |<u|d>|.
    """
    if u.dimension != d.dimension:
        raise MeasurementError("Probe states must share one dimension.")
    overlap = min(1.0, abs(u.inner(d)))
    return DualityPair(distinguishability=1.0 - overlap, coherence=overlap)


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh((matrix + matrix.conj().T) / 2)
    return (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.conj().T


def root_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann root fidelity Tr|sqrt(rho) sqrt(sigma)|; equals |<u|d>| for pure states."""
    if rho.dimension != sigma.dimension:
        raise MeasurementError("Fidelity between states of different dimension.")
    root = _psd_sqrt(rho.entries)
    inner = root @ sigma.entries @ root
    values = np.clip(np.linalg.eigvalsh((inner + inner.conj().T) / 2), 0.0, None)
    return float(min(1.0, np.sum(np.sqrt(values))))


def duality_quantities_mixed(rho_r: DensityMatrix, c0: np.ndarray, c1: np.ndarray) -> DualityPair:
    """
    Duality pair for a probe that starts in a mixed state `rho_r`.

    The probe ends in C0 rho C0^dag or C1 rho C1^dag; P is one minus their root fidelity,
    C is |Tr(rho C0^dag C1)|.
    """
    c0, c1 = np.asarray(c0, dtype=complex), np.asarray(c1, dtype=complex)
    if c0.shape != rho_r.entries.shape or c1.shape != rho_r.entries.shape:
        raise MeasurementError("Probe operators must match the probe dimension.")
    rho_u = DensityMatrix(c0 @ rho_r.entries @ c0.conj().T)
    rho_d = DensityMatrix(c1 @ rho_r.entries @ c1.conj().T)
    coherence = min(1.0, abs(np.trace(rho_r.entries @ c0.conj().T @ c1)))
    return DualityPair(
        distinguishability=1.0 - root_fidelity(rho_u, rho_d),
        coherence=float(coherence),
    )


def _two_qubit(state: QuantumState, name: str) -> None:
    if state.num_qubits != 2:
        raise MeasurementError(f"{name} is defined for two qubits, got {state.num_qubits}.")


def concurrence_pure(psi: StateVector) -> float:
    """|sum_j alpha_j^2| with alpha_j the amplitudes in the magic (phased Bell) basis."""
    _two_qubit(psi, "concurrence_pure")
    alphas = _MAGIC_BASIS.conj() @ psi.amplitudes
    return float(abs(np.sum(alphas**2)))


def concurrence_spin_flip(psi: StateVector) -> float:
    """|<psi*| sigma_y sigma_y |psi>|, the reference form of the pure-state concurrence."""
    _two_qubit(psi, "concurrence_spin_flip")
    return float(abs(psi.amplitudes @ _SPIN_FLIP @ psi.amplitudes))


def entanglement_of_formation(c: float) -> float:
    _check_unit_interval(c, "concurrence")
    return binary_entropy(0.5 + 0.5 * np.sqrt(1.0 - c**2))


def concurrence(rho: QuantumState) -> float:
    """Wootters concurrence of a two-qubit state, pure or mixed."""
    _two_qubit(rho, "concurrence")
    if isinstance(rho, StateVector):
        rho = rho.to_density_matrix()
    root = _psd_sqrt(rho.entries)
    flipped = _SPIN_FLIP @ rho.entries.conj() @ _SPIN_FLIP
    product = root @ flipped @ root
    values = np.sqrt(np.clip(np.linalg.eigvalsh((product + product.conj().T) / 2), 0.0, None))
    values = np.sort(values)[::-1]
    return float(max(0.0, values[0] - values[1] - values[2] - values[3]))


def tangle(rho: QuantumState) -> float:
    return concurrence(rho) ** 2


def _single_qubit_tangle(rho_a: DensityMatrix) -> float:
    """4 det(rho_A): the tangle between qubit A and the rest of a pure state."""
    return float(min(1.0, max(0.0, 4.0 * np.linalg.det(rho_a.entries).real)))


def three_tangle(psi: StateVector) -> float:
    """
    Residual tripartite entanglement of a pure three-qubit state.

    Defined as tau(A:BC) - tau(AB) - tau(AC), with tau(A:BC) = 4 det(rho_A). Evaluated through
    Cayley's hyperdeterminant, which equals that difference for every pure state and stays exact
    where the spin-flip eigenvalues lose precision.
    """
    if psi.num_qubits != 3:
        raise MeasurementError(f"three_tangle is defined for three qubits, got {psi.num_qubits}.")
    a = psi.amplitudes.reshape(2, 2, 2)
    d1 = (
        a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2
        + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
        + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2
        + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2
    )
    d2 = (
        a[0, 0, 0] * a[1, 1, 1] * a[0, 1, 1] * a[1, 0, 0]
        + a[0, 0, 0] * a[1, 1, 1] * a[1, 0, 1] * a[0, 1, 0]
        + a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 0] * a[0, 0, 1]
        + a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1] * a[0, 1, 0]
        + a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0] * a[0, 0, 1]
        + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1]
    )
    d3 = (
        a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1]
        + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0]
    )
    return float(4.0 * abs(d1 - 2.0 * d2 + 4.0 * d3))


def monogamy_triple(psi: StateVector) -> MonogamyTriple:
    """Pairwise and one-versus-rest tangles of qubit A (index 0) in a pure three-qubit state."""
    if psi.num_qubits != 3:
        raise MeasurementError(f"monogamy_triple is defined for three qubits, got {psi.num_qubits}.")
    return MonogamyTriple(
        e_ab=tangle(partial_trace(psi, [0, 1])),
        e_ae=tangle(partial_trace(psi, [0, 2])),
        e_abe=_single_qubit_tangle(partial_trace(psi, [0])),
    )


def purity_measures(rho: QuantumState) -> Tuple[float, float]:
    if isinstance(rho, StateVector):
        return 1.0, 0.0
    purity = rho.purity()
    return purity, 1.0 - purity


def entanglement_trace_reading(psi_sp: StateVector, system: Sequence[int]) -> Tuple[float, float, float]:
    """
    Trace-based reading of system-probe entanglement for a pure joint state.

    Returns: (mixedness 1 - Tr rho_S^2, normalized 4 det rho_S for a single-qubit system
    or NaN otherwise, purity Tr rho_S^2).
    """
    rho_s = partial_trace(psi_sp, list(system))
    purity, mixedness = purity_measures(rho_s)
    determinant = _single_qubit_tangle(rho_s) if rho_s.num_qubits == 1 else float("nan")
    return mixedness, determinant, purity


def duality_monogamy_lhs(p: float) -> float:
    """H2(P/2) + H2((1 - P)/2) with the pure-state coherence C = 1 - P."""
    _check_unit_interval(p, "distinguishability")
    return binary_entropy(p / 2) + binary_entropy((1.0 - p) / 2)


def helstrom_success(rho_0: DensityMatrix, rho_1: DensityMatrix) -> float:
    """Optimal success probability for telling two equiprobable states apart."""
    if rho_0.dimension != rho_1.dimension:
        raise MeasurementError("Cannot discriminate states of different dimension.")
    difference = rho_0.entries - rho_1.entries
    trace_norm = np.sum(np.abs(np.linalg.eigvalsh((difference + difference.conj().T) / 2)))
    return float(min(1.0, 0.5 * (1.0 + 0.5 * trace_norm)))
