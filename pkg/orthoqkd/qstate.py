"""
Dense linear algebra for registers of up to four qubits.

Qubit 0 is always the leftmost tensor factor: the amplitude of |q0 q1 ... q(n-1)> sits at
index sum(q_i * 2 ** (n - 1 - i)). Every operation here follows that convention, including
the raw-array helpers (`apply_operator`, `reduced_density`) that the analysis sweeps use on
registers wider than `MAX_QUBITS`.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
from scipy.stats import unitary_group

from orthoqkd.exceptions import MeasurementError, RegisterSizeError, StateValidationError


MAX_QUBITS = 4
NORM_TOLERANCE = 1e-12
PSD_TOLERANCE = 1e-10


def _num_qubits(dimension: int) -> int:
    num_qubits = int(dimension).bit_length() - 1
    if dimension < 2 or 2**num_qubits != dimension:
        raise RegisterSizeError(f"Dimension {dimension} is not a power of two of at least 2.")
    if num_qubits > MAX_QUBITS:
        raise RegisterSizeError(
            f"A {num_qubits}-qubit register exceeds the {MAX_QUBITS}-qubit limit."
        )
    return num_qubits


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        _num_qubits(amplitudes.size)
        norm = np.linalg.norm(amplitudes)
        if abs(norm**2 - 1.0) > NORM_TOLERANCE:
            raise StateValidationError(f"State vector has squared norm {norm ** 2}, expected 1.")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def num_qubits(self) -> int:
        return _num_qubits(self.amplitudes.size)

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    @classmethod
    def from_unnormalized(cls, amplitudes: Sequence[complex]) -> "StateVector":
        amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amplitudes)
        if norm == 0:
            raise StateValidationError("Cannot normalize the zero vector.")
        return cls(amplitudes / norm)

    @classmethod
    def from_label(cls, label: str) -> "StateVector":
        """
        Build a product state from single-qubit labels: "0", "1", "+" and "-".

        Example: from_label("0+") is |0> tensor |+>.
        """
        factors = {
            "0": np.array([1, 0], dtype=complex),
            "1": np.array([0, 1], dtype=complex),
            "+": np.array([1, 1], dtype=complex) / np.sqrt(2),
            "-": np.array([1, -1], dtype=complex) / np.sqrt(2),
        }
        try:
            vectors = [factors[symbol] for symbol in label]
        except KeyError as exc:
            raise StateValidationError(f"Unknown single-qubit label in '{label}'") from exc
        amplitudes = vectors[0]
        for vector in vectors[1:]:
            amplitudes = np.kron(amplitudes, vector)
        return cls(amplitudes)

    def inner(self, other: "StateVector") -> complex:
        """<self|other>"""
        if other.dimension != self.dimension:
            raise MeasurementError("Inner product between states of different dimension.")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise StateValidationError(f"Density matrix must be square, got shape {entries.shape}.")
        _num_qubits(entries.shape[0])
        if np.max(np.abs(entries - entries.conj().T)) > NORM_TOLERANCE:
            raise StateValidationError("Density matrix is not Hermitian.")
        trace = np.trace(entries).real
        if abs(trace - 1.0) > NORM_TOLERANCE:
            raise StateValidationError(f"Density matrix has trace {trace}, expected 1.")
        entries = (entries + entries.conj().T) / 2
        smallest = np.linalg.eigvalsh(entries)[0]
        if smallest < -PSD_TOLERANCE:
            raise StateValidationError(
                f"Density matrix is not positive semidefinite (eigenvalue {smallest})."
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def num_qubits(self) -> int:
        return _num_qubits(self.entries.shape[0])

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def maximally_mixed(cls, num_qubits: int) -> "DensityMatrix":
        dimension = 2**num_qubits
        return cls(np.eye(dimension, dtype=complex) / dimension)

    @classmethod
    def from_unnormalized(cls, entries: np.ndarray) -> "DensityMatrix":
        entries = np.asarray(entries, dtype=complex)
        trace = np.trace(entries).real
        if trace <= 0:
            raise StateValidationError("Cannot normalize a matrix with non-positive trace.")
        return cls(entries / trace)

    @classmethod
    def mixture(cls, weighted: Sequence[Tuple[float, "DensityMatrix"]]) -> "DensityMatrix":
        if not weighted:
            raise StateValidationError("A mixture needs at least one component.")
        total = sum(weight * rho.entries for weight, rho in weighted)
        return cls(total)

    def eigenvalues(self) -> np.ndarray:
        return np.clip(np.linalg.eigvalsh(self.entries), 0.0, None)

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def fidelity(self, state: StateVector) -> float:
        """<psi|rho|psi> for a pure reference state."""
        if state.dimension != self.dimension:
            raise MeasurementError("Fidelity between states of different dimension.")
        return float(np.real(np.vdot(state.amplitudes, self.entries @ state.amplitudes)))


QuantumState = Union[StateVector, DensityMatrix]
S = TypeVar("S", StateVector, DensityMatrix)


@dataclass(frozen=True, eq=False)
class Povm:
    elements: Tuple[np.ndarray, ...]

    def __post_init__(self):
        elements = tuple(np.asarray(element, dtype=complex) for element in self.elements)
        if not elements:
            raise StateValidationError("A POVM needs at least one element.")
        dimension = elements[0].shape[0]
        for element in elements:
            if element.shape != (dimension, dimension):
                raise StateValidationError("POVM elements must share one square dimension.")
            if np.max(np.abs(element - element.conj().T)) > PSD_TOLERANCE:
                raise StateValidationError("POVM element is not Hermitian.")
            if np.linalg.eigvalsh(element)[0] < -PSD_TOLERANCE:
                raise StateValidationError("POVM element is not positive semidefinite.")
        if np.max(np.abs(sum(elements) - np.eye(dimension))) > PSD_TOLERANCE:
            raise StateValidationError("POVM elements do not sum to the identity.")
        object.__setattr__(self, "elements", elements)

    @property
    def dimension(self) -> int:
        return self.elements[0].shape[0]

    @classmethod
    def unambiguous(cls, u: StateVector, d: StateVector) -> "Povm":
        """
        Optimal unambiguous discrimination of two pure states.

        Returns (M_a, M_b, M_0): M_a only fires on |u>, M_b only on |d>, M_0 is inconclusive
        and also absorbs everything outside span{|u>, |d>}.
        """
        if u.dimension != d.dimension:
            raise MeasurementError("Cannot discriminate states of different dimension.")
        overlap = u.inner(d)
        magnitude = abs(overlap)
        dimension = u.dimension
        zero = np.zeros((dimension, dimension), dtype=complex)
        if magnitude > 1.0 - NORM_TOLERANCE:
            return cls((zero, zero, np.eye(dimension, dtype=complex)))
        # component of |u> orthogonal to |d>, and vice versa
        d_perp = u.amplitudes - np.conj(overlap) * d.amplitudes
        u_perp = d.amplitudes - overlap * u.amplitudes
        d_perp = d_perp / np.linalg.norm(d_perp)
        u_perp = u_perp / np.linalg.norm(u_perp)
        m_a = np.outer(d_perp, d_perp.conj()) / (1.0 + magnitude)
        m_b = np.outer(u_perp, u_perp.conj()) / (1.0 + magnitude)
        m_0 = np.eye(dimension, dtype=complex) - m_a - m_b
        return cls((m_a, m_b, (m_0 + m_0.conj().T) / 2))

    def probabilities(self, state: QuantumState) -> np.ndarray:
        rho = _as_density(state)
        if rho.dimension != self.dimension:
            raise MeasurementError(
                f"POVM of dimension {self.dimension} applied to a state of dimension {rho.dimension}."
            )
        probabilities = np.array([np.real(np.trace(element @ rho.entries)) for element in self.elements])
        return np.clip(probabilities, 0.0, None)


@dataclass(frozen=True)
class PermutationMap:
    """Bijection on particle positions: the element at position i moves to mapping[i]."""

    mapping: Tuple[int, ...]
    seed: Optional[int] = None

    def __post_init__(self):
        mapping = tuple(int(index) for index in self.mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise StateValidationError(f"Permutation {mapping} is not a bijection.")
        object.__setattr__(self, "mapping", mapping)

    @property
    def size(self) -> int:
        return len(self.mapping)

    @classmethod
    def identity(cls, size: int) -> "PermutationMap":
        return cls(tuple(range(size)))

    @classmethod
    def random(cls, size: int, seed: int) -> "PermutationMap":
        rng = np.random.default_rng(seed)
        return cls(tuple(int(index) for index in rng.permutation(size)), seed=seed)

    def inverse(self) -> "PermutationMap":
        inverse = [0] * self.size
        for source, target in enumerate(self.mapping):
            inverse[target] = source
        return PermutationMap(tuple(inverse), seed=self.seed)


# single-qubit gates
IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
I_TIMES_Y = 1j * PAULI_Y
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def ry(angle: float) -> np.ndarray:
    half = angle / 2
    return np.array([[np.cos(half), -np.sin(half)], [np.sin(half), np.cos(half)]], dtype=complex)


_SQRT_HALF = 1 / np.sqrt(2)

Z_BASIS: Tuple[StateVector, ...] = (StateVector.from_label("0"), StateVector.from_label("1"))
X_BASIS: Tuple[StateVector, ...] = (StateVector.from_label("+"), StateVector.from_label("-"))
# Phi+, Phi-, Psi+, Psi-
BELL_BASIS: Tuple[StateVector, ...] = (
    StateVector(np.array([1, 0, 0, 1]) * _SQRT_HALF),
    StateVector(np.array([1, 0, 0, -1]) * _SQRT_HALF),
    StateVector(np.array([0, 1, 1, 0]) * _SQRT_HALF),
    StateVector(np.array([0, 1, -1, 0]) * _SQRT_HALF),
)
BELL_LABELS: Tuple[str, ...] = ("phi+", "phi-", "psi+", "psi-")
PHI_PLUS, PHI_MINUS, PSI_PLUS, PSI_MINUS = range(4)


def _as_density(state: QuantumState) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, StateVector):
        return state.to_density_matrix()
    raise StateValidationError(f"Expected a StateVector or DensityMatrix, received {type(state)}")


def _check_targets(targets: Sequence[int], num_qubits: int) -> List[int]:
    targets = [int(target) for target in targets]
    if not targets:
        raise MeasurementError("At least one target qubit is required.")
    if len(set(targets)) != len(targets):
        raise MeasurementError(f"Target qubits {targets} are not distinct.")
    for target in targets:
        if not 0 <= target < num_qubits:
            raise MeasurementError(f"Qubit index {target} out of range for {num_qubits} qubits.")
    return targets


def _contract(tensor: np.ndarray, operator: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Apply `operator` to the given axes of a rank-n tensor of qubit legs."""
    k = len(axes)
    operator = operator.reshape([2] * (2 * k))
    result = np.tensordot(operator, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(result, list(range(k)), list(axes))


def apply_operator(amplitudes: np.ndarray, operator: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """
    Apply an operator to the target qubits of a raw amplitude vector of any width.

    No validation: callers are responsible for unitarity and normalisation.
    """
    num_qubits = int(np.log2(amplitudes.size))
    tensor = np.asarray(amplitudes).reshape([2] * num_qubits)
    return _contract(tensor, np.asarray(operator), list(targets)).reshape(-1)


def reduced_density(amplitudes: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix of a raw pure amplitude vector, kept qubits in the given order."""
    num_qubits = int(np.log2(amplitudes.size))
    keep = list(keep)
    traced = [qubit for qubit in range(num_qubits) if qubit not in keep]
    tensor = np.transpose(np.asarray(amplitudes).reshape([2] * num_qubits), keep + traced)
    matrix = tensor.reshape(2 ** len(keep), -1)
    return matrix @ matrix.conj().T


def _check_unitary(u: np.ndarray, num_targets: int) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    dimension = 2**num_targets
    if u.shape != (dimension, dimension):
        raise MeasurementError(f"Operator of shape {u.shape} does not act on {num_targets} qubit(s).")
    if np.max(np.abs(u.conj().T @ u - np.eye(dimension))) > NORM_TOLERANCE:
        raise StateValidationError("Operator is not unitary.")
    return u


def _apply_to_density(entries: np.ndarray, left: np.ndarray, targets: List[int]) -> np.ndarray:
    num_qubits = _num_qubits(entries.shape[0])
    tensor = entries.reshape([2] * (2 * num_qubits))
    tensor = _contract(tensor, left, targets)
    tensor = _contract(tensor, left.conj(), [num_qubits + target for target in targets])
    return tensor.reshape(entries.shape)


def tensor(a: S, b: S) -> S:
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.entries, b.entries))
    raise StateValidationError(
        f"Cannot tensor a {type(a).__name__} with a {type(b).__name__}; convert one operand first."
    )


def apply_unitary(state: S, u: np.ndarray, targets: Sequence[int]) -> S:
    targets = _check_targets(targets, state.num_qubits)
    u = _check_unitary(u, len(targets))
    if isinstance(state, StateVector):
        return StateVector(apply_operator(state.amplitudes, u, targets))
    return DensityMatrix(_apply_to_density(state.entries, u, targets))


def partial_trace(rho: QuantumState, keep: Sequence[int]) -> DensityMatrix:
    """
    Reduced state on the `keep` qubits, which appear in the order given.
    """
    rho = _as_density(rho)
    num_qubits = rho.num_qubits
    if not keep:
        raise MeasurementError("partial_trace needs at least one qubit to keep.")
    keep = _check_targets(keep, num_qubits)
    traced = [qubit for qubit in range(num_qubits) if qubit not in keep]
    order = keep + traced
    tensor = rho.entries.reshape([2] * (2 * num_qubits))
    tensor = np.transpose(tensor, order + [num_qubits + qubit for qubit in order])
    kept_dim, traced_dim = 2 ** len(keep), 2 ** len(traced)
    tensor = tensor.reshape(kept_dim, traced_dim, kept_dim, traced_dim)
    return DensityMatrix(np.einsum("ajbj->ab", tensor))


def _basis_matrix(basis: Union[Sequence[StateVector], np.ndarray]) -> np.ndarray:
    if isinstance(basis, np.ndarray):
        rows = np.asarray(basis, dtype=complex)
    else:
        rows = np.array([vector.amplitudes for vector in basis], dtype=complex)
    if rows.ndim != 2 or rows.shape[0] != rows.shape[1]:
        raise MeasurementError("A measurement basis must hold exactly `dimension` vectors.")
    if np.max(np.abs(rows.conj() @ rows.T - np.eye(rows.shape[0]))) > PSD_TOLERANCE:
        raise MeasurementError("Measurement basis is not orthonormal.")
    return rows


def _draw(probabilities: np.ndarray, rng: np.random.Generator) -> int:
    probabilities = np.clip(probabilities, 0.0, None)
    cumulative = np.cumsum(probabilities)
    draw = rng.random() * cumulative[-1]
    outcome = int(np.searchsorted(cumulative, draw, side="right"))
    return min(outcome, len(probabilities) - 1)


def born_probabilities(
    state: QuantumState,
    basis: Union[Sequence[StateVector], np.ndarray],
    targets: Optional[Sequence[int]] = None,
) -> np.ndarray:
    rows = _basis_matrix(basis)
    targets = list(range(state.num_qubits)) if targets is None else list(targets)
    targets = _check_targets(targets, state.num_qubits)
    if rows.shape[0] != 2 ** len(targets):
        raise MeasurementError(
            f"Basis of dimension {rows.shape[0]} does not match {len(targets)} target qubit(s)."
        )
    probabilities = []
    for row in rows:
        projector = np.outer(row, row.conj())
        if isinstance(state, StateVector):
            projected = apply_operator(state.amplitudes, projector, targets)
            probabilities.append(float(np.vdot(projected, projected).real))
        else:
            projected = _apply_to_density(state.entries, projector, targets)
            probabilities.append(float(np.trace(projected).real))
    return np.clip(np.array(probabilities), 0.0, None)


def measure_projective(
    state: S,
    basis: Union[Sequence[StateVector], np.ndarray],
    rng: np.random.Generator,
    targets: Optional[Sequence[int]] = None,
) -> Tuple[int, S]:
    """
    Projective measurement of `targets` (all qubits by default) in an orthonormal basis.

    Exactly one uniform draw is taken from `rng` per call, whatever the state, so parties
    sharing a stream stay in lockstep between honest and disturbed runs.

    Returns: the outcome index into `basis` and the normalized post-measurement state.
    """
    rows = _basis_matrix(basis)
    targets = list(range(state.num_qubits)) if targets is None else list(targets)
    probabilities = born_probabilities(state, rows, targets)
    outcome = _draw(probabilities, rng)
    projector = np.outer(rows[outcome], rows[outcome].conj())
    if isinstance(state, StateVector):
        projected = apply_operator(state.amplitudes, projector, targets)
        return outcome, StateVector.from_unnormalized(projected)
    projected = _apply_to_density(state.entries, projector, targets)
    return outcome, DensityMatrix.from_unnormalized(projected)


def measure_povm(rho: QuantumState, povm: Povm, rng: np.random.Generator) -> int:
    return _draw(povm.probabilities(rho), rng)


def permute_particles(particles: Sequence, pi: PermutationMap) -> list:
    if len(particles) != pi.size:
        raise StateValidationError(
            f"Cannot permute {len(particles)} particles with a permutation of size {pi.size}."
        )
    permuted: list = [None] * pi.size
    for position, particle in enumerate(particles):
        permuted[pi.mapping[position]] = particle
    return permuted


def random_pure_state(num_qubits: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state: a normalized vector of independent complex Gaussians."""
    dimension = 2**num_qubits
    _num_qubits(dimension)
    amplitudes = rng.standard_normal(dimension) + 1j * rng.standard_normal(dimension)
    return StateVector.from_unnormalized(amplitudes)


def random_density_matrix(num_qubits: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityMatrix:
    dimension = 2**num_qubits
    rank = dimension if rank is None else rank
    ginibre = rng.standard_normal((dimension, rank)) + 1j * rng.standard_normal((dimension, rank))
    return DensityMatrix.from_unnormalized(ginibre @ ginibre.conj().T)


def random_unitary(dimension: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(dimension, random_state=rng)
