"""
Exact attack models behind the security grids.

For every protocol family the symmetric probe interaction is evolved by brute force on a
raw amplitude vector: the Bell pair (or the GV qubit) plus one two-qubit probe register per
channel crossing. Every encoded symbol gets its own run, which yields

- the confusion matrix between sent and decoded symbols with the selected crossings attacked,
- Eve's probe state per symbol, and with it the Holevo bound of her ensemble.

An attacked fraction lambda enters as a convex mixture with the honest run.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from dbt.adapters.events.logging import AdapterLogger
from dbt_common.dataclass_schema import StrEnum, dbtClassMixin

from orthoqkd.analysis.measures import bob_information, eve_information
from orthoqkd.attacks.params import LegSelection
from orthoqkd.attacks.probes import PROBE_QUBITS, ng_unitary
from orthoqkd.exceptions import AnalysisError
from orthoqkd.protocols.base import ProtocolId
from orthoqkd.protocols.coding import decode_bell, encoding_operator
from orthoqkd.qstate import (
    BELL_BASIS,
    PSI_PLUS,
    X_BASIS,
    DensityMatrix,
    apply_operator,
    reduced_density,
)


logger = AdapterLogger("orthoqkd")


class BobInformation(StrEnum):
    bitwise = "bitwise"
    error_rate = "error_rate"
    symbol = "symbol"

    @classmethod
    def default(cls) -> "BobInformation":
        return cls("bitwise")


class ChiScope(StrEnum):
    symbol = "symbol"
    qubit = "qubit"

    @classmethod
    def default(cls) -> "ChiScope":
        return cls("symbol")


class LambdaMode(StrEnum):
    mixture = "mixture"

    @classmethod
    def default(cls) -> "LambdaMode":
        return cls("mixture")


@dataclass(frozen=True, eq=True, unsafe_hash=True)
class Interpretation(dbtClassMixin):
    """
    How Bob's and Eve's information are read off the attacked state.

    - bob_information: `bitwise` sums 1 - H2 over the per-bit marginal errors, `error_rate`
      scores every bit with the Bell error, `symbol` is the full mutual information of the
      confusion matrix under a uniform prior
    - chi_scope: Holevo bound per encoded symbol, or divided by the channel crossings
    - lambda_mode: the attacked fraction is always a convex mixture
    - legs: which channel crossings Eve attacks; GV has only the `first`
    """

    bob_information: BobInformation = field(default_factory=BobInformation.default)
    chi_scope: ChiScope = field(default_factory=ChiScope.default)
    lambda_mode: LambdaMode = field(default_factory=LambdaMode.default)
    legs: LegSelection = field(default_factory=LegSelection.default)

    @property
    def label(self) -> str:
        label = f"{self.bob_information}/{self.chi_scope}"
        if self.legs != LegSelection.both:
            label = f"{label}/{self.legs}"
        return label

    @classmethod
    def variants(cls) -> List["Interpretation"]:
        return [
            cls(bob_information=bob, chi_scope=scope, legs=legs)
            for legs in (LegSelection.both, LegSelection.first, LegSelection.second)
            for bob in BobInformation
            for scope in ChiScope
        ]


def symbols(protocol: ProtocolId) -> Tuple[str, ...]:
    if protocol.bits_per_use == 1:
        return ("0", "1")
    return ("00", "01", "10", "11")


def crossings(protocol: ProtocolId) -> int:
    return 1 if protocol == ProtocolId.GV else 2


def attacked_crossings(protocol: ProtocolId, legs: LegSelection = LegSelection.both) -> int:
    """Channel crossings Eve touches; at least 1 so the qubit-scope division stays defined."""
    if legs == LegSelection.both:
        return crossings(protocol)
    return 1


@dataclass(frozen=True, eq=False)
class AttackedModel:
    """Everything the grid needs about one protocol at one attack angle, with lambda = 1."""

    protocol: ProtocolId
    theta: float
    confusion: np.ndarray
    error: float
    chi: float
    pair_state: DensityMatrix
    probe_states: Tuple[DensityMatrix, ...]
    legs: LegSelection = LegSelection.both

    @property
    def symbols(self) -> Tuple[str, ...]:
        return symbols(self.protocol)

    @property
    def crossings(self) -> int:
        return attacked_crossings(self.protocol, self.legs)


def _bell_probabilities(rho: np.ndarray) -> np.ndarray:
    return np.array(
        [np.real(np.vdot(bell.amplitudes, rho @ bell.amplitudes)) for bell in BELL_BASIS]
    )


def _evolve_pair(
    protocol: ProtocolId, symbol: str, unitary: np.ndarray, legs: LegSelection = LegSelection.both
) -> np.ndarray:
    """
    Bell pair on qubits 0 and 1, first probe on 2-3, second probe on 4-5.

    two-way: qubit 1 travels out and back, picking up the encoding in between.
    two-step: qubit 0 crosses first; qubit 1 is encoded and then crosses.
    A crossing outside `legs` passes untouched and leaves its probe in the ready state.
    """
    amplitudes = np.zeros(2 ** (2 + 2 * PROBE_QUBITS), dtype=complex)
    amplitudes[:: 2 ** (2 * PROBE_QUBITS)] = BELL_BASIS[PSI_PLUS].amplitudes
    first = 1 if protocol.family == "two_way" else 0
    if legs.covers("first"):
        amplitudes = apply_operator(amplitudes, unitary, [first, 2, 3])
    amplitudes = apply_operator(amplitudes, encoding_operator(protocol, symbol), [1])
    if legs.covers("second"):
        amplitudes = apply_operator(amplitudes, unitary, [1, 4, 5])
    return amplitudes


def _pair_model(protocol: ProtocolId, theta: float, legs: LegSelection) -> AttackedModel:
    unitary = ng_unitary(theta)
    alphabet = symbols(protocol)
    confusion = np.zeros((len(alphabet), len(alphabet)))
    probe_states = []
    pair_state = None
    for row, symbol in enumerate(alphabet):
        amplitudes = _evolve_pair(protocol, symbol, unitary, legs)
        pair = reduced_density(amplitudes, [0, 1])
        for outcome, probability in enumerate(_bell_probabilities(pair)):
            confusion[row, alphabet.index(decode_bell(protocol, outcome))] += probability
        probe_states.append(DensityMatrix(reduced_density(amplitudes, [2, 3, 4, 5])))
        if row == 0:
            pair_state = DensityMatrix(pair)
    error = 1.0 - pair_state.fidelity(BELL_BASIS[PSI_PLUS])  # type: ignore
    chi = eve_information([(1.0 / len(alphabet), state) for state in probe_states])
    return AttackedModel(
        protocol=protocol,
        theta=theta,
        confusion=confusion,
        error=float(np.clip(error, 0.0, 1.0)),
        chi=chi,
        pair_state=pair_state,  # type: ignore
        probe_states=tuple(probe_states),
        legs=legs,
    )


def _single_model(theta: float, legs: LegSelection) -> AttackedModel:
    unitary = ng_unitary(theta if legs.covers("first") else 0.0)
    confusion = np.zeros((2, 2))
    probe_states = []
    states = []
    for row in range(2):
        amplitudes = np.zeros(2 ** (1 + PROBE_QUBITS), dtype=complex)
        amplitudes[:: 2**PROBE_QUBITS] = X_BASIS[row].amplitudes
        amplitudes = apply_operator(amplitudes, unitary, [0, 1, 2])
        qubit = reduced_density(amplitudes, [0])
        for outcome, basis_state in enumerate(X_BASIS):
            confusion[row, outcome] = np.real(
                np.vdot(basis_state.amplitudes, qubit @ basis_state.amplitudes)
            )
        states.append(DensityMatrix(qubit))
        probe_states.append(DensityMatrix(reduced_density(amplitudes, [1, 2])))
    error = float(np.clip(1.0 - np.trace(confusion) / 2.0, 0.0, 1.0))
    return AttackedModel(
        protocol=ProtocolId.GV,
        theta=theta,
        confusion=confusion,
        error=error,
        chi=eve_information([(0.5, state) for state in probe_states]),
        pair_state=states[0],
        probe_states=tuple(probe_states),
        legs=legs,
    )


@lru_cache(maxsize=4096)
def attacked_model(
    protocol: ProtocolId, theta: float, legs: LegSelection = LegSelection.both
) -> AttackedModel:
    """The lambda = 1 model of `protocol` at angle `theta`; cached per (protocol, theta, legs)."""
    legs = LegSelection(legs)
    logger.debug(f"Evolving the {protocol} attack model at theta={theta:.6f} ({legs} legs)")
    if protocol == ProtocolId.GV:
        return _single_model(theta, legs)
    return _pair_model(protocol, theta, legs)


def parse_protocol(protocol) -> ProtocolId:
    try:
        return ProtocolId(protocol)
    except ValueError:
        raise AnalysisError(f"Unknown protocol id: '{protocol}'")


@dataclass(frozen=True)
class CellValues:
    e: float
    bob: float
    chi: float

    @property
    def flag(self) -> int:
        return int(self.bob > self.chi)

    @property
    def gap(self) -> float:
        return self.bob - self.chi


def evaluate_row(
    model: AttackedModel, attacked_fractions: np.ndarray, interpretation: Interpretation
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(e, I_B, chi) for every attacked fraction at the model's angle."""
    fractions = np.asarray(attacked_fractions, dtype=float).reshape(-1)
    weights = fractions[:, None, None]
    confusion = weights * model.confusion + (1.0 - weights) * np.eye(len(model.symbols))
    e = fractions * model.error
    chi = fractions * model.chi
    if interpretation.chi_scope == ChiScope.qubit:
        chi = chi / model.crossings
    bob = bob_information(confusion, model.symbols, e, interpretation.bob_information)
    return e, np.atleast_1d(bob), chi


def evaluate_cell(
    model: AttackedModel, attacked_fraction: float, interpretation: Interpretation
) -> CellValues:
    e, bob, chi = evaluate_row(model, np.array([attacked_fraction]), interpretation)
    return CellValues(e=float(e[0]), bob=float(bob[0]), chi=float(chi[0]))


def ng_fidelity(theta: float) -> float:
    """Bell fidelity of a pair after two crossings under the symmetric probe, in either family."""
    return 0.25 * (1.0 + np.cos(theta) ** 2) ** 2
