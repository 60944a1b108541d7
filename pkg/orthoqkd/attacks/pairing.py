"""
Pairing-guess attack on reordered Bell pairs.

Eve sees a shuffled stream of particles and does not know which of them belong together.
She guesses a perfect matching, measures every guessed pair in the Bell basis and sends the
resulting Bell states on.
"""
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, List, Sequence, Tuple

import numpy as np

from dbt.adapters.events.logging import AdapterLogger

from orthoqkd.attacks.params import AttackKind, ProbeRecord
from orthoqkd.exceptions import AttackConfigError
from orthoqkd.qstate import BELL_BASIS, BELL_LABELS, MAX_QUBITS, PSI_PLUS, apply_operator

if TYPE_CHECKING:
    from orthoqkd.protocols.memory import ParticleMemory


logger = AdapterLogger("orthoqkd")

Pairing = Tuple[Tuple[int, int], ...]


def enumerate_pairings(m: int) -> List[Pairing]:
    """All perfect matchings of particles 0..m-1, each pair and the pairing sorted."""
    if m < 0 or m % 2:
        raise AttackConfigError(f"Cannot pair up {m} particles.")

    def _match(remaining: Tuple[int, ...]) -> List[Pairing]:
        if not remaining:
            return [()]
        first, rest = remaining[0], remaining[1:]
        matchings = []
        for index, partner in enumerate(rest):
            others = rest[:index] + rest[index + 1 :]
            for tail in _match(others):
                matchings.append(((first, partner),) + tail)
        return matchings

    return _match(tuple(range(m)))


@dataclass(frozen=True)
class PairingStatistics:
    n_pairs: int
    pairings: int
    success: Fraction
    detection_if_wrong: Fraction
    detection: Fraction

    def to_dict(self):
        return {
            "n_pairs": self.n_pairs,
            "pairings": self.pairings,
            "success": str(self.success),
            "detection_if_wrong": str(self.detection_if_wrong),
            "detection": str(self.detection),
        }


def _projector(vector: np.ndarray) -> np.ndarray:
    return np.outer(vector, vector.conj())


def _pass_probability(n_pairs: int, guess: Pairing) -> float:
    """Probability that every true pair is still found in Psi+ after Eve measures `guess`."""
    psi_plus = BELL_BASIS[PSI_PLUS].amplitudes
    amplitudes = psi_plus
    for _ in range(n_pairs - 1):
        amplitudes = np.kron(amplitudes, psi_plus)
    true_pairs = [(2 * index, 2 * index + 1) for index in range(n_pairs)]
    passed = 0.0
    for outcomes in itertools.product(range(4), repeat=n_pairs):
        branch = amplitudes
        for pair, outcome in zip(guess, outcomes):
            branch = apply_operator(branch, _projector(BELL_BASIS[outcome].amplitudes), pair)
        for pair in true_pairs:
            branch = apply_operator(branch, _projector(psi_plus), pair)
        passed += float(np.vdot(branch, branch).real)
    return passed


def _exact(value: float) -> Fraction:
    return Fraction(value).limit_denominator(10_000)


def pairing_statistics(n_pairs: int) -> PairingStatistics:
    """
    Exact success and detection probabilities for a uniformly guessing Eve, by enumerating
    every pairing and every Bell outcome. Limited to what fits in one register.
    """
    if not 1 <= 2 * n_pairs <= MAX_QUBITS:
        raise AttackConfigError(
            f"Exhaustive pairing statistics need 1 to {MAX_QUBITS // 2} pairs, got {n_pairs}."
        )
    pairings = enumerate_pairings(2 * n_pairs)
    truth = tuple((2 * index, 2 * index + 1) for index in range(n_pairs))
    detections = {guess: 1.0 - _pass_probability(n_pairs, guess) for guess in pairings}
    wrong = [detections[guess] for guess in pairings if guess != truth]
    return PairingStatistics(
        n_pairs=n_pairs,
        pairings=len(pairings),
        success=Fraction(1, len(pairings)),
        detection_if_wrong=_exact(sum(wrong) / len(wrong)) if wrong else Fraction(0),
        detection=_exact(sum(detections.values()) / len(pairings)),
    )


def guess_pairing(particle_ids: Sequence[int], rng: np.random.Generator) -> Pairing:
    """A uniformly random perfect matching: shuffle, then pair neighbours."""
    shuffled = [int(pid) for pid in rng.permutation(list(particle_ids))]
    return tuple(
        (shuffled[index], shuffled[index + 1]) for index in range(0, len(shuffled) - 1, 2)
    )


def pairing_guess_attack(
    memory: "ParticleMemory", particle_ids: Sequence[int], rng: np.random.Generator
) -> ProbeRecord:
    """
    Guess a pairing of the shuffled particles, Bell-measure each guessed pair in memory and
    leave the measured Bell state in place of the originals.
    """
    guess = guess_pairing(particle_ids, rng)
    outcomes = [memory.measure(pair, BELL_BASIS, rng) for pair in guess]
    logger.debug(f"Pairing guess {list(guess)} gave Bell outcomes {outcomes}")
    return ProbeRecord(
        kind=AttackKind.pairing_guess,
        particle_ids=tuple(int(pid) for pid in particle_ids),
        details={
            "guessed_pairs": [list(pair) for pair in guess],
            "outcomes": [BELL_LABELS[outcome] for outcome in outcomes],
        },
    )
