"""
Eavesdropping checks run on sacrificed particles.

`verification_bb84` is the conjugate-coding check: both halves of a |Psi+> pair are measured
in one randomly chosen basis out of {0,1} and {+,-}. `verification_bell` is the single-basis
check of the reordering protocols: reunited pairs are measured in the Bell basis and should
all come out in |Psi+>.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from orthoqkd.analysis.threshold import default_bell_threshold
from orthoqkd.exceptions import ProtocolError
from orthoqkd.protocols.base import ProtocolConfig, ProtocolTranscript
from orthoqkd.protocols.memory import ParticleMemory
from orthoqkd.qstate import BELL_BASIS, PSI_PLUS, X_BASIS, Z_BASIS


_BASES = {"z": Z_BASIS, "x": X_BASIS}


@dataclass(frozen=True)
class CheckResult:
    checked: int
    mismatches: int

    @property
    def error_rate(self) -> float:
        return self.mismatches / self.checked if self.checked else 0.0


def verification_bb84(
    memory: ParticleMemory,
    pairs: Sequence[Tuple[int, int]],
    rng: np.random.Generator,
    measure_rngs: Optional[Tuple[np.random.Generator, np.random.Generator]] = None,
    transcript: Optional[ProtocolTranscript] = None,
    step: str = "check",
    parties: Tuple[str, str] = ("alice", "bob"),
) -> CheckResult:
    """
    Measure each (first, second) pair of |Psi+> halves in a shared random basis drawn from
    `rng`. Outcomes should disagree in {0,1} and agree in {+,-}.

    `measure_rngs` gives each party its own measurement stream; by default both use `rng`.
    """
    first_rng, second_rng = measure_rngs if measure_rngs is not None else (rng, rng)
    mismatches = 0
    for first, second in pairs:
        basis = "z" if rng.integers(2) == 0 else "x"
        first_outcome = memory.measure([first], _BASES[basis], first_rng)
        second_outcome = memory.measure([second], _BASES[basis], second_rng)
        if transcript is not None:
            transcript.measure(step, parties[0], [first], basis, first_outcome)
            transcript.measure(step, parties[1], [second], basis, second_outcome)
        agree = first_outcome == second_outcome
        if agree == (basis == "z"):
            mismatches += 1
    return CheckResult(checked=len(pairs), mismatches=mismatches)


def _check_pairing(memory: ParticleMemory, pairs: Sequence[Sequence[int]]) -> None:
    seen = set()
    for pair in pairs:
        if len(pair) != 2 or pair[0] == pair[1]:
            raise ProtocolError(f"Bell check needs pairs of two distinct particles, got {pair}.")
        for particle in pair:
            if particle in seen:
                raise ProtocolError(f"Particle {particle} appears in more than one check pair.")
            if particle not in memory:
                raise ProtocolError(f"Particle {particle} in check pair {pair} is not held.")
            seen.add(particle)


def verification_bell(
    memory: ParticleMemory,
    pairs: Sequence[Tuple[int, int]],
    rng: np.random.Generator,
    transcript: Optional[ProtocolTranscript] = None,
    step: str = "check",
    party: str = "alice",
) -> CheckResult:
    """Bell-measure every reunited pair; anything but |Psi+> counts as an error."""
    _check_pairing(memory, pairs)
    mismatches = 0
    for pair in pairs:
        outcome = memory.measure(list(pair), BELL_BASIS, rng)
        if transcript is not None:
            transcript.measure(step, party, list(pair), "bell", outcome)
        if outcome != PSI_PLUS:
            mismatches += 1
    return CheckResult(checked=len(pairs), mismatches=mismatches)


def resolve_bell_threshold(config: ProtocolConfig) -> float:
    if config.bell_threshold is not None:
        return config.bell_threshold
    return default_bell_threshold(config.protocol)
