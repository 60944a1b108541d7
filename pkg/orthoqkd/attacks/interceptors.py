"""
Eavesdroppers that sit on the quantum channel.

The channel hands every particle crossing to the active eavesdropper. Each eavesdropper draws
only from its own generator, so the legitimate parties see the same random stream whether
or not anybody is listening.
"""
from typing import TYPE_CHECKING, List, Sequence

import numpy as np

from dbt.adapters.events.logging import AdapterLogger

from orthoqkd.attacks.pairing import pairing_guess_attack
from orthoqkd.attacks.params import (
    AttackKind,
    AttackParams,
    DummyMode,
    InterceptBasis,
    ProbeRecord,
)
from orthoqkd.attacks.probes import ng_attack, probe_attack, symmetric_attack
from orthoqkd.exceptions import AttackConfigError
from orthoqkd.qstate import X_BASIS, Z_BASIS

if TYPE_CHECKING:
    from orthoqkd.protocols.memory import ParticleMemory


logger = AdapterLogger("orthoqkd")


class Eavesdropper:
    params: AttackParams

    def __init__(self, params: AttackParams, rng: np.random.Generator) -> None:
        self.params = params
        self.rng = rng
        self.records: List[ProbeRecord] = []

    @property
    def kind(self) -> AttackKind:
        return self.params.kind

    def strikes(self) -> bool:
        return bool(self.rng.random() < self.params.attacked_fraction)

    def on_transit(
        self, memory: "ParticleMemory", particle_ids: Sequence[int], leg: str
    ) -> None:
        if not self.params.covers(leg):
            return
        for particle_id in particle_ids:
            record = self.attack_particle(memory, int(particle_id), leg)
            if record.attacked:
                self.records.append(record)

    def attack_particle(self, memory: "ParticleMemory", particle_id: int, leg: str) -> ProbeRecord:
        raise NotImplementedError(f"{type(self).__name__} does not attack single particles")

    def on_timed_transit(
        self, memory: "ParticleMemory", particle_id: int, honest_slot: int, scheduled_slot: int
    ) -> int:
        """
        Handle one timed GV packet and return the slot in which it reaches Bob.

        `honest_slot` is when an untouched packet arrives; `scheduled_slot` is the arrival
        Eve would predict from the public schedule alone.
        """
        self.on_transit(memory, [particle_id], "first")
        return honest_slot


class ProbeEavesdropper(Eavesdropper):
    """Entangles a fresh probe with every attacked particle."""

    def attack_particle(self, memory: "ParticleMemory", particle_id: int, leg: str) -> ProbeRecord:
        if self.kind == AttackKind.symmetric_ng:
            # the attacked-fraction draw happens inside ng_attack
            return memory.attack(
                particle_id,
                lambda state, target: ng_attack(state, self.params, self.rng, target),
                leg,
            )
        if not self.strikes():
            return ProbeRecord(kind=self.kind, particle_ids=())
        if self.kind == AttackKind.symmetric:
            return memory.attack(
                particle_id,
                lambda state, target: symmetric_attack(state, self.params, self.rng, target),
                leg,
            )
        return memory.attack(
            particle_id, lambda state, target: probe_attack(state, self.params, target), leg
        )


class InterceptResendEavesdropper(Eavesdropper):
    def attack_particle(self, memory: "ParticleMemory", particle_id: int, leg: str) -> ProbeRecord:
        if not self.strikes():
            return ProbeRecord(kind=self.kind, particle_ids=())
        basis = self.params.basis
        if basis == InterceptBasis.random:
            basis = InterceptBasis.z if self.rng.integers(2) == 0 else InterceptBasis.x
        measured_in = Z_BASIS if basis == InterceptBasis.z else X_BASIS
        outcome = memory.measure([particle_id], measured_in, self.rng)
        return ProbeRecord(
            kind=self.kind,
            particle_ids=(particle_id,),
            leg=leg,
            details={"basis": str(basis), "outcome": outcome},
        )


class PairingGuessEavesdropper(Eavesdropper):
    """Attacks a whole transmission at once; the attacked fraction gates each batch."""

    def on_transit(
        self, memory: "ParticleMemory", particle_ids: Sequence[int], leg: str
    ) -> None:
        if not self.params.covers(leg) or len(particle_ids) < 2 or not self.strikes():
            return
        record = pairing_guess_attack(memory, particle_ids, self.rng)
        self.records.append(
            ProbeRecord(
                kind=record.kind,
                particle_ids=record.particle_ids,
                leg=leg,
                details=record.details,
            )
        )


class TimingEavesdropper(Eavesdropper):
    """
    Holds GV packets back. With `dummy_mode = hold_both` Eve waits for both halves, reads the
    bit, and forwards a dummy state at the time the public schedule predicts.
    """

    def attack_particle(self, memory: "ParticleMemory", particle_id: int, leg: str) -> ProbeRecord:
        raise AttackConfigError("Timing attacks only apply to the GV protocol.")

    def on_timed_transit(
        self, memory: "ParticleMemory", particle_id: int, honest_slot: int, scheduled_slot: int
    ) -> int:
        if not self.strikes():
            return honest_slot
        if self.params.dummy_mode == DummyMode.hold_both:
            eve_bit = memory.measure([particle_id], X_BASIS, self.rng)
            dummy_bit = int(self.rng.integers(2))
            memory.replace_state(particle_id, X_BASIS[dummy_bit])
            arrival = scheduled_slot
            details = {"eve_bit": eve_bit, "dummy_bit": dummy_bit, "arrival_slot": arrival}
        else:
            arrival = honest_slot + self.params.delay_slots
            details = {"delay_slots": self.params.delay_slots, "arrival_slot": arrival}
        self.records.append(
            ProbeRecord(kind=self.kind, particle_ids=(particle_id,), leg="first", details=details)
        )
        return arrival


class EavesdropperFactory:
    params: AttackParams

    def __init__(self, params: AttackParams, rng: np.random.Generator) -> None:
        self.params = params
        self.rng = rng

    def get_eavesdropper(self) -> Eavesdropper:
        kind = self.params.kind
        if self.params.is_probe_attack:
            eavesdropper: Eavesdropper = ProbeEavesdropper(self.params, self.rng)
        elif kind == AttackKind.intercept_resend:
            eavesdropper = InterceptResendEavesdropper(self.params, self.rng)
        elif kind == AttackKind.pairing_guess:
            eavesdropper = PairingGuessEavesdropper(self.params, self.rng)
        elif kind == AttackKind.timing_delay:
            eavesdropper = TimingEavesdropper(self.params, self.rng)
        else:
            raise AttackConfigError(f"Invalid attack 'kind': '{kind}'")
        logger.debug(f"Eavesdropping with a '{kind}' attack on legs '{self.params.legs}'")
        return eavesdropper
