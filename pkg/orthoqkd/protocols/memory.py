"""
Quantum memory shared by the parties and the channel during one protocol run.

Particles carry integer ids. Particles that are entangled with each other live in one group
that holds a joint DensityMatrix; a group is never wider than the qstate register cap.
Groups are merged when an operation spans two of them and split again after a projective
measurement, since a rank-one projection leaves the measured qubits in a product with the
rest.
"""
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Sequence, Tuple, Union

import numpy as np

from dbt.adapters.events.logging import AdapterLogger

from orthoqkd.attacks.params import ProbeRecord
from orthoqkd.exceptions import ProtocolError
from orthoqkd.qstate import (
    DensityMatrix,
    QuantumState,
    StateVector,
    apply_unitary,
    measure_projective,
    partial_trace,
    tensor,
)


logger = AdapterLogger("orthoqkd")

AttackFn = Callable[[DensityMatrix, int], ProbeRecord]


@dataclass
class _Group:
    particles: Tuple[int, ...]
    state: DensityMatrix

    def position(self, particle_id: int) -> int:
        return self.particles.index(particle_id)


class ParticleMemory:
    def __init__(self) -> None:
        self._groups: Dict[int, _Group] = {}
        self._owner: Dict[int, int] = {}
        self._next_group = 0
        self._next_particle = 0

    def __contains__(self, particle_id: int) -> bool:
        return particle_id in self._owner

    def __len__(self) -> int:
        return len(self._owner)

    def prepare(self, state: QuantumState) -> Tuple[int, ...]:
        """Store a fresh state and return one new particle id per qubit, in qubit order."""
        rho = state.to_density_matrix() if isinstance(state, StateVector) else state
        ids = tuple(range(self._next_particle, self._next_particle + rho.num_qubits))
        self._next_particle += rho.num_qubits
        self._store(ids, rho)
        return ids

    def _store(self, particles: Tuple[int, ...], state: DensityMatrix) -> None:
        group_id = self._next_group
        self._next_group += 1
        self._groups[group_id] = _Group(particles, state)
        for particle in particles:
            self._owner[particle] = group_id

    def _group(self, particle_id: int) -> Tuple[int, _Group]:
        if particle_id not in self._owner:
            raise ProtocolError(f"Particle {particle_id} is not held in memory.")
        group_id = self._owner[particle_id]
        return group_id, self._groups[group_id]

    def _merge(self, particle_ids: Sequence[int]) -> _Group:
        if len(set(particle_ids)) != len(particle_ids):
            raise ProtocolError(f"Particle ids {list(particle_ids)} are not distinct.")
        group_ids: List[int] = []
        for particle in particle_ids:
            group_id, _ = self._group(particle)
            if group_id not in group_ids:
                group_ids.append(group_id)
        if len(group_ids) == 1:
            return self._groups[group_ids[0]]
        merged = self._groups.pop(group_ids[0])
        for group_id in group_ids[1:]:
            other = self._groups.pop(group_id)
            merged = _Group(merged.particles + other.particles, tensor(merged.state, other.state))
        self._store(merged.particles, merged.state)
        return merged

    def state_of(self, particle_ids: Sequence[int]) -> DensityMatrix:
        """Reduced state of the given particles, in the order given."""
        group = self._merge(particle_ids)
        return partial_trace(group.state, [group.position(pid) for pid in particle_ids])

    def apply_unitary(self, u: np.ndarray, particle_ids: Sequence[int]) -> None:
        group = self._merge(particle_ids)
        group.state = apply_unitary(group.state, u, [group.position(pid) for pid in particle_ids])

    def attack(self, particle_id: int, attack_fn: AttackFn, leg: str) -> ProbeRecord:
        """
        Let an attack act on the group holding `particle_id`.

        `attack_fn` receives the group state and the particle's position in it. When it
        attacks, the probe is traced out of memory and kept only in the returned record.
        """
        _, group = self._group(particle_id)
        record = attack_fn(group.state, group.position(particle_id))
        if not record.attacked:
            return record
        if record.joint_state is not None:
            width = len(group.particles)
            group.state = partial_trace(record.joint_state, list(range(width)))
        return replace(record, particle_ids=(particle_id,), leg=leg)

    def measure(
        self,
        particle_ids: Sequence[int],
        basis: Union[Sequence[StateVector], np.ndarray],
        rng: np.random.Generator,
    ) -> int:
        """
        Measure the particles jointly in `basis`. The measured particles stay in memory in
        their post-measurement state, split off from anything they were entangled with.
        """
        particle_ids = [int(pid) for pid in particle_ids]
        group = self._merge(particle_ids)
        positions = [group.position(pid) for pid in particle_ids]
        outcome, post = measure_projective(group.state, basis, rng, targets=positions)
        rest = [index for index in range(len(group.particles)) if index not in positions]
        if not rest:
            group.state = post
            return outcome
        group_id = self._owner[particle_ids[0]]
        del self._groups[group_id]
        self._store(tuple(particle_ids), partial_trace(post, positions))
        self._store(
            tuple(group.particles[index] for index in rest), partial_trace(post, rest)
        )
        return outcome

    def replace_state(self, particle_id: int, state: QuantumState) -> None:
        """Swap one particle for a fresh single-qubit state, discarding its correlations."""
        group_id, group = self._group(particle_id)
        rho = state.to_density_matrix() if isinstance(state, StateVector) else state
        del self._groups[group_id]
        del self._owner[particle_id]
        rest = [index for index, pid in enumerate(group.particles) if pid != particle_id]
        if rest:
            self._store(
                tuple(group.particles[index] for index in rest), partial_trace(group.state, rest)
            )
        self._store((particle_id,), rho)

    def replace_with_mixed(self, particle_id: int) -> None:
        logger.debug(f"Depolarising particle {particle_id}")
        self.replace_state(particle_id, DensityMatrix.maximally_mixed(1))

    def discard(self, particle_ids: Sequence[int]) -> None:
        for particle in particle_ids:
            group_id, group = self._group(particle)
            del self._groups[group_id]
            del self._owner[particle]
            rest = [index for index, pid in enumerate(group.particles) if pid != particle]
            if rest:
                self._store(
                    tuple(group.particles[index] for index in rest),
                    partial_trace(group.state, rest),
                )
