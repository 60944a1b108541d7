"""
Dense-coding tables.

Symbols are written as bit strings with the X component first and the Z component second,
so "10" is X and "11" is iY. Every operation acts on the second qubit of a |Psi+> pair, and
the Bell state Bob finds tells him which one was applied.
"""
from typing import Dict, List, Sequence

import numpy as np

from orthoqkd.exceptions import ProtocolError
from orthoqkd.protocols.base import ProtocolId
from orthoqkd.qstate import (
    I_TIMES_Y,
    IDENTITY,
    PAULI_X,
    PAULI_Z,
    PHI_MINUS,
    PHI_PLUS,
    PSI_MINUS,
    PSI_PLUS,
    X_BASIS,
    StateVector,
)


DENSE_CODING: Dict[str, np.ndarray] = {
    "00": IDENTITY,
    "01": PAULI_Z,
    "10": PAULI_X,
    "11": I_TIMES_Y,
}
PP_CODING: Dict[str, np.ndarray] = {"0": IDENTITY, "1": PAULI_X}

# Bell outcome on (untouched qubit, encoded qubit) -> symbol
DENSE_DECODING: Dict[int, str] = {
    PSI_PLUS: "00",
    PSI_MINUS: "01",
    PHI_PLUS: "10",
    PHI_MINUS: "11",
}
PP_DECODING: Dict[int, str] = {PSI_PLUS: "0", PSI_MINUS: "0", PHI_PLUS: "1", PHI_MINUS: "1"}


def split_symbols(bits: str, width: int) -> List[str]:
    if len(bits) % width:
        raise ProtocolError(f"Cannot split {len(bits)} bits into {width}-bit symbols.")
    return [bits[index : index + width] for index in range(0, len(bits), width)]


def encoding_operator(protocol: ProtocolId, symbol: str) -> np.ndarray:
    table = PP_CODING if protocol.bits_per_use == 1 else DENSE_CODING
    if symbol not in table:
        raise ProtocolError(f"'{symbol}' is not a {protocol} symbol.")
    return table[symbol]


def decode_bell(protocol: ProtocolId, outcome: int) -> str:
    table = PP_DECODING if protocol.bits_per_use == 1 else DENSE_DECODING
    return table[outcome]


def decode_all(protocol: ProtocolId, outcomes: Sequence[int]) -> str:
    return "".join(decode_bell(protocol, outcome) for outcome in outcomes)


def gv_state(bit: str) -> StateVector:
    """|psi_j> = H|j>, the state Alice splits into two wave packets."""
    return X_BASIS[int(bit)]
