"""
Information measures read off attacked states: the Bell error, Bob's information in its
three readings, and Eve's Holevo bound.

Confusion matrices may be stacked along leading axes; the measures then return one value
per stacked matrix.
"""
from typing import Sequence, Tuple, Union

import numpy as np

from orthoqkd.exceptions import AnalysisError, MeasurementError
from orthoqkd.infotheory import ArrayLike, binary_entropy, holevo_bound
from orthoqkd.qstate import BELL_BASIS, DensityMatrix, StateVector


def _scalar_or_array(value: np.ndarray) -> ArrayLike:
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value


def error_rate(rho_prime: DensityMatrix, reference: Union[int, StateVector]) -> float:
    """1 - <Phi|rho'|Phi> for a Bell reference, given as a state or a Bell index."""
    if isinstance(reference, StateVector):
        phi = reference
    else:
        phi = BELL_BASIS[reference]
    if rho_prime.dimension != 4 or phi.dimension != 4:
        raise MeasurementError(
            f"error_rate needs two-qubit states, got dimensions {rho_prime.dimension} "
            f"and {phi.dimension}."
        )
    return float(np.clip(1.0 - rho_prime.fidelity(phi), 0.0, 1.0))


def eve_information(ensemble: Sequence[Tuple[float, DensityMatrix]]) -> float:
    if not ensemble:
        raise AnalysisError("Eve's probe ensemble is empty.")
    return holevo_bound(ensemble)


def _mismatch_mask(alphabet: Sequence[str]) -> np.ndarray:
    """mask[b, r, c] is 1 when symbols r and c differ in bit b."""
    width = len(alphabet[0])
    return np.array(
        [
            [[float(sent[bit] != received[bit]) for received in alphabet] for sent in alphabet]
            for bit in range(width)
        ]
    )


def bit_errors(confusion: np.ndarray, alphabet: Sequence[str]) -> np.ndarray:
    """Marginal flip probability of every bit position, under a uniform symbol prior."""
    confusion = np.asarray(confusion, dtype=float)
    return np.einsum("...rc,brc->...b", confusion, _mismatch_mask(alphabet)) / len(alphabet)


def symbol_information(confusion: np.ndarray) -> ArrayLike:
    """I(A:B) in bits for a row-stochastic confusion matrix and a uniform input."""
    confusion = np.asarray(confusion, dtype=float)
    joint = np.clip(confusion, 0.0, None) / confusion.shape[-1]
    product = joint.sum(axis=-1, keepdims=True) * joint.sum(axis=-2, keepdims=True)
    ratio = np.divide(joint, product, out=np.ones_like(joint), where=joint > 0)
    return _scalar_or_array(np.maximum(0.0, np.sum(joint * np.log2(ratio), axis=(-2, -1))))


def bob_information(
    confusion: np.ndarray, alphabet: Sequence[str], e: ArrayLike, mode: str = "bitwise"
) -> ArrayLike:
    """
    Bob's information per use, in one of three readings:

    - bitwise: sum over bit positions of 1 - H2(marginal flip rate)
    - error_rate: every bit scored with the Bell error `e`, saturating at e = 1/2
    - symbol: mutual information of the full confusion matrix
    """
    bits = len(alphabet[0])
    if mode == "error_rate":
        flips = np.clip(np.asarray(e, dtype=float), 0.0, 0.5)
        value = bits * (1.0 - np.asarray(binary_entropy(flips)))
    elif mode == "symbol":
        value = symbol_information(confusion)
    elif mode == "bitwise":
        flips = np.clip(bit_errors(confusion, alphabet), 0.0, 1.0)
        value = np.sum(1.0 - np.asarray(binary_entropy(flips)), axis=-1)
    else:
        raise AnalysisError(f"Unknown reading of Bob's information: '{mode}'")
    return _scalar_or_array(np.clip(value, 0.0, bits))
