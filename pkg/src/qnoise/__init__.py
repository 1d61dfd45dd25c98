"""Simulation lab for qubit noise, symmetrisation and quantum error correction."""

from .states import (
    DensityOperator,
    PauliString,
    StateVector,
    apply_pauli,
    expectation,
    fidelity,
    partial_trace,
    purity,
    tensor_product,
)

__all__ = [
    "DensityOperator",
    "PauliString",
    "StateVector",
    "apply_pauli",
    "expectation",
    "fidelity",
    "partial_trace",
    "purity",
    "tensor_product",
]
