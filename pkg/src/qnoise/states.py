"""Dense qubit states, density operators and Pauli strings.

Qubit 0 is the most significant bit of a basis index, so ``|q0 q1 ... q_{n-1}>``
reads left to right exactly like a printed ket.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_FLOOR = -1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

PAULI_MATRICES = {"I": I2, "X": X, "Y": Y, "Z": Z}


class DimensionError(ValueError):
    """Operands act on registers of different sizes."""


def _n_qubits_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if n < 1 or 2**n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two >= 2")
    return n


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm pure state of ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.size != 2**self.n_qubits:
            raise DimensionError(
                f"{amps.size} amplitudes given for {self.n_qubits} qubits"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalised (norm={norm!r}); use StateVector.raw")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_array(cls, amplitudes) -> StateVector:
        amps = np.ravel(np.asarray(amplitudes, dtype=complex))
        return cls(_n_qubits_for(amps.size), amps)

    @classmethod
    def raw(cls, amplitudes) -> StateVector:
        """Build from unnormalised amplitudes, normalising them first."""
        amps = np.ravel(np.asarray(amplitudes, dtype=complex))
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalise the zero vector")
        return cls.from_array(amps / norm)

    @classmethod
    def basis(cls, bits: str) -> StateVector:
        """Computational basis state, e.g. ``StateVector.basis("010")``."""
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(len(bits), amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def inner(self, other: StateVector) -> complex:
        """<self|other>."""
        _check_same(self.n_qubits, other.n_qubits)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_density(self) -> DensityOperator:
        return DensityOperator(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits}, amplitudes={np.round(self.amplitudes, 6)})"


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive semidefinite operator on ``n_qubits``."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        dim = 2**self.n_qubits
        if m.shape != (dim, dim):
            raise DimensionError(f"matrix shape {m.shape} does not fit {self.n_qubits} qubits")
        if np.abs(m - m.conj().T).max() > HERMITIAN_TOL:
            raise ValueError("density operator is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density operator trace is {tr!r}, expected 1")
        lo = np.linalg.eigvalsh(m).min()
        if lo < PSD_FLOOR:
            raise ValueError(f"density operator has negative eigenvalue {lo!r}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, matrix) -> DensityOperator:
        m = np.asarray(matrix, dtype=complex)
        return cls(_n_qubits_for(m.shape[0]), m)

    @classmethod
    def from_unnormalized(cls, matrix) -> DensityOperator:
        """Divide by the trace and symmetrise away roundoff before validating."""
        m = np.asarray(matrix, dtype=complex)
        m = 0.5 * (m + m.conj().T)
        return cls.from_matrix(m / np.trace(m).real)

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> DensityOperator:
        dim = 2**n_qubits
        return cls(n_qubits, np.eye(dim, dtype=complex) / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"DensityOperator(n_qubits={self.n_qubits})"


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, e.g. ``PauliString("IXZ")``."""

    labels: str

    def __post_init__(self):
        labels = "".join(self.labels).upper()
        if not labels or set(labels) - set("IXYZ"):
            raise ValueError(f"invalid Pauli labels {self.labels!r}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls("I" * n)

    @classmethod
    def single(cls, n: int, qubit: int, label: str) -> PauliString:
        """``label`` on ``qubit`` and identity elsewhere."""
        if not 0 <= qubit < n:
            raise IndexError(f"qubit {qubit} out of range for {n} qubits")
        chars = ["I"] * n
        chars[qubit] = label
        return cls("".join(chars))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def weight(self) -> int:
        return sum(c != "I" for c in self.labels)

    def matrix(self) -> np.ndarray:
        return reduce(np.kron, (PAULI_MATRICES[c] for c in self.labels))

    def __mul__(self, other: PauliString) -> PauliString:
        """Label-wise product ignoring the overall phase."""
        if self.n != other.n:
            raise DimensionError("Pauli strings of different length")
        table = {("I", c): c for c in "IXYZ"} | {(c, "I"): c for c in "IXYZ"}
        table |= {(c, c): "I" for c in "XYZ"}
        table |= {("X", "Y"): "Z", ("Y", "X"): "Z", ("Y", "Z"): "X",
                  ("Z", "Y"): "X", ("Z", "X"): "Y", ("X", "Z"): "Y"}
        return PauliString("".join(table[a, b] for a, b in zip(self.labels, other.labels)))

    def __str__(self):
        return self.labels


def _check_same(n_a: int, n_b: int):
    if n_a != n_b:
        raise DimensionError(f"register sizes differ: {n_a} vs {n_b}")


def apply_single_qubit(vec: np.ndarray, gate: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Apply a 2x2 ``gate`` to ``qubit`` of a length-2**n array."""
    t = vec.reshape((2,) * n)
    t = np.tensordot(gate, t, axes=([1], [qubit]))
    return np.moveaxis(t, 0, qubit).reshape(-1)


def apply_pauli_array(vec: np.ndarray, labels: str) -> np.ndarray:
    n = len(labels)
    out = np.asarray(vec, dtype=complex)
    for q, c in enumerate(labels):
        if c != "I":
            out = apply_single_qubit(out, PAULI_MATRICES[c], q, n)
    return out


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    return StateVector(a.n_qubits + b.n_qubits, np.kron(a.amplitudes, b.amplitudes))


def tensor_density(*ops: DensityOperator) -> DensityOperator:
    m = reduce(np.kron, (op.matrix for op in ops))
    return DensityOperator(sum(op.n_qubits for op in ops), m)


def apply_pauli(state: StateVector, p: PauliString) -> StateVector:
    _check_same(p.n, state.n_qubits)
    return StateVector(state.n_qubits, apply_pauli_array(state.amplitudes, p.labels))


def expectation(psi: StateVector, p: PauliString) -> complex:
    _check_same(p.n, psi.n_qubits)
    return complex(np.vdot(psi.amplitudes, apply_pauli_array(psi.amplitudes, p.labels)))


def fidelity(rho: DensityOperator, psi: StateVector) -> float:
    """<psi|rho|psi> for a mixed state against a pure reference."""
    _check_same(rho.n_qubits, psi.n_qubits)
    value = np.vdot(psi.amplitudes, rho.matrix @ psi.amplitudes)
    if abs(value.imag) > 1e-12:
        raise ValueError(f"fidelity has imaginary part {value.imag!r}")
    return float(value.real)


def purity(rho: DensityOperator) -> float:
    """Tr rho^2."""
    m = rho.matrix
    return float(np.real(np.sum(m * m.T)))


def partial_trace_matrix(matrix: np.ndarray, keep: Iterable[int], n: int) -> np.ndarray:
    keep = sorted(set(keep))
    t = np.asarray(matrix).reshape((2,) * (2 * n))
    # trace out from the highest index down so remaining axis numbers stay valid
    n_left = n
    for q in sorted(set(range(n)) - set(keep), reverse=True):
        t = np.trace(t, axis1=q, axis2=q + n_left)
        n_left -= 1
    d = 2 ** len(keep)
    return t.reshape(d, d)


def partial_trace(rho: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Reduced state on the qubits in ``keep`` (kept in ascending order)."""
    keep = set(keep)
    if not keep:
        raise ValueError("keep must name at least one qubit")
    if not keep <= set(range(rho.n_qubits)):
        raise IndexError(f"qubit indices {sorted(keep)} invalid for {rho.n_qubits} qubits")
    return DensityOperator(len(keep), partial_trace_matrix(rho.matrix, keep, rho.n_qubits))


def kraus_apply(matrix: np.ndarray, kraus_ops: Sequence[np.ndarray]) -> np.ndarray:
    return sum(k @ matrix @ k.conj().T for k in kraus_ops)


def random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state."""
    v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return StateVector.raw(v)


def random_density(n_qubits: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Random mixed state from a Ginibre matrix of the given rank."""
    dim = 2**n_qubits
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    return DensityOperator.from_unnormalized(g @ g.conj().T)
