"""Quantum error-correcting codes: encoders, code-condition checks and recovery.

Recovery is built straight from the codewords: every correctable error maps the
code space onto a 2**l dimensional image, errors with identical images are
merged into one syndrome class, and correction projects onto the class images
and undoes the class representative.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .environment import EnvironmentModel, QubitChannel, integrate, damping_channel, markov_damping
from .states import (
    H,
    DensityOperator,
    PauliString,
    StateVector,
    apply_pauli_array,
    apply_single_qubit,
)

CONDITION_TOL = 1e-10
RESIDUAL_TOL = 1e-8

# Five-qubit codewords (each normalised by 1/sqrt(8)). The |10100> term of C1
# carries a + sign: with the - sign the single-error images are not orthogonal.
FIVE_C0 = "+00010 +00101 -01011 +01100 +10001 -10110 -11000 -11111"
FIVE_C1 = "+00000 -00111 +01001 +01110 +10011 +10100 +11010 -11101"


class CodeConditionError(ValueError):
    """The code does not satisfy the conditions needed to build a recovery."""


class UncorrectableError(RuntimeError):
    """Part of the state lies outside every syndrome subspace."""


def _from_terms(terms: str | Sequence[str], n: int) -> np.ndarray:
    if isinstance(terms, str):
        terms = terms.split()
    v = np.zeros(2**n, dtype=complex)
    for term in terms:
        sign, bits = term[0], term[1:]
        if sign not in "+-" or len(bits) != n or set(bits) - set("01"):
            raise ValueError(f"bad codeword term {term!r}")
        v[int(bits, 2)] += 1.0 if sign == "+" else -1.0
    return v / np.linalg.norm(v)


def single_qubit_errors(n: int, kinds: str = "XYZ", t: int = 1) -> tuple[PauliString, ...]:
    """Identity plus every Pauli string of weight <= t built from ``kinds``."""
    out = [PauliString.identity(n)]
    for w in range(1, t + 1):
        for qubits in itertools.combinations(range(n), w):
            for labels in itertools.product(kinds, repeat=w):
                chars = ["I"] * n
                for q, c in zip(qubits, labels):
                    chars[q] = c
                out.append(PauliString("".join(chars)))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class QuantumCode:
    name: str
    n: int
    l: int
    t: int
    codewords: tuple[StateVector, ...]
    errors: tuple[PauliString, ...] = ()

    def __post_init__(self):
        if len(self.codewords) != 2**self.l:
            raise ValueError(f"expected {2**self.l} codewords, got {len(self.codewords)}")
        if any(c.n_qubits != self.n for c in self.codewords):
            raise ValueError("codeword size does not match n")
        c = self.codeword_matrix
        if np.abs(c.conj().T @ c - np.eye(len(self.codewords))).max() > 1e-12:
            raise ValueError("codewords are not orthonormal")
        if not self.errors:
            object.__setattr__(self, "errors", single_qubit_errors(self.n, t=self.t))

    @cached_property
    def codeword_matrix(self) -> np.ndarray:
        """Columns are the codewords."""
        return np.column_stack([c.amplitudes for c in self.codewords])

    def encode(self, coefficients: Sequence[complex]) -> StateVector:
        coeffs = np.asarray(coefficients, dtype=complex)
        if coeffs.size != len(self.codewords):
            raise ValueError(f"{self.name} encodes {len(self.codewords)} amplitudes")
        if abs(np.linalg.norm(coeffs) - 1.0) > 1e-12:
            raise ValueError("logical amplitudes are not normalised")
        return StateVector.raw(self.codeword_matrix @ coeffs)

    @cached_property
    def report(self) -> CodeConditionReport:
        return verify_conditions(self)

    @property
    def degenerate(self) -> bool:
        return not self.report.satisfies_nondegenerate

    @cached_property
    def recovery(self) -> RecoveryTable:
        return build_recovery(self)


def phase3_code() -> QuantumCode:
    """C0 = |+++>, C1 = |--->; corrects a single phase flip."""
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    c0 = np.kron(np.kron(plus, plus), plus)
    c1 = np.kron(np.kron(minus, minus), minus)
    return QuantumCode("phase3", 3, 1, 1, (StateVector(3, c0), StateVector(3, c1)),
                       single_qubit_errors(3, "Z"))


def bitflip3_code() -> QuantumCode:
    return QuantumCode("bitflip3", 3, 1, 1, (StateVector.basis("000"), StateVector.basis("111")),
                       single_qubit_errors(3, "X"))


def shor9_code() -> QuantumCode:
    ghz_p = np.zeros(8)
    ghz_p[[0, 7]] = 1
    ghz_m = ghz_p.copy()
    ghz_m[7] = -1
    c0 = np.kron(np.kron(ghz_p, ghz_p), ghz_p) / (2 * np.sqrt(2))
    c1 = np.kron(np.kron(ghz_m, ghz_m), ghz_m) / (2 * np.sqrt(2))
    return QuantumCode("shor9", 9, 1, 1, (StateVector(9, c0), StateVector(9, c1)))


def five_code() -> QuantumCode:
    c0 = StateVector(5, _from_terms(FIVE_C0, 5))
    c1 = StateVector(5, _from_terms(FIVE_C1, 5))
    return QuantumCode("five", 5, 1, 1, (c0, c1))


BUILTIN_CODES = {
    "phase3": phase3_code,
    "bitflip3": bitflip3_code,
    "shor9": shor9_code,
    "five": five_code,
}


def load_code(path: str | os.PathLike) -> QuantumCode:
    """Read a code from a codeword file.

    Format: ``#`` comments and blank lines are ignored; the first line is the
    header ``n l t``; each further line is ``<codeword index> <sign><bits>``,
    e.g. ``1 -00111``. Codewords are normalised after reading.
    """
    lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError(f"{path}: empty codeword file")
    try:
        n, l, t = (int(x) for x in lines[0].split())
    except ValueError as exc:
        raise ValueError(f"{path}: header must be 'n l t'") from exc
    terms: dict[int, list[str]] = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"{path}: bad term line {ln!r}")
        terms.setdefault(int(parts[0]), []).append(parts[1])
    if sorted(terms) != list(range(2**l)):
        raise ValueError(f"{path}: expected codeword indices 0..{2**l - 1}")
    words = tuple(StateVector(n, _from_terms(terms[k], n)) for k in range(2**l))
    return QuantumCode(Path(path).stem, n, l, t, words)


def format_code(code: QuantumCode) -> str:
    """Render ``code`` in the codeword file format (equal-magnitude terms only)."""
    out = [f"{code.n} {code.l} {code.t}"]
    for k, word in enumerate(code.codewords):
        amps = word.amplitudes
        nz = np.flatnonzero(np.abs(amps) > 1e-12)
        mags = np.abs(amps[nz])
        if np.ptp(mags) > 1e-9 or np.abs(amps[nz].imag).max() > 1e-12:
            raise ValueError("only real, equal-magnitude codewords can be written")
        for idx in nz:
            sign = "+" if amps[idx].real > 0 else "-"
            out.append(f"{k} {sign}{idx:0{code.n}b}")
    return "\n".join(out) + "\n"


def get_code(identifier: str) -> QuantumCode:
    if identifier in BUILTIN_CODES:
        return BUILTIN_CODES[identifier]()
    if Path(identifier).is_file():
        return load_code(identifier)
    raise KeyError(f"unknown code {identifier!r}; built-ins are {sorted(BUILTIN_CODES)}")


def _checked_logical(alpha: complex, beta: complex) -> np.ndarray:
    v = np.array([alpha, beta], dtype=complex)
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise ValueError("|alpha|^2 + |beta|^2 must equal 1")
    return v


def encode_phase3(alpha: complex, beta: complex) -> StateVector:
    return phase3_code().encode(_checked_logical(alpha, beta))


def encode_shor9(alpha: complex, beta: complex) -> StateVector:
    return shor9_code().encode(_checked_logical(alpha, beta))


def encode_five(alpha: complex, beta: complex) -> StateVector:
    return five_code().encode(_checked_logical(alpha, beta))


# Majority-to-first-qubit permutation on three qubits.
BITFLIP_TABLE = {
    "000": "000", "001": "001", "010": "010", "011": "111",
    "100": "011", "101": "110", "110": "101", "111": "100",
}


def _bitflip_matrix() -> np.ndarray:
    u = np.zeros((8, 8), dtype=complex)
    for src, dst in BITFLIP_TABLE.items():
        u[int(dst, 2), int(src, 2)] = 1.0
    return u


BITFLIP_UNITARY = _bitflip_matrix()


def bitflip_correction_unitary(state: StateVector) -> StateVector:
    if state.n_qubits != 3:
        raise ValueError("the bit-flip correction acts on three qubits")
    return StateVector(3, BITFLIP_UNITARY @ state.amplitudes)


def conjugate_bitflip_correction(state: StateVector) -> StateVector:
    """The bit-flip correction applied in the Hadamard basis (fixes one phase flip)."""
    if state.n_qubits != 3:
        raise ValueError("the bit-flip correction acts on three qubits")
    h3 = np.kron(np.kron(H, H), H)
    return StateVector(3, h3 @ BITFLIP_UNITARY @ h3 @ state.amplitudes)


@dataclass(frozen=True, eq=False)
class CodeConditionReport:
    errors: tuple[PauliString, ...]
    gram: np.ndarray  # gram[k, a, m, b] = <C_a| A_k^dag A_m |C_b>
    satisfies_general: bool
    satisfies_nondegenerate: bool
    general_violation: float
    nondegenerate_violation: float
    worst_pair: tuple[PauliString, PauliString] | None

    @property
    def ancilla_gram(self) -> np.ndarray:
        """<a_k|a_m>, read off the C0 block."""
        return self.gram[:, 0, :, 0]


def _error_images(code: QuantumCode, errors: Sequence[PauliString]) -> np.ndarray:
    """images[k, a] = A_k |C_a>."""
    return np.array([[apply_pauli_array(c.amplitudes, e.labels) for c in code.codewords] for e in errors])


def verify_conditions(code: QuantumCode, errors: Sequence[PauliString] | None = None,
                      tol: float = CONDITION_TOL) -> CodeConditionReport:
    """Brute-force check of the error-correction conditions over ``errors``."""
    errors = tuple(code.errors if errors is None else errors)
    imgs = _error_images(code, errors)
    n_err, n_cw, dim = imgs.shape
    flat = imgs.reshape(n_err * n_cw, dim)
    gram = (flat.conj() @ flat.T).reshape(n_err, n_cw, n_err, n_cw)

    blocks = np.einsum("kama->akm", gram)  # diagonal codeword blocks
    general = max(
        float(np.abs(blocks - blocks[0]).max()),
        float(max((np.abs(gram[:, a, :, b]).max() for a in range(n_cw) for b in range(n_cw) if a != b),
                  default=0.0)),
    )
    off = blocks.copy()
    idx = np.arange(n_err)
    off[:, idx, idx] = 0
    nondeg = float(np.abs(off).max()) if n_err > 1 else 0.0
    worst = None
    if nondeg > tol:
        _, k, m = np.unravel_index(np.argmax(np.abs(off)), off.shape)
        worst = (errors[k], errors[m])
    return CodeConditionReport(errors, gram, general <= tol, nondeg <= tol, general, nondeg, worst)


@dataclass(frozen=True, eq=False)
class SyndromeClass:
    errors: tuple[PauliString, ...]
    representative: PauliString
    basis: np.ndarray  # (dim, 2**l) orthonormal image of the code space

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


@dataclass(frozen=True, eq=False)
class RecoveryTable:
    code_name: str
    classes: tuple[SyndromeClass, ...]

    def __len__(self):
        return len(self.classes)

    def correction(self, syndrome: int) -> PauliString:
        return self.classes[syndrome].representative

    def covered_dimension(self) -> int:
        return sum(c.basis.shape[1] for c in self.classes)


def build_recovery(code: QuantumCode, errors: Sequence[PauliString] | None = None) -> RecoveryTable:
    """Group errors by their action on the code space and store each class image."""
    report = verify_conditions(code, errors)
    if not report.satisfies_general:
        raise CodeConditionError(
            f"{code.name}: correction conditions fail (max violation {report.general_violation:.3e})"
        )
    errs = report.errors
    overlap = np.abs(report.ancilla_gram)
    partial = (overlap > CONDITION_TOL) & (overlap < 1 - CONDITION_TOL)
    if partial.any():
        raise CodeConditionError(f"{code.name}: errors with partial overlap need a non-Pauli recovery")

    label = [-1] * len(errs)
    groups: list[list[int]] = []
    for k in range(len(errs)):
        if label[k] >= 0:
            continue
        members = [m for m in range(len(errs)) if label[m] < 0 and overlap[k, m] >= 1 - CONDITION_TOL]
        for m in members:
            label[m] = len(groups)
        groups.append(members)

    imgs = _error_images(code, errs)
    classes = []
    for members in groups:
        rep = min(members, key=lambda m: (errs[m].weight, m))
        classes.append(SyndromeClass(tuple(errs[m] for m in members), errs[rep], imgs[rep].T.copy()))
    return RecoveryTable(code.name, tuple(classes))


@dataclass(frozen=True, eq=False)
class CorrectionResult:
    state: StateVector | DensityOperator
    syndrome: int | None  # sampled class, None in density-operator mode
    probabilities: np.ndarray  # Born probability of each syndrome class
    residual_weight: float

    @property
    def probability(self) -> float | np.ndarray:
        if self.syndrome is None:
            return self.probabilities
        return float(self.probabilities[self.syndrome])


def correct(code: QuantumCode, state: StateVector | DensityOperator,
            rng: np.random.Generator | None = None, *, strict: bool = True) -> CorrectionResult:
    """Syndrome measurement followed by the class correction.

    A ``StateVector`` is treated as one run: a syndrome is sampled from ``rng``
    and the post-measurement state corrected. A ``DensityOperator`` is averaged
    over all syndrome outcomes. With ``strict`` any weight outside the syndrome
    subspaces above 1e-8 raises ``UncorrectableError``; otherwise that part is
    left uncorrected (density mode) or sampled as syndrome ``-1`` (pure mode).
    """
    table = code.recovery
    cw = code.codeword_matrix
    if isinstance(state, StateVector):
        psi = state.amplitudes
        if psi.size != cw.shape[0]:
            raise ValueError("state dimension does not match the code")
        coeffs = [c.basis.conj().T @ psi for c in table.classes]
        probs = np.array([float(np.vdot(x, x).real) for x in coeffs])
        residual = max(0.0, 1.0 - probs.sum())
        if strict and residual > RESIDUAL_TOL:
            raise UncorrectableError(f"weight {residual:.3e} outside every syndrome subspace")
        if rng is None:
            raise ValueError("pure-state correction needs a seeded random generator")
        weights = np.append(probs, residual)
        k = int(rng.choice(len(weights), p=weights / weights.sum()))
        if k == len(probs):
            leftover = psi - sum(c.basis @ x for c, x in zip(table.classes, coeffs))
            return CorrectionResult(StateVector.raw(leftover), -1, probs, residual)
        # undoing the representative maps the class image back onto the codewords
        recovered = StateVector.raw(cw @ coeffs[k])
        return CorrectionResult(recovered, k, probs, residual)

    rho = state.matrix
    if rho.shape[0] != cw.shape[0]:
        raise ValueError("state dimension does not match the code")
    blocks = [c.basis.conj().T @ rho @ c.basis for c in table.classes]
    probs = np.array([float(np.trace(b).real) for b in blocks])
    residual = max(0.0, 1.0 - probs.sum())
    if strict and residual > RESIDUAL_TOL:
        raise UncorrectableError(f"weight {residual:.3e} outside every syndrome subspace")
    out = cw @ sum(blocks) @ cw.conj().T
    if residual > 0:
        q = np.eye(rho.shape[0]) - sum(c.projector for c in table.classes)
        out = out + q @ rho @ q
    return CorrectionResult(DensityOperator.from_unnormalized(out), None, probs, residual)


def apply_local_channel(matrix: np.ndarray, channel: QubitChannel, qubit: int, n: int) -> np.ndarray:
    """Apply a single-qubit channel to one qubit of an n-qubit density matrix."""
    t = matrix.reshape((2,) * (2 * n))
    out = np.zeros_like(t)
    for k in channel.kraus_ops:
        s = np.moveaxis(np.tensordot(k, t, axes=([1], [qubit])), 0, qubit)
        s = np.moveaxis(np.tensordot(k.conj(), s, axes=([1], [n + qubit])), 0, n + qubit)
        out += s
    return out.reshape(matrix.shape)


def apply_independent(rho: DensityOperator, channel: QubitChannel) -> DensityOperator:
    """Same channel on every qubit, each with its own environment."""
    m = rho.matrix
    for q in range(rho.n_qubits):
        m = apply_local_channel(m, channel, q, rho.n_qubits)
    return DensityOperator.from_unnormalized(m)


def benefit_bound(gamma_t) -> np.ndarray:
    """Probability that at most one of five qubits decays, exp(-4x) (5 - 4 exp(-x))."""
    x = np.asarray(gamma_t, dtype=float)
    return np.exp(-4 * x) * (5 - 4 * np.exp(-x))


class BoundViolation(RuntimeError):
    """Corrected fidelity fell below the at-most-one-decay bound."""


@dataclass(frozen=True, eq=False)
class BenefitTable:
    times: np.ndarray
    f_ec: np.ndarray
    bound: np.ndarray
    f_exp: np.ndarray

    @property
    def advantage(self) -> np.ndarray:
        return self.f_ec - self.f_exp

    def rows(self):
        return zip(self.times, self.f_ec, self.bound, self.f_exp, self.advantage)


def _channels_for(env: EnvironmentModel, times: np.ndarray, decay: str) -> list[QubitChannel]:
    if decay == "markov":
        return [markov_damping(env.gamma, t) for t in times]
    if decay != "numeric":
        raise ValueError(f"unknown decay model {decay!r}")
    steps = len(times) - 1
    if times[0] != 0 or steps < 1 or not np.allclose(np.diff(times), times[-1] / steps, rtol=0, atol=1e-12):
        raise ValueError("numeric decay needs an equally spaced grid starting at 0")
    traj = integrate(env, float(times[-1]), steps)
    return [damping_channel(traj, k, frame="rotating") for k in range(steps + 1)]


def qec_benefit(code: QuantumCode, env: EnvironmentModel, times, logical=(0.0, 1.0), *,
                decay: str = "markov", check: bool = True) -> BenefitTable:
    """Fidelity of the corrected five-qubit memory under independent spontaneous emission.

    Each qubit is damped in the frame rotating with the qubit, using either
    exponential decay at ``env.gamma`` (``decay="markov"``) or the integrated
    amplitudes of ``env`` (``decay="numeric"``).
    """
    if code.n != 5:
        raise ValueError("the benefit bound is stated for the five-qubit code")
    times = np.asarray(times, dtype=float)
    psi = code.encode(logical)
    rho0 = psi.to_density()
    f_ec = np.empty(times.size)
    for k, ch in enumerate(_channels_for(env, times, decay)):
        noisy = apply_independent(rho0, ch)
        rec = correct(code, noisy).state
        f_ec[k] = float(np.vdot(psi.amplitudes, rec.matrix @ psi.amplitudes).real)
    table = BenefitTable(times, f_ec, benefit_bound(env.gamma * times), np.exp(-env.gamma * times))
    if check:
        bad = np.flatnonzero(table.f_ec < table.bound - 1e-9)
        if bad.size:
            t = times[bad[0]]
            raise BoundViolation(f"F_ec below bound at t={t!r}")
    return table


def _sample_kraus(psi: np.ndarray, channel: QubitChannel, qubit: int, n: int,
                  rng: np.random.Generator) -> np.ndarray:
    branches = [apply_single_qubit(psi, k, qubit, n) for k in channel.kraus_ops]
    weights = np.array([float(np.vdot(b, b).real) for b in branches])
    k = int(rng.choice(len(branches), p=weights / weights.sum()))
    return branches[k] / math.sqrt(weights[k])


def _trial(code: QuantumCode, psi: StateVector, channels: list[QubitChannel], seed: int, trial: int) -> np.ndarray:
    rng = np.random.default_rng([seed, trial])
    out = np.empty(len(channels))
    for j, ch in enumerate(channels):
        v = psi.amplitudes
        for q in range(code.n):
            v = _sample_kraus(v, ch, q, code.n, rng)
        rec = correct(code, StateVector.raw(v), rng).state
        out[j] = abs(psi.inner(rec)) ** 2
    return out


def qec_benefit_mc(code: QuantumCode, env: EnvironmentModel, times, logical=(0.0, 1.0), *,
                   trials: int = 200, seed: int = 0, threads: int | None = None,
                   decay: str = "markov") -> np.ndarray:
    """Monte-Carlo estimate of F_ec(t) from sampled jump records.

    Trial ``i`` draws from ``default_rng([seed, i])`` so the estimate does not
    depend on ``threads``.
    """
    times = np.asarray(times, dtype=float)
    psi = code.encode(logical)
    channels = _channels_for(env, times, decay)
    if threads is None:
        threads = int(os.environ.get("QNOISE_THREADS", "1"))
    threads = max(1, threads)
    if threads == 1:
        results = [_trial(code, psi, channels, seed, i) for i in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda i: _trial(code, psi, channels, seed, i), range(trials)))
    return np.mean(results, axis=0)
