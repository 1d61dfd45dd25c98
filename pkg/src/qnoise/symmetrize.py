"""Stabilisation of R noisy copies by projection onto the symmetric subspace."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np

from .states import (
    DensityOperator,
    StateVector,
    fidelity,
    partial_trace,
    purity,
)

MAX_COPIES = 8
SUCCESS_FLOOR = 1e-14
FIRST_ORDER_NORM_LIMIT = 0.05


class ProjectionFailed(RuntimeError):
    """The symmetric projection succeeds with vanishing probability."""


@dataclass(frozen=True, eq=False)
class SymmetricProjector:
    r_copies: int
    matrix: np.ndarray
    dim_per_copy: int = 2

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.matrix).real))


@lru_cache(maxsize=None)
def _projector_matrix(r: int) -> np.ndarray:
    dim = 2**r
    bits = (np.arange(dim)[:, None] >> np.arange(r - 1, -1, -1)) & 1
    weights = 1 << np.arange(r - 1, -1, -1)
    cols = np.arange(dim)
    s = np.zeros((dim, dim))
    for perm in itertools.permutations(range(r)):
        s[bits[:, perm] @ weights, cols] += 1.0
    s /= math.factorial(r)
    s.setflags(write=False)
    return s


def build_projector(r: int) -> SymmetricProjector:
    """Average of all r! copy-permutation operators on r qubits."""
    if not 1 <= r <= MAX_COPIES:
        raise ValueError(f"r must be in 1..{MAX_COPIES}, got {r}")
    return SymmetricProjector(r, _projector_matrix(r))


@dataclass(frozen=True, eq=False)
class SymmetrizationOutcome:
    post_state: DensityOperator
    success_prob: float
    single_copy: DensityOperator


def project(joint: DensityOperator, s: SymmetricProjector) -> SymmetrizationOutcome:
    if joint.n_qubits != s.r_copies:
        raise ValueError(f"joint state has {joint.n_qubits} qubits, projector {s.r_copies}")
    unnorm = s.matrix @ joint.matrix @ s.matrix.T
    p = float(np.trace(unnorm).real)
    if p < SUCCESS_FLOOR:
        raise ProjectionFailed(f"symmetric projection success probability {p:.3e}")
    post = DensityOperator.from_unnormalized(unnorm)
    return SymmetrizationOutcome(post, p, partial_trace(post, {0}))


def product_state(copies: Sequence[DensityOperator]) -> DensityOperator:
    m = reduce(np.kron, (c.matrix for c in copies))
    return DensityOperator(len(copies), m)


def two_copy_map(rho: DensityOperator) -> DensityOperator:
    """Closed form of the single-copy state after projecting rho x rho."""
    m = rho.matrix + rho.matrix @ rho.matrix
    return DensityOperator.from_unnormalized(m)


def purity_gain(rho: DensityOperator) -> tuple[float, float]:
    return purity(rho), purity(two_copy_map(rho))


@dataclass(frozen=True)
class FirstOrderReport:
    r_copies: int
    trace_overlap: float  # Tr(rho0 * mean perturbation)
    fidelity_before: float
    fidelity_after_predicted: float
    purity_after_predicted: float
    fidelity_after_exact: float
    purity_after_exact: float
    success_prob: float

    @property
    def fidelity_residual(self) -> float:
        return self.fidelity_after_exact - self.fidelity_after_predicted

    @property
    def purity_residual(self) -> float:
        return self.purity_after_exact - self.purity_after_predicted


def _pure_vector(rho0: DensityOperator) -> StateVector:
    w, v = np.linalg.eigh(rho0.matrix)
    if abs(w[-1] - 1.0) > 1e-10:
        raise ValueError("reference state rho0 must be pure")
    return StateVector.raw(v[:, -1])


def first_order_report(rho0: DensityOperator, perturbations: Sequence[np.ndarray]) -> FirstOrderReport:
    """Compare first-order predictions for R perturbed copies with exact projection.

    Copy ``i`` is ``rho0 + perturbations[i]``; R is the number of perturbations.
    """
    psi = _pure_vector(rho0)
    perts = [np.asarray(p, dtype=complex) for p in perturbations]
    for p in perts:
        if np.abs(p - p.conj().T).max() > 1e-12 or abs(np.trace(p)) > 1e-12:
            raise ValueError("perturbations must be traceless Hermitian")
        if np.linalg.norm(p, 2) > FIRST_ORDER_NORM_LIMIT:
            raise ValueError(f"perturbation norm exceeds {FIRST_ORDER_NORM_LIMIT} for a first-order comparison")
    r = len(perts)
    mean = sum(perts) / r
    overlap = float(np.trace(rho0.matrix @ mean).real)
    f_bs = 1.0 + float(np.vdot(psi.amplitudes, mean @ psi.amplitudes).real)

    copies = [DensityOperator.from_matrix(rho0.matrix + p) for p in perts]
    out = project(product_state(copies), build_projector(r))
    return FirstOrderReport(
        r_copies=r,
        trace_overlap=overlap,
        fidelity_before=f_bs,
        fidelity_after_predicted=1.0 + overlap / r,
        purity_after_predicted=1.0 + 2.0 * overlap / r,
        fidelity_after_exact=fidelity(out.single_copy, psi),
        purity_after_exact=purity(out.single_copy),
        success_prob=out.success_prob,
    )


def zeno_success(k: float, n_projections: int) -> float:
    """Probability that all n projections in a unit interval succeed, (1 - k/n**2)**n."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if n_projections < 1:
        raise ValueError("n_projections must be positive")
    x = k / n_projections**2
    if x > 1:
        raise ValueError(f"k/n^2 = {x!r} > 1 gives a negative per-step probability")
    if x == 1:
        return 0.0
    return math.exp(n_projections * math.log1p(-x))


def rotated_copies(psi: StateVector, generators: Sequence[np.ndarray], eps: float) -> DensityOperator:
    """R copies of ``psi``, copy i rotated by exp(-i eps G_i)."""
    vecs = []
    for g in generators:
        w, v = np.linalg.eigh(np.asarray(g, dtype=complex))
        u = v @ np.diag(np.exp(-1j * eps * w)) @ v.conj().T
        vecs.append(u @ psi.amplitudes)
    joint = reduce(np.kron, vecs)
    return StateVector.from_array(joint).to_density()


def estimate_zeno_constant(psi: StateVector, generators: Sequence[np.ndarray],
                           eps_values=(1e-3, 2e-3, 5e-3, 1e-2)) -> tuple[float, float]:
    """Fit ``1 - success = k * eps**power`` for independently rotated copies.

    Returns ``(k, power)``; power is close to 2 when the copies drift out of
    the symmetric subspace at a finite rate.
    """
    s = build_projector(len(generators))
    eps = np.asarray(eps_values, dtype=float)
    loss = np.array([1.0 - project(rotated_copies(psi, generators, e), s).success_prob for e in eps])
    power, log_k = np.polyfit(np.log(eps), np.log(loss), 1)
    return float(np.exp(log_k)), float(power)
