"""Spontaneous-emission dynamics of a qubit coupled to a discretised bath.

Units have hbar = 1. A bath is described by a coupling density g(w) (coupling
squared per unit angular frequency); on a uniform midpoint grid each mode gets
``lambda_f**2 = g(w_f) * dw`` so the golden-rule rate ``gamma = 2*pi*g(w0)``
does not depend on the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .states import I2, Z, DensityOperator, kraus_apply

SPECTRUM_SHAPES = ("flat", "gaussian", "lorentzian")
MAX_PHASE_PER_STEP = 0.1
NORM_DRIFT_LIMIT = 1e-6


class IntegrationError(RuntimeError):
    """Raised when the amplitude integration loses norm beyond the diagnostic limit."""


@dataclass(frozen=True)
class EnvironmentSpec:
    """Continuous bath description prior to discretisation.

    ``coupling`` is the peak value of g(w); ``spectrum`` sets the profile
    around ``center`` with characteristic ``width``. A flat profile ignores
    ``center`` and its width is only the bookkeeping value used for the
    short-time regime (t << 1/width).
    """

    omega0: float
    coupling: float
    omega_min: float
    omega_max: float
    n_modes: int
    spectrum: str = "flat"
    center: float | None = None
    width: float | None = None

    def __post_init__(self):
        if self.spectrum not in SPECTRUM_SHAPES:
            raise ValueError(f"unknown spectrum {self.spectrum!r}; choose from {SPECTRUM_SHAPES}")
        if not self.omega_min < self.omega0 < self.omega_max:
            raise ValueError("resonance omega0 must lie strictly inside (omega_min, omega_max)")
        if self.n_modes < 2:
            raise ValueError("need at least two bath modes")
        if self.coupling <= 0:
            raise ValueError("coupling density must be positive")
        if self.center is None:
            object.__setattr__(self, "center", self.omega0)
        if self.width is None:
            object.__setattr__(self, "width", self.omega_max - self.omega_min)
        if self.width <= 0:
            raise ValueError("width must be positive")

    @classmethod
    def flat(cls, gamma: float = 1.0, omega0: float = 100.0, n_modes: int = 1000,
             half_window: float | None = None) -> EnvironmentSpec:
        """Flat band of total width ``2*half_window`` centred on ``omega0``.

        The default window is +-50 gamma with 1000 modes (spacing 0.1 gamma).
        """
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        half_window = 50.0 * gamma if half_window is None else half_window
        return cls(
            omega0=omega0,
            coupling=gamma / (2 * math.pi),
            omega_min=omega0 - half_window,
            omega_max=omega0 + half_window,
            n_modes=n_modes,
        )

    def density(self, omega) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        x = omega - self.center
        if self.spectrum == "flat":
            shape = np.ones_like(omega)
        elif self.spectrum == "gaussian":
            shape = np.exp(-0.5 * (x / self.width) ** 2)
        else:
            hw = 0.5 * self.width
            shape = hw**2 / (x**2 + hw**2)
        return self.coupling * shape


@dataclass(frozen=True, eq=False)
class EnvironmentModel:
    omega0: float
    omegas: np.ndarray
    couplings: np.ndarray
    gamma: float
    delta: float
    width: float

    @property
    def n_modes(self) -> int:
        return self.omegas.size

    @property
    def sum_lambda_sq(self) -> float:
        return float(np.sum(np.abs(self.couplings) ** 2))

    @property
    def omega0_eff(self) -> float:
        """Resonance including the level shift."""
        return self.omega0 + self.delta

    @property
    def detunings(self) -> np.ndarray:
        return self.omegas - self.omega0

    @property
    def modes(self) -> list[tuple[float, float]]:
        return list(zip(self.omegas.tolist(), self.couplings.tolist()))


def discretize(spec: EnvironmentSpec) -> EnvironmentModel:
    dw = (spec.omega_max - spec.omega_min) / spec.n_modes
    omegas = spec.omega_min + (np.arange(spec.n_modes) + 0.5) * dw
    lam_sq = spec.density(omegas) * dw
    detuning = spec.omega0 - omegas
    # principal value: drop the bin containing omega0; a resonance sitting on a
    # bin edge drops nothing so symmetric grids cancel pairwise
    off = np.abs(detuning) >= 0.5 * dw * (1 - 1e-9)
    delta = float(np.sum(lam_sq[off] / detuning[off]))
    gamma = float(2 * math.pi * spec.density(spec.omega0))
    omegas.setflags(write=False)
    couplings = np.sqrt(lam_sq)
    couplings.setflags(write=False)
    return EnvironmentModel(spec.omega0, omegas, couplings, gamma, delta, float(spec.width))


@dataclass(frozen=True, eq=False)
class AmplitudeTrajectory:
    """Interaction-picture amplitudes ``c_i(t)`` and ``c_f(t)`` on an output grid."""

    times: np.ndarray
    c_i: np.ndarray
    c_f: np.ndarray  # (n_modes, n_times)
    env: EnvironmentModel = field(repr=False)

    @property
    def norms(self) -> np.ndarray:
        return np.abs(self.c_i) ** 2 + np.sum(np.abs(self.c_f) ** 2, axis=0)

    @property
    def excited_population(self) -> np.ndarray:
        return np.abs(self.c_i) ** 2


def _rhs(t, ci, cf, lam, det):
    phase = np.exp(1j * det * t)
    dci = -1j * np.sum(lam * phase.conj() * cf)
    dcf = -1j * lam * phase * ci
    return dci, dcf


def integrate(env: EnvironmentModel, t_max: float, steps: int) -> AmplitudeTrajectory:
    """Fixed-step RK4 solution of the single-excitation amplitude equations.

    The trajectory is reported at ``steps + 1`` equally spaced times. Each output
    interval is subdivided so that ``max|w_f - w0| * dt <= 0.1``.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if steps < 1:
        raise ValueError("steps must be a positive integer")
    lam = np.asarray(env.couplings, dtype=float)
    det = env.detunings
    h_out = t_max / steps
    sub = max(1, math.ceil(h_out * np.abs(det).max() / MAX_PHASE_PER_STEP - 1e-12))
    h = h_out / sub

    times = np.linspace(0.0, t_max, steps + 1)
    c_i = np.empty(steps + 1, dtype=complex)
    c_f = np.empty((env.n_modes, steps + 1), dtype=complex)
    ci = 1.0 + 0j
    cf = np.zeros(env.n_modes, dtype=complex)
    c_i[0], c_f[:, 0] = ci, cf
    for k in range(steps):
        t0 = times[k]
        for j in range(sub):
            t = t0 + j * h
            a1, b1 = _rhs(t, ci, cf, lam, det)
            a2, b2 = _rhs(t + h / 2, ci + h / 2 * a1, cf + h / 2 * b1, lam, det)
            a3, b3 = _rhs(t + h / 2, ci + h / 2 * a2, cf + h / 2 * b2, lam, det)
            a4, b4 = _rhs(t + h, ci + h * a3, cf + h * b3, lam, det)
            ci = ci + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
            cf = cf + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        c_i[k + 1], c_f[:, k + 1] = ci, cf

    traj = AmplitudeTrajectory(times, c_i, c_f, env)
    drift = float(np.abs(traj.norms - 1.0).max())
    if drift > NORM_DRIFT_LIMIT:
        raise IntegrationError(f"norm drift {drift:.3e} exceeds {NORM_DRIFT_LIMIT:g}; refine the step")
    return traj


@dataclass(frozen=True, eq=False)
class EnvVector:
    """Bath state in the zero/one-excitation sector: vacuum amplitude plus one amplitude per mode."""

    vacuum: complex
    modes: np.ndarray

    def inner(self, other: EnvVector) -> complex:
        """<self|other>."""
        return complex(np.conj(self.vacuum) * other.vacuum + np.vdot(self.modes, other.modes))

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.vacuum], self.modes])


def relative_states(traj: AmplitudeTrajectory, idx: int, env: EnvironmentModel | None = None):
    """Bath states (R0, R1, R2, R3) attached to I, X, Y, Z at output time ``idx``.

    R2 follows the sign convention R2 = -R1; the operator-valued
    coefficient of the standard Y matrix is ``-1j * R2``.
    """
    env = traj.env if env is None else env
    t = traj.times[idx]
    ci = traj.c_i[idx] * np.exp(-1j * env.omega0 * t)
    emitted = 0.5 * traj.c_f[:, idx] * np.exp(-1j * env.omegas * t)
    zeros = np.zeros(env.n_modes, dtype=complex)
    r0 = EnvVector(0.5 * (1 + ci), zeros)
    r1 = EnvVector(0j, emitted)
    r2 = EnvVector(0j, -emitted)
    r3 = EnvVector(0.5 * (1 - ci), zeros)
    return r0, r1, r2, r3


@dataclass(frozen=True, eq=False)
class QubitChannel:
    kraus_ops: tuple
    time: float | None = None

    def completeness_error(self) -> float:
        s = sum(k.conj().T @ k for k in self.kraus_ops)
        return float(np.abs(s - I2).max())

    def apply(self, rho: DensityOperator) -> DensityOperator:
        if rho.n_qubits != 1:
            raise ValueError("QubitChannel acts on single-qubit states")
        return DensityOperator.from_matrix(kraus_apply(rho.matrix, self.kraus_ops))


def amplitude_damping(c_i: complex, time: float | None = None) -> QubitChannel:
    """Damping channel with surviving excited-state amplitude ``c_i``."""
    mag = abs(c_i)
    if mag > 1 + 1e-10:
        raise ValueError(f"|c_i| = {mag!r} exceeds 1")
    k0 = np.array([[1, 0], [0, c_i]], dtype=complex)
    k1 = np.array([[0, math.sqrt(max(0.0, 1 - mag**2))], [0, 0]], dtype=complex)
    return QubitChannel((k0, k1), time)


def damping_channel(traj: AmplitudeTrajectory, idx: int, frame: str = "lab") -> QubitChannel:
    """Channel induced on the qubit at output time ``idx``.

    ``frame="lab"`` keeps the free precession ``exp(-i w0 t)`` on |1>;
    ``frame="rotating"`` drops it.
    """
    t = float(traj.times[idx])
    ci = traj.c_i[idx]
    if frame == "lab":
        ci = ci * np.exp(-1j * traj.env.omega0 * t)
    elif frame != "rotating":
        raise ValueError(f"unknown frame {frame!r}")
    return amplitude_damping(ci, t)


def markov_damping(gamma: float, t: float) -> QubitChannel:
    """Rotating-frame damping channel for pure exponential decay, c_i = exp(-gamma t / 2)."""
    return amplitude_damping(math.exp(-0.5 * gamma * t), t)


def dephasing_channel(p: float) -> QubitChannel:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"dephasing probability {p!r} outside [0, 1]")
    return QubitChannel((math.sqrt(1 - p) * I2, math.sqrt(p) * Z))


def fidelity_curves(env: EnvironmentModel, times) -> tuple[np.ndarray, np.ndarray]:
    """Parabolic and exponential fidelity curves.

    ``F_par = 1 - 2 t**2 sum(lambda**2)`` (clamped at zero) keeps the conventional
    short-time coefficient; the exact second-order term of ``|c_i|**2`` is
    ``-t**2 sum(lambda**2)``, see :func:`short_time_population`.
    """
    t = np.asarray(times, dtype=float)
    if np.any(t < 0) or np.any(np.diff(t) <= 0):
        raise ValueError("times must be nonnegative and increasing")
    f_par = np.clip(1.0 - 2.0 * t**2 * env.sum_lambda_sq, 0.0, None)
    f_exp = np.exp(-env.gamma * t)
    return f_par, f_exp


def short_time_population(env: EnvironmentModel, times) -> np.ndarray:
    """Second-order Taylor expansion of ``|c_i(t)|**2``: ``1 - t**2 * Var(H)``."""
    t = np.asarray(times, dtype=float)
    return 1.0 - t**2 * env.sum_lambda_sq
