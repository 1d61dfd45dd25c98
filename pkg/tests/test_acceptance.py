"""Acceptance suite: one PASS/FAIL line per criterion (``pytest tests/test_acceptance.py -s``)."""

import math
import time

import numpy as np
import pytest

from qnoise.bounds import binary_entropy, error_volume, gv_feasible, gv_max_n, hamming_min_n, max_error_rate, repetition_error
from qnoise.codes import (
    conjugate_bitflip_correction,
    correct,
    encode_phase3,
    five_code,
    qec_benefit,
    shor9_code,
    verify_conditions,
)
from qnoise.environment import EnvironmentSpec, discretize, fidelity_curves, integrate
from qnoise.states import PauliString, StateVector, apply_pauli, partial_trace, purity, random_density, random_state, Z
from qnoise.symmetrize import (
    build_projector,
    estimate_zeno_constant,
    first_order_report,
    product_state,
    project,
    two_copy_map,
    zeno_success,
)
from qnoise.states import X, Y

H1 = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def test_1_hamming_min_n(verdict):
    hamming_min_n(1, 1)  # warm up
    best = min(_timed(lambda: hamming_min_n(1, 1)) for _ in range(20))
    n = hamming_min_n(1, 1)
    eq = 2 * error_volume(5, 1) == 2**5
    ok = n == 5 and eq and best < 1e-3
    verdict("1  hamming_min_n(1,1) = 5 with 2*16 = 2^5, < 1 ms", ok, f"n={n}, equality={eq}, {best * 1e6:.0f} us")
    assert ok


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def test_2_gv_max_n(verdict):
    n = gv_max_n(1, 1)
    # exact integers on both sides of the crossing
    lhs9, lhs10 = 2 * error_volume(9, 2), 2 * error_volume(10, 2)
    ok = n == 9 and lhs9 >= 2**9 and lhs10 < 2**10 and gv_feasible(1, 1, 9) and not gv_feasible(1, 1, 10)
    verdict("2  gv_max_n(1,1) = 9", ok, f"n={n}, 2*V(9,2)={lhs9} vs 512, 2*V(10,2)={lhs10} vs 1024")
    assert ok


def test_3_rate_root(verdict):
    root = max_error_rate(tol=1e-8)
    # independent check of the sign change around the root
    f = lambda x: 1 - x * math.log2(3) - binary_entropy(x)
    ok = abs(root - 0.18929) <= 1e-4 and f(root - 1e-6) > 0 > f(root + 1e-6)
    verdict("3  asymptotic Hamming root = 0.18929 +- 1e-4", ok, f"root={root:.8f}")
    assert ok


def test_4_five_qubit_code(verdict):
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    code = five_code()
    rep = verify_conditions(code)
    worst = 1.0
    errors = [e for e in rep.errors if e.weight == 1]
    for _ in range(50):
        psi = code.encode(random_state(1, rng).amplitudes)
        for e in errors:
            out = correct(code, apply_pauli(psi, e), rng).state
            worst = min(worst, abs(psi.inner(out)) ** 2)
    elapsed = time.perf_counter() - t0
    ok = (len(errors) == 15 and abs(1 - worst) <= 1e-10 and rep.satisfies_nondegenerate
          and rep.nondegenerate_violation < 1e-10 and elapsed < 10)
    verdict("4  five-qubit code: 15 errors x 50 states, nondegenerate, < 10 s", ok,
            f"min F={worst:.15f}, max off-diag={rep.nondegenerate_violation:.1e}, {elapsed:.2f} s")
    assert ok


def test_5_shor9_degeneracy(verdict):
    rng = np.random.default_rng(5)
    code = shor9_code()
    rep = verify_conditions(code)
    a, b = rep.worst_pair
    k, m = rep.errors.index(a), rep.errors.index(b)
    unit = abs(abs(rep.ancilla_gram[k, m]) - 1) < 1e-10
    z_pair = set((a.labels + b.labels).replace("I", "")) == {"Z"}
    errors = [e for e in rep.errors if e.weight == 1]
    worst = 1.0
    for _ in range(10):
        psi = code.encode(random_state(1, rng).amplitudes)
        for e in errors:
            out = correct(code, apply_pauli(psi, e), rng).state
            worst = min(worst, abs(psi.inner(out)) ** 2)
    ok = rep.satisfies_general and not rep.satisfies_nondegenerate and unit and z_pair and len(errors) == 27 \
        and abs(1 - worst) <= 1e-10
    verdict("5  Shor-9: general ok, nondegenerate fails on a Z pair, 27 errors recovered", ok,
            f"pair={a.labels}/{b.labels}, min F={worst:.15f}")
    assert ok


def test_6_conjugate_basis_duality(verdict):
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(20):
        ab = random_state(1, rng).amplitudes
        target = H1 @ np.outer(ab, ab.conj()) @ H1
        enc = encode_phase3(*ab)
        for q in range(3):
            out = conjugate_bitflip_correction(apply_pauli(enc, PauliString.single(3, q, "Z")))
            first = partial_trace(out.to_density(), {0}).matrix
            worst = max(worst, abs(1 - np.real(np.trace(first @ target))))
    ok = worst <= 1e-10
    verdict("6  Hadamard-conjugated bit-flip unitary fixes every single phase flip", ok, f"max infidelity={worst:.1e}")
    assert ok


SPEC_BATH = EnvironmentSpec.flat(gamma=1.0, omega0=100.0, n_modes=400, half_window=20.0)


def test_7a_short_time(verdict):
    env = discretize(SPEC_BATH)
    t_max = 0.01 / env.width
    traj = integrate(env, t_max, 20)
    f_par, _ = fidelity_curves(env, traj.times)
    resid = float(np.abs(traj.excited_population - f_par).max())
    drift = float(np.abs(traj.norms - 1).max())
    ok = resid <= 1e-4 and drift <= 1e-8
    verdict("7a short-time |c_i|^2 vs 1 - 2t^2 sum(lambda^2) <= 1e-4 for t <= 0.01/width", ok,
            f"width={env.width:g}, residual={resid:.1e}, norm drift={drift:.1e}")
    assert ok


def test_7b_exponential_regime(verdict):
    t0 = time.perf_counter()
    env = discretize(SPEC_BATH)
    traj = integrate(env, 3.0 / env.gamma, 300)
    elapsed = time.perf_counter() - t0
    _, f_exp = fidelity_curves(env, traj.times)
    window = (traj.times >= 0.2 / env.gamma) & (traj.times <= 3.0 / env.gamma)
    rel = float(np.max(np.abs(traj.excited_population[window] / f_exp[window] - 1)))
    drift = float(np.abs(traj.norms - 1).max())
    ok = rel <= 0.02 and drift <= 1e-8 and elapsed < 30
    verdict("7b |c_i|^2 within 2% of exp(-gamma t) on [0.2, 3]/gamma (400 modes, +-20 gamma)", ok,
            f"max rel dev={rel:.4f}, norm drift={drift:.1e}, {elapsed:.1f} s")
    assert ok


def test_7_default_bath_meets_exponential_tolerance(verdict):
    env = discretize(EnvironmentSpec.flat())
    traj = integrate(env, 3.0, 300)
    _, f_exp = fidelity_curves(env, traj.times)
    window = traj.times >= 0.2
    rel = float(np.max(np.abs(traj.excited_population[window] / f_exp[window] - 1)))
    ok = rel <= 0.02 and np.abs(traj.norms - 1).max() <= 1e-8
    verdict("7* library default bath (1000 modes, +-50 gamma) within 2% of exp(-gamma t)", ok, f"max rel dev={rel:.4f}")
    assert ok


def test_8_qec_benefit(verdict):
    env = discretize(EnvironmentSpec.flat())
    g = env.gamma
    times = np.linspace(0, 0.3 / g, 50)
    code = five_code()
    margins, adv = [], []
    for logical in ([1, 0], [0, 1], np.array([1, 1]) / math.sqrt(2), np.array([1, -1]) / math.sqrt(2),
                    np.array([1, 1j]) / math.sqrt(2), np.array([1, -1j]) / math.sqrt(2)):
        tab = qec_benefit(code, env, times, logical, check=False)
        margins.append(float(np.min(tab.f_ec - tab.bound)))
        early = (g * times <= 0.1) & (times > 0)
        adv.append(bool(np.all(tab.f_ec[early] > tab.f_exp[early])))
    small = np.geomspace(1e-3, 1e-2, 8) / g
    tab = qec_benefit(code, env, small)
    power, log_c = np.polyfit(np.log(small), np.log(1 - tab.f_ec), 1)
    coef = math.exp(log_c)
    ok = min(margins) >= -1e-9 and all(adv) and power >= 1.9 and coef <= 10 * g**2
    verdict("8  F_ec >= bound on 50 points, F_ec > F_exp for gamma t <= 0.1, quadratic onset", ok,
            f"min margin={min(margins):.2e}, power={power:.3f}, coef={coef:.3f}")
    assert ok


def test_9_symmetrisation(verdict):
    rng = np.random.default_rng(9)
    s2 = build_projector(2)
    worst, strict = 0.0, True
    for _ in range(100):
        rho = random_density(1, rng)
        out = project(product_state([rho, rho]), s2)
        worst = max(worst, float(np.abs(out.single_copy.matrix - two_copy_map(rho).matrix).max()))
        strict &= purity(out.single_copy) > purity(rho)
    # fixed points: pure states and I/2
    from qnoise.states import DensityOperator
    fixed = [random_state(1, rng).to_density(), DensityOperator.maximally_mixed(1)]
    fixed_ok = all(abs(purity(two_copy_map(r)) - purity(r)) < 1e-14 for r in fixed)

    rho0 = StateVector.raw([1, 1]).to_density()
    pert = 0.01 * (Z @ rho0.matrix @ Z - rho0.matrix)
    rs = np.array([2, 4, 8])
    inf = np.array([1 - first_order_report(rho0, [pert] * r).fidelity_after_exact for r in rs])
    c = np.sum(inf / rs) / np.sum(1 / rs**2)  # least-squares c in c/R
    resid = float(np.max(np.abs(inf - c / rs) / inf))
    ok = worst <= 1e-12 and strict and fixed_ok and resid <= 0.10
    verdict("9  two-copy map to 1e-12 on 100 states, purity gain, 1/R fit <= 10%", ok,
            f"max err={worst:.1e}, 1/R residual={resid:.2e}")
    assert ok


def test_10a_zeno_limit(verdict):
    v = zeno_success(1, 1000)
    ok = v >= 0.999999
    verdict("10a zeno_success(1, 1000) >= 0.999999", ok, f"value={v:.9f}")
    assert ok


def test_10b_zeno_monotone(verdict):
    grid = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000]
    vals = [zeno_success(1, n) for n in grid]
    ok = all(b > a for a, b in zip(vals, vals[1:]))
    verdict("10b zeno_success monotone in n over the emitted grid", ok)
    assert ok


def test_10c_second_order_onset(verdict):
    k, power = estimate_zeno_constant(StateVector.raw([1, 1]), [X, Y], eps_values=np.geomspace(1e-3, 1e-2, 6))
    ok = power >= 1.9
    verdict("10c projection failure onset is second order in perturbation scale", ok, f"power={power:.3f}, k={k:.3f}")
    assert ok


def test_11_repetition_baseline(verdict):
    exact = repetition_error(0.1) == pytest.approx(0.028, abs=1e-15)
    ps = np.geomspace(1e-5, 1e-3, 6)
    slope = np.polyfit(ps**2, [repetition_error(p) for p in ps], 1)[0]
    ok = bool(exact) and abs(slope - 3) <= 0.03
    verdict("11 repetition_error(0.1) = 0.028, leading coefficient 3 within 1%", ok,
            f"value={repetition_error(0.1)!r}, coef={slope:.5f}")
    assert ok
