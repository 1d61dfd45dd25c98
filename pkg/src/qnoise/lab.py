"""Named experiment scenarios producing tables for CSV/JSON output."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import bounds
from .codes import get_code, qec_benefit, qec_benefit_mc, verify_conditions, build_recovery
from .config import ExperimentConfig
from .environment import EnvironmentModel, EnvironmentSpec, discretize, fidelity_curves, integrate, dephasing_channel
from .states import StateVector
from .symmetrize import first_order_report, zeno_success

LOGICAL_STATES = {
    "0": (1.0, 0.0),
    "1": (0.0, 1.0),
    "+": (1 / math.sqrt(2), 1 / math.sqrt(2)),
    "-": (1 / math.sqrt(2), -1 / math.sqrt(2)),
    "+i": (1 / math.sqrt(2), 1j / math.sqrt(2)),
    "-i": (1 / math.sqrt(2), -1j / math.sqrt(2)),
}


@dataclass
class Table:
    columns: list[str]
    rows: list[list[Any]]
    summary: dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> list[Any]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def _plain(value):
    """Convert numpy scalars to Python ones so CSV and JSON print the same digits."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def _cell(value) -> str:
    value = _plain(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_cell(v) for v in row])
    for key, value in table.summary.items():
        buf.write(f"# {key}={_cell(value)}\n")
    return buf.getvalue()


def render_json(table: Table, config: ExperimentConfig) -> str:
    doc = {
        "config": config.to_dict(),
        "columns": table.columns,
        "rows": [[_plain(v) for v in row] for row in table.rows],
        "summary": {k: _plain(v) for k, v in table.summary.items()},
    }
    return json.dumps(doc, indent=2) + "\n"


def write_table(table: Table, config: ExperimentConfig, path: str | Path) -> None:
    text = render_csv(table) if config.format == "csv" else render_json(table, config)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _environment(p: dict) -> EnvironmentModel:
    gamma, omega0 = p["gamma"], p["omega0"]
    hw = p["half_window"] * gamma
    spec = EnvironmentSpec(
        omega0=omega0,
        coupling=gamma / (2 * math.pi),
        omega_min=omega0 - hw,
        omega_max=omega0 + hw,
        n_modes=p["n_modes"],
        spectrum=p["spectrum"],
        width=p["width"],
    )
    return discretize(spec)


def run_decay(config: ExperimentConfig) -> Table:
    """``half_window`` is in units of gamma; times are absolute."""
    p = config.parameters
    env = _environment(p)
    traj = integrate(env, p["t_max"], p["steps"])
    f_par, f_exp = fidelity_curves(env, traj.times)
    f_num = np.abs(traj.c_i) ** 2
    rows = [[t, c.real, c.imag, fn, fp, fe]
            for t, c, fn, fp, fe in zip(traj.times, traj.c_i, f_num, f_par, f_exp)]
    summary = {
        "model_gamma": env.gamma,
        "level_shift": env.delta,
        "sum_lambda_sq": env.sum_lambda_sq,
        "max_norm_drift": float(np.abs(traj.norms - 1).max()),
    }
    return Table(["t", "re_ci", "im_ci", "F_numeric", "F_par", "F_exp"], rows, summary)


def run_qec_benefit(config: ExperimentConfig) -> Table:
    p = config.parameters
    gamma = p["gamma"]
    spec = EnvironmentSpec.flat(gamma=gamma, omega0=100.0 * gamma)
    env = discretize(spec)
    times = np.linspace(0.0, p["t_max"], p["points"])
    code = get_code("five")
    logical = LOGICAL_STATES[p["logical"]]
    table = qec_benefit(code, env, times, logical, decay=p["decay"])
    columns = ["t", "F_ec", "bound", "F_exp_single", "advantage"]
    rows = [list(r) for r in table.rows()]
    if p["mode"] == "mc":
        mc = qec_benefit_mc(code, env, times, logical, trials=p["trials"], seed=config.seed, decay=p["decay"])
        columns.append("F_ec_mc")
        for row, v in zip(rows, mc):
            row.append(v)
    return Table(columns, rows, {"code": code.name, "logical": p["logical"]})


def run_symmetrize(config: ExperimentConfig) -> Table:
    """Every copy of a pure state dephased with probability ``p``, then projected."""
    p = config.parameters
    rho0 = StateVector.from_array(LOGICAL_STATES[p["state"]]).to_density()
    noisy = dephasing_channel(p["p"]).apply(rho0)
    pert = noisy.matrix - rho0.matrix
    rows = []
    for r in p["r_values"]:
        rep = first_order_report(rho0, [pert] * r)
        rows.append([r, rep.fidelity_before, rep.fidelity_after_exact,
                     rep.fidelity_after_predicted, rep.success_prob])
    return Table(["R", "F_before", "F_after_exact", "F_after_predicted", "success_prob"], rows,
                 {"p": p["p"], "state": p["state"]})


def run_zeno(config: ExperimentConfig) -> Table:
    p = config.parameters
    rows = [[n, zeno_success(p["k"], n)] for n in p["n_values"]]
    return Table(["n_projections", "cumulative_success"], rows, {"k": p["k"]})


def run_bounds(config: ExperimentConfig) -> Table:
    p = config.parameters
    l, t = p["l"], p["t"]
    rows = []
    for n in range(l, p["n_max"] + 1):
        rows.append([n, bounds.hamming_feasible(l, t, n), bounds.gv_feasible(l, t, n),
                     2**l * bounds.error_volume(n, t), 2**l * bounds.error_volume(n, 2 * t), 2**n])
    summary = {
        "l": l,
        "t": t,
        "min_n": bounds.hamming_min_n(l, t),
        "gv_max_n": bounds.gv_max_n(l, t),
        "rate_root": round(bounds.max_error_rate(), 5),
    }
    return Table(["n", "hamming_feasible", "gv_feasible", "hamming_count", "gv_count", "dimension"],
                 rows, summary)


def run_verify(config: ExperimentConfig) -> Table:
    code = get_code(config.parameters["code"])
    report = verify_conditions(code)
    rows = [
        ["general", report.satisfies_general, report.general_violation],
        ["nondegenerate", report.satisfies_nondegenerate, report.nondegenerate_violation],
    ]
    summary: dict[str, Any] = {"code": code.name, "n": code.n, "l": code.l, "t": code.t,
                               "n_errors": len(report.errors)}
    if report.worst_pair is not None:
        summary["overlapping_pair"] = f"{report.worst_pair[0]}/{report.worst_pair[1]}"
    if report.satisfies_general:
        summary["syndrome_classes"] = len(build_recovery(code))
    return Table(["condition", "passed", "max_violation"], rows, summary)


RUNNERS = {
    "decay": run_decay,
    "qec-benefit": run_qec_benefit,
    "symmetrize": run_symmetrize,
    "zeno": run_zeno,
    "bounds": run_bounds,
    "verify-code": run_verify,
}


def run(config: ExperimentConfig) -> Table:
    return RUNNERS[config.scenario](config)
