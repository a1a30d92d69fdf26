"""Dispatch a validated config to its module and write reproducible outputs.

Every payload (CSV, JSON, JSONL) depends only on the config, so reruns are
byte-identical; the manifest adds wall time and content digests and is
written last, atomically, whether the run finished or a guard aborted it.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path

import numpy as np

from .. import __version__
from ..algebra import Model, vacuum_expectation
from ..algebra.parse import ParseError, parse_expression
from ..algebra.serialize import to_json, to_text
from ..algebra.smatrix import bogoliubov_truncated, interaction, s_matrix_truncated
from ..errors import (KRatioExceeded, LogDomain, RGFlowError, SchemaViolation, SigmaNonPositive,
                      SingularLocus, StabilityGuard, StepUnderflow)
from ..flows import check_boundedness, integrate_flow, model_for
from ..flows.couplings import DiracCouplings, MSRCouplings, ScalarCouplings, column_names
from ..flows.integrate import Termination
from ..lpa import KERNEL_BACKEND, FieldGrid, FlowDiagnostics, Guards, ansatz_boundary, fit_couplings, solve_flow
from ..lpa.fit import ansatz_values
from ..lpa.grid import AXIS_NAMES
from ..lpa.solver import BoundaryData
from .config import RunConfig

EXIT_OK, EXIT_SCHEMA, EXIT_SINGULAR, EXIT_GUARD, EXIT_INTERNAL = 0, 2, 3, 4, 5

_ALGEBRA_MODELS = {"two_scalar": Model.TWO_SCALAR, "msr": Model.MSR, "dirac": Model.DIRAC}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (SchemaViolation, ParseError)):
        return EXIT_SCHEMA
    if isinstance(exc, (SingularLocus, LogDomain)):
        return EXIT_SINGULAR
    if isinstance(exc, (StabilityGuard, SigmaNonPositive, KRatioExceeded, StepUnderflow)):
        return EXIT_GUARD
    return EXIT_INTERNAL


def fmt(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return f"{float(x):.16e}"


class _Writer:
    def __init__(self, out_dir: Path):
        self.out = out_dir
        self.out.mkdir(parents=True, exist_ok=True)
        self.files: dict[str, str] = {}

    def write(self, name: str, text: str) -> None:
        path = self.out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")
        data = text.encode("utf-8")
        with open(tmp, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
        self.files[name] = hashlib.sha256(data).hexdigest()

    def csv(self, name: str, header, rows) -> None:
        lines = [",".join(header)]
        lines += [",".join(v if isinstance(v, str) else fmt(v) for v in row) for row in rows]
        self.write(name, "\n".join(lines) + "\n")

    def json(self, name: str, payload) -> None:
        self.write(name, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _couplings(cfg: RunConfig):
    s = cfg.settings
    if cfg.model == "two_scalar":
        return ScalarCouplings(*(s[n] for n in ("U0", "m1_sq", "m2_sq", "lambda1", "lambda2", "lambda3", "mu_sq")))
    if cfg.model == "msr":
        return MSRCouplings(s["U0"], s["m_sq"], s["lambda"], s["D"], s["mu_sq"], dimension=s["dimension"])
    return DiracCouplings(s["U0"], s["m"], s["lambda"])


def _run_flow(cfg: RunConfig, w: _Writer) -> dict:
    state = _couplings(cfg)
    a, b = cfg["k"]
    traj = integrate_flow(model_for(state, cfg["eps_sing"]), state.to_array(), (a, b),
                          rtol=cfg["rtol"], atol=cfg["atol"])
    w.csv("trajectory.csv", ("k",) + column_names(state),
          ([k, *y] for k, y in zip(traj.ks, traj.ys)))
    final = state.with_values(traj.ys[-1])
    summary = {
        "termination": traj.termination.value,
        "message": traj.message,
        "bracket": None if traj.bracket is None else [float(v) for v in traj.bracket],
        "accepted_steps": traj.accepted,
        "rejected_steps": traj.rejected,
        "final": {n: float(v) for n, v in zip(column_names(state), traj.ys[-1])},
        "k_final": float(traj.ks[-1]),
    }
    if isinstance(state, ScalarCouplings):
        bd = check_boundedness(final)
        summary["bounded_below"] = {"ok": bd.ok, "failed": bd.failed, "margin": str(bd.margin)}
    w.json("summary.json", summary)
    if traj.termination is not Termination.REACHED_END:
        traj.raise_for_termination()
    return summary


def _grid_model(cfg: RunConfig) -> str:
    return "two_scalar" if cfg.model == "two_scalar" else f"msr_{cfg['dimension']}"


def _checkpoints(a: float, b: float, every: float | None) -> list[float]:
    if not every:
        return []
    n = int(np.floor((b - a) / every + 1e-9))
    return [round(a + i * every, 12) for i in range(1, n + 1)]


def _run_lpa(cfg: RunConfig, w: _Writer, checkpoint_every: float | None) -> dict:
    state = _couplings(cfg)
    a, b = cfg["k"]
    grid = FieldGrid(tuple(tuple(float(v) for v in ab) for ab in cfg["bounds"]), tuple(cfg["points"]))
    model = _grid_model(cfg)
    if cfg["boundary"] == "ode":
        traj = integrate_flow(model_for(state, cfg["eps_sing"]), state.to_array(), (a, b),
                              rtol=cfg["ode_rtol"], atol=cfg["ode_rtol"] * 1e-2)
        traj.raise_for_termination()
        boundary = ansatz_boundary(grid, model, lambda k: state.with_values(traj.dense(k)), a)
    else:
        psi = ansatz_boundary(grid, model, lambda k: state, a).psi_init
        boundary = BoundaryData(psi, lambda k, bx, by: ansatz_values(model, state, bx, by))
    guards = Guards(mu_sq=getattr(state, "mu_sq", 1.0), safety=cfg["safety"], min_step=cfg["min_step"],
                    max_step=cfg.get("max_step"), k_ratio_cap=cfg["k_ratio_cap"], eps_sing=cfg["eps_sing"])
    every = checkpoint_every if checkpoint_every is not None else cfg.get("checkpoint_every")
    marks = _checkpoints(a, b, every)
    names = column_names(state)
    axes = AXIS_NAMES[model]
    fits, index = [], [0]

    def save(surface, diag):
        x, y = surface.grid.mesh()
        w.csv(f"surfaces/surface_{index[0]:04d}.csv", (*axes, "u"),
              zip(x.ravel(), y.ravel(), surface.values.ravel()))
        fit = fit_couplings(surface, mu_sq=getattr(state, "mu_sq", 1.0))
        fits.append([surface.k, *fit.couplings.to_array(), fit.residual])
        index[0] += 1

    save(boundary.psi_init, None)
    diag = FlowDiagnostics()
    try:
        result = solve_flow(boundary, b, guards, checkpoints=marks, on_checkpoint=save, diagnostics=diag)
    finally:
        w.write("diagnostics.jsonl", "".join(json.dumps(r.as_dict(), sort_keys=True) + "\n"
                                             for r in diag.records))
        w.csv("fits.csv", ("k", *names, "fit_residual"), fits)
    summary = {
        "steps": result.steps,
        "sigma_min": diag.sigma_min,
        "k_ratio_max": diag.k_ratio_max,
        "seminorms": diag.seminorms,
        "checkpoints": [s.k for s in result.checkpoints],
        "grid": {"bounds": [list(ab) for ab in grid.bounds], "points": list(grid.points)},
    }
    w.json("summary.json", summary)
    # the backend is environment, not payload, so it goes to the manifest only
    return summary | {"kernels": KERNEL_BACKEND}


def _run_expand(cfg: RunConfig, w: _Writer, order: int | None) -> dict:
    model = _ALGEBRA_MODELS[cfg.model]
    n = cfg["order"] if order is None else order
    op = cfg["operation"]
    obs = parse_expression(model, cfg["observable"])
    if op == "product":
        result = obs
    elif op in ("smatrix", "smatrix_inverse"):
        result = s_matrix_truncated(obs, n, inverse=op == "smatrix_inverse")
    else:
        result = bogoliubov_truncated(interaction(model), obs, n, oriented=cfg["oriented"],
                                      vacuum_only=cfg["vacuum"])
    if cfg["vacuum"]:
        result = vacuum_expectation(result)
    w.write("functional.json", to_json(result))
    w.write("functional.txt", to_text(result) + "\n")
    return {"terms": len(list(result)), "order": n}


def run(cfg: RunConfig, out_dir, checkpoint_every: float | None = None, order: int | None = None):
    """Execute one run; returns (manifest dict, exit code). Never raises for module errors."""
    w = _Writer(Path(out_dir))
    start = time.perf_counter()
    termination = {"cause": "completed", "message": ""}
    code, summary = EXIT_OK, None
    try:
        if cfg.command == "flow":
            summary = _run_flow(cfg, w)
        elif cfg.command == "lpa":
            summary = _run_lpa(cfg, w, checkpoint_every)
        else:
            summary = _run_expand(cfg, w, order)
    except Exception as exc:  # every failure still gets a manifest
        code = exit_code_for(exc)
        termination = {"cause": type(exc).__name__, "message": str(exc)}
        for attr in ("k", "node", "value", "which", "step"):
            val = getattr(exc, attr, None)
            if val is not None:
                termination[attr] = [int(v) for v in val] if attr == "node" else (
                    val if isinstance(val, str) else float(val))
        if code == EXIT_INTERNAL and not isinstance(exc, RGFlowError):
            termination["internal"] = True
    manifest = {
        "artifact": "rgflow",
        "version": __version__,
        "config": cfg.as_dict(),
        "overrides": {"checkpoint_every": checkpoint_every, "order": order},
        "termination": termination,
        "exit_code": code,
        "summary": summary,
        "wall_time_s": round(time.perf_counter() - start, 6),
        "outputs": [{"path": name, "sha256": digest} for name, digest in sorted(w.files.items())],
    }
    w.json("manifest.json", manifest)
    return manifest, code
