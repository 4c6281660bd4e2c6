"""Sweep orchestration and structured output.

Every run emits diff-able CSV tables with a fixed column order and a
``run.json`` manifest (config hash, tool version, wall time).  Floats are
written with 17 significant digits so they re-parse to the identical
double.  Row order is fixed: system as declared, then p ascending with
the infinite index last, then t, then alpha.  Identical configs and
seeds therefore produce byte-identical tables; only the wall time in the
manifest varies.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import classical as cl
from . import fcs as fc
from . import functionals as fn
from . import measures as ms
from . import models as md
from . import quantum as qm
from . import verify as vf
from .config import ExperimentConfig, default_config
from .errors import ConfigValidationError
from .version import __version__

DEFAULT_OUTPUT_DIR = "out"

CURVE_COLUMNS = ("system_id", "p", "t", "alpha", "value")
DISTRIBUTION_COLUMNS = ("system_id", "t", "atom", "weight", "measure")
CHECK_COLUMNS = ("system_id", "check_name", "residual", "tolerance", "status")


def format_float(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return "%.17g" % value


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format_float(float(value))


@dataclass
class ResultTable:
    columns: tuple
    rows: list = field(default_factory=list)

    def append(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(
                f"row width {len(values)} does not match {self.columns}")
        self.rows.append(values)

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        lines.extend(",".join(_cell(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"


def _check_rows(table: ResultTable, results) -> None:
    for r in results:
        table.append(r.system_id, r.name, r.residual, r.tolerance, r.status)


def _classical_times(cfg: ExperimentConfig) -> tuple:
    times = cfg.classical_times()
    if not times:
        raise ConfigValidationError(
            "sweep.t: classical sweeps need at least one integer t >= 1")
    return times


def _sorted_grids(cfg: ExperimentConfig):
    return (tuple(sorted(set(cfg.alphas))), tuple(sorted(set(cfg.ps))),
            tuple(sorted(set(cfg.ts))))


def _core_system(tag: str, obj):
    return obj.system if tag == "reservoir" else obj


# -- subcommand drivers ---------------------------------------------------

def run_functionals(cfg: ExperimentConfig) -> dict:
    """One curve row per (system, p, t, alpha); classical rows have empty p."""
    alphas, ps, ts = _sorted_grids(cfg)
    curves = ResultTable(CURVE_COLUMNS)
    for system_id, tag, obj in cfg.build_systems():
        if tag == "classical":
            for t in _classical_times(cfg):
                for a in alphas:
                    curves.append(system_id, None, float(t), a,
                                  cl.classical_functional(obj, a, t))
        else:
            system = _core_system(tag, obj)
            for p in ps:
                for t in ts:
                    for a in alphas:
                        curves.append(system_id, p, t, a,
                                      fn.functional(system, p, a, t))
    return {"curves": curves}


def run_fcs(cfg: ExperimentConfig) -> dict:
    """Counting and modular measures, their CGF curve, and agreement rows."""
    alphas, _, ts = _sorted_grids(cfg)
    tol = vf.merge_tolerances(cfg.tolerances)
    distributions = ResultTable(DISTRIBUTION_COLUMNS)
    curves = ResultTable(CURVE_COLUMNS)
    checks = ResultTable(CHECK_COLUMNS)
    for system_id, tag, obj in cfg.build_systems():
        if tag == "classical":
            for t in _classical_times(cfg):
                measure = cl.es_distribution(obj, t)
                for atom, weight in zip(measure.atoms, measure.weights):
                    distributions.append(system_id, float(t), atom, weight, "ES")
                for a in alphas:
                    curves.append(system_id, None, float(t), a,
                                  cl.classical_functional(obj, a, t))
                res = ms.fluctuation_symmetry_residual(measure, t)
                if obj.is_tri:
                    row = vf.bounded_check("es_symmetry", system_id, res,
                                           tol["tv"])
                else:
                    row = vf.expected_violation_check(
                        "es_symmetry_breaks", system_id, res,
                        tol["violation_floor"])
                _check_rows(checks, [row])
        else:
            system = _core_system(tag, obj)
            for t in ts:
                counting = fc.fcs_distribution(system, t)
                modular = fc.modular_spectral_measure(system, t,
                                                      check_identity=False)
                for atom, weight in zip(counting.atoms, counting.weights):
                    distributions.append(system_id, t, atom, weight, "P")
                for atom, weight in zip(modular.atoms, modular.weights):
                    distributions.append(system_id, t, atom, weight, "Q")
                for a in alphas:
                    curves.append(system_id, None, t, a,
                                  fc.fcs_cgf(counting, a, t))
                tv = ms.total_variation(counting, modular)
                if system.tri:
                    row = vf.bounded_check("fcs_tv_distance", system_id, tv,
                                           tol["tv"])
                else:
                    row = vf.expected_violation_check(
                        "fcs_tv_distance_breaks", system_id, tv,
                        tol["violation_floor"])
                _check_rows(checks, [row])
    return {"curves": curves, "distributions": distributions, "checks": checks}


def run_classical(cfg: ExperimentConfig) -> dict:
    """Classical sweep: curves, rate distributions, identity residues."""
    alphas, _, _ = _sorted_grids(cfg)
    tol = vf.merge_tolerances(cfg.tolerances)
    curves = ResultTable(CURVE_COLUMNS)
    distributions = ResultTable(DISTRIBUTION_COLUMNS)
    checks = ResultTable(CHECK_COLUMNS)
    times = _classical_times(cfg)
    for system_id, tag, obj in cfg.build_systems():
        if tag != "classical":
            continue
        for t in times:
            for a in alphas:
                curves.append(system_id, None, float(t), a,
                              cl.classical_functional(obj, a, t))
            measure = cl.es_distribution(obj, t)
            for atom, weight in zip(measure.atoms, measure.weights):
                distributions.append(system_id, float(t), atom, weight, "ES")
        worst = 0.0
        for t in times:
            for a in (-0.5, 0.3, 0.5, 1.2):
                direct = cl.classical_functional(obj, a, t)
                transfer = cl.classical_transfer_functional(obj, 2.0, a, t)
                target = direct if obj.is_tri \
                    else cl.classical_functional(obj, 1.0 - a, t)
                worst = max(
                    worst,
                    abs(direct - cl.variational_functional(obj, a, t)),
                    abs(direct - cl.renyi_identity_check(obj, a, t)),
                    abs(transfer - target),
                )
        _check_rows(checks, [vf.bounded_check(
            "classical_identity_fourway", system_id, worst,
            tol["classical_identity"])])
        sym = max(abs(cl.classical_functional(obj, a, times[0])
                      - cl.classical_functional(obj, 1.0 - a, times[0]))
                  for a in (-1.0, -0.25, 0.25, 2.0))
        if obj.is_tri:
            row = vf.bounded_check("classical_symmetry", system_id, sym,
                                   tol["symmetry"])
        else:
            row = vf.expected_violation_check(
                "classical_symmetry_breaks", system_id, sym,
                tol["violation_floor"])
        _check_rows(checks, [row])
    return {"curves": curves, "distributions": distributions, "checks": checks}


def run_model(cfg: ExperimentConfig) -> str:
    """Human-readable dump of the assembled two-reservoir systems."""
    reservoirs = [(sid, obj) for sid, tag, obj in cfg.build_systems()
                  if tag == "reservoir"]
    if not reservoirs:
        reservoirs = [("canonical", md.canonical_model())]
    blocks = []
    for system_id, model in reservoirs:
        system = model.system
        lines = [f"system {system_id}"]
        lines.append(f"  dims: {model.dims[0]} x {model.dims[1]} "
                     f"(composite {model.dim})")
        lines.append(f"  beta_left={format_float(model.beta_left)} "
                     f"beta_right={format_float(model.beta_right)}")
        lines.append(f"  tri: {system.tri}")
        lines.append("  hamiltonian:")
        lines.extend("    " + _matrix_row(row)
                     for row in system.hamiltonian.matrix)
        lines.append("  reference state eigenvalues: "
                     + " ".join(format_float(v)
                                for v in system.reference_eig().eigenvalues))
        phi_left, phi_right = md.flux_observables(model)
        lines.append("  flux norms: left="
                     + format_float(float(np.linalg.norm(phi_left)))
                     + " right="
                     + format_float(float(np.linalg.norm(phi_right))))
        sigma = qm.entropy_production_observable(system).matrix
        lines.append("  entropy production norm: "
                     + format_float(float(np.linalg.norm(sigma))))
        lines.append("  mean entropy production at t=1: "
                     + format_float(qm.mean_ep_expectation(system, 1.0)))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def _matrix_row(row) -> str:
    cells = []
    for z in row:
        z = complex(z)
        if abs(z.imag) < 1e-15:
            cells.append("%.6g" % z.real)
        else:
            cells.append("%.6g%+.6gj" % (z.real, z.imag))
    return "[" + ", ".join(cells) + "]"


# -- verification ---------------------------------------------------------

def _determinism_check() -> list:
    """Byte-identical tables and masked-manifest equality across two runs."""
    cfg = replace(default_config(), alphas=(0.0, 0.5, 1.0),
                  ps=(2.0, math.inf), ts=(1.0,))
    snapshots = []
    for _ in range(2):
        tables = run_functionals(cfg)
        with tempfile.TemporaryDirectory() as scratch:
            manifest = write_outputs(scratch, "functionals", tables, cfg, 0.0)
            with open(os.path.join(scratch, "curves.csv"), "rb") as handle:
                data = handle.read()
        manifest = dict(manifest)
        manifest.pop("wall_time_seconds")
        snapshots.append((data, json.dumps(manifest, sort_keys=True)))
    same = snapshots[0] == snapshots[1]
    return [vf.bounded_check("runner_determinism", "runner",
                             0.0 if same else 1.0, 0.5)]


def run_verify(cfg: ExperimentConfig):
    """Full battery plus runner-level checks; returns (results, passed)."""
    extra = []
    if cfg.from_file:
        extra = cfg.build_systems()
    results = vf.run_battery(extra_systems=extra, tolerances=cfg.tolerances)
    results += _determinism_check()
    return results, vf.suite_passed(results)


def render_check_table(results) -> str:
    name_w = max(len("check"), max((len(r.name) for r in results), default=0))
    sys_w = max(len("system"), max((len(r.system_id) for r in results),
                                   default=0))
    lines = [f"{'check':<{name_w}}  {'system':<{sys_w}}  "
             f"{'residual':>12}  {'tolerance':>12}  status"]
    for r in results:
        lines.append(f"{r.name:<{name_w}}  {r.system_id:<{sys_w}}  "
                     f"{r.residual:>12.3e}  {r.tolerance:>12.3e}  {r.status}")
    total = len(results)
    passed = sum(1 for r in results if r.status == vf.PASS)
    expected = sum(1 for r in results if r.status == vf.XFAIL)
    failed = total - passed - expected
    lines.append(f"summary: {total} checks, {passed} pass, "
                 f"{expected} expected-fail, {failed} fail")
    return "\n".join(lines)


# -- emission -------------------------------------------------------------

def checks_to_table(results) -> ResultTable:
    table = ResultTable(CHECK_COLUMNS)
    _check_rows(table, results)
    return table


def write_outputs(output_dir: str, subcommand: str, tables: dict,
                  cfg: ExperimentConfig, wall_time: float) -> dict:
    """Write non-empty tables as CSV plus the run manifest; returns it."""
    os.makedirs(output_dir, exist_ok=True)
    gate = {"curves": cfg.write_curves,
            "distributions": cfg.write_distributions,
            "checks": cfg.write_checks}
    rows_written = {}
    for name in sorted(tables):
        table = tables[name]
        if table is None or not table.rows or not gate.get(name, True):
            continue
        path = os.path.join(output_dir, f"{name}.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(table.to_csv())
        rows_written[name] = len(table.rows)
    manifest = {
        "config_sha256": hashlib.sha256(cfg.source_text.encode()).hexdigest(),
        "rows": rows_written,
        "seed": cfg.seed,
        "subcommand": subcommand,
        "tool_version": __version__,
        "wall_time_seconds": wall_time,
    }
    with open(os.path.join(output_dir, "run.json"), "w", encoding="utf-8",
              newline="\n") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return manifest


def execute(cfg: ExperimentConfig, subcommand: str, output_dir=None):
    """Run one data-producing subcommand end to end; returns the manifest."""
    drivers = {"functionals": run_functionals, "fcs": run_fcs,
               "classical": run_classical}
    start = time.monotonic()
    tables = drivers[subcommand](cfg)
    wall = time.monotonic() - start
    target = output_dir or cfg.output_dir or DEFAULT_OUTPUT_DIR
    return write_outputs(target, subcommand, tables, cfg, wall), target
