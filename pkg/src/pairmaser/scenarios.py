"""Scenario runs behind the command line: trajectories, steady tables, sweeps.

Every trajectory is written as CSV: ``#``-prefixed provenance lines, then the
header ``j,mean_photon,entropy,entropy_diff,trace_err,offdiag``, then one row
per record with floats at 12 significant digits.  Files are written to a
temporary name and renamed, so a reader never sees a partial file.
"""

import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from .config import ScenarioConfig, to_dict
from .dynamics import PassConfig, RunRecord, iterate_passes, run_until_steady, steady_mean
from .errors import DivergenceError, DomainError
from .fock import vacuum
from .thermo import balance_deviation, is_thermal_entangled, phase_deviation
from .xstate import (PHASE_SCAN_PARAMS, WITH_DOUBLE_COHERENCE, WITHOUT_DOUBLE_COHERENCE,
                     XParams, XState, apply_phase_gate, build_xstate, random_xstate,
                     thermal_entangled_xstate, thermal_product_xstate)

ROW_TRACE_TOL = 1e-9
STEADY_MAX_DIM = 400
MIN_SAMPLE_GAP = 0.3
VERSION = "0.1.0"
DEFAULT_ENTANGLED = thermal_entangled_xstate(0.1, 0.2, 0.5, 0.1)

FIG4_NOTE = ("entropy_diff uses the exponential thermal reference by default; "
             "the geometric reference is the entropy maximizer and never gives positive values")

STEADY_HEADER = ("label", "a11", "a22", "a33", "a44", "re_a14", "im_a14", "re_a23", "im_a23",
                 "closed_form", "phase_law", "iterated", "rel_err", "j_steady", "dim", "trace_err")
SUMMARY_HEADER = ("phase", "xi", "j_steady", "passes_run", "mean_photon", "entropy",
                  "entropy_diff", "offdiag", "weak_steady_mean", "trace_err", "file")


@dataclass
class Trajectory:
    label: str
    path: str
    records: List[RunRecord]
    phase: Optional[float] = None


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def write_csv(path: str, provenance: dict, header: Sequence[str], rows) -> str:
    lines = [f"# {k}={fmt(v)}" for k, v in provenance.items()]
    lines.append(",".join(header))
    lines.extend(",".join(fmt(x) for x in row) for row in rows)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def reservoir_provenance(rho: XState) -> dict:
    return {"a11": repr(rho.a11), "a22": repr(rho.a22), "a33": repr(rho.a33),
            "a44": repr(rho.a44), "a14": repr(complex(rho.a14)), "a23": repr(complex(rho.a23))}


def base_provenance(cfg: ScenarioConfig) -> dict:
    out = {"generator": f"pairmaser {VERSION}"}
    for k, v in to_dict(cfg).items():
        if k in ("output_path", "xstate"):
            continue
        out[k] = v if not isinstance(v, list) else " ".join(repr(float(x)) for x in v)
    if cfg.scenario == "fig4":
        out["note"] = FIG4_NOTE
    return out


def check_rows(records: Sequence[RunRecord], label: str):
    for rec in records:
        if not rec.trace_err < ROW_TRACE_TOL:
            raise DomainError(f"{label}: pass {rec.j} has trace error {rec.trace_err:.3e}")


def pass_config(cfg: ScenarioConfig, xi: Optional[float] = None, max_dim=None) -> PassConfig:
    return PassConfig(xi=cfg.xi if xi is None else xi, passes=cfg.passes,
                      max_dim=cfg.max_dim if cfg.max_dim is not None else max_dim,
                      tol=cfg.tol if cfg.tol is not None else 1e-8,
                      thermal_model=cfg.thermal_model, pass_map=cfg.pass_map,
                      stride=cfg.stride)


def gated_reservoir(source, phase: float) -> XState:
    """Reservoir with inner-coherence phase ``phase``.

    For parameters the phase replaces ``phi``; for explicit entries the
    phase gate is applied on top of the given ``a23``.
    """
    if isinstance(source, XParams):
        return build_xstate(replace(source, phi=phase % (2 * np.pi)))
    return apply_phase_gate(source, phase)


def _trajectory_file(cfg, out_dir, label, rho, records, **extra) -> Trajectory:
    check_rows(records, label)
    prov = base_provenance(cfg)
    prov["trajectory"] = label
    prov.update(extra)
    prov.update(reservoir_provenance(rho))
    path = write_csv(os.path.join(out_dir, f"{cfg.scenario}_{label}.csv"), prov,
                     RunRecord.FIELDS, (r.row() for r in records))
    return Trajectory(label, path, records, extra.get("phase"))


def run_pair(cfg: ScenarioConfig, out_dir: str) -> List[Trajectory]:
    """The two reservoirs that differ only in the double-excitation coherence."""
    out = []
    for label, rho in (("no_double_coherence", WITHOUT_DOUBLE_COHERENCE),
                       ("double_coherence", WITH_DOUBLE_COHERENCE)):
        records = iterate_passes(vacuum(1), rho, pass_config(cfg))
        out.append(_trajectory_file(cfg, out_dir, label, rho, records))
    return out


def run_phase_scan(cfg: ScenarioConfig, out_dir: str) -> List[Trajectory]:
    source = cfg.xstate if cfg.xstate is not None else PHASE_SCAN_PARAMS
    out = []
    for i, phase in enumerate(cfg.phases):
        rho = gated_reservoir(source, phase)
        records = iterate_passes(vacuum(1), rho, pass_config(cfg))
        out.append(_trajectory_file(cfg, out_dir, f"phase{i}", rho, records, phase=phase))
    return out


def sweep_source(cfg: ScenarioConfig):
    """Reservoir gated across the sweep phases (default: thermal-entangled)."""
    return cfg.xstate if cfg.xstate is not None else DEFAULT_ENTANGLED


def steady_reservoirs(cfg: ScenarioConfig):
    """(label, reservoir, interference-law prediction or None) triples."""
    items = []
    if cfg.xstate is None:
        items.append(("no_double_coherence", WITHOUT_DOUBLE_COHERENCE, None))
        items.append(("double_coherence", WITH_DOUBLE_COHERENCE, None))
        items.append(("thermal_product_beta0.7", thermal_product_xstate(0.7), None))
        source, prefix = DEFAULT_ENTANGLED, "thermal_entangled"
    else:
        source, prefix = cfg.xstate, "config"
    for i, phase in enumerate(cfg.phases):
        law = None
        if isinstance(source, XState) and is_thermal_entangled(source) and source.a44 > source.a11:
            law = phase_deviation(*balance_deviation(source), phase)
        items.append((f"{prefix}_phase{i}", gated_reservoir(source, phase), law))
    if cfg.samples:
        rng = np.random.default_rng(cfg.seed)
        items += [(f"random{i}", random_xstate(rng, MIN_SAMPLE_GAP), None)
                  for i in range(cfg.samples)]
    return items


def run_steady_table(cfg: ScenarioConfig, out_dir: str) -> str:
    rows = []
    for label, rho, law in steady_reservoirs(cfg):
        closed = steady_mean(rho)
        pc = pass_config(cfg, max_dim=STEADY_MAX_DIM)
        records, state, j_steady = run_until_steady(vacuum(1), rho, pc, tol=pc.tol,
                                                    max_passes=cfg.passes)
        check_rows(records, label)
        it = records[-1].mean_photon
        rows.append((label, rho.a11, rho.a22, rho.a33, rho.a44,
                     complex(rho.a14).real, complex(rho.a14).imag,
                     complex(rho.a23).real, complex(rho.a23).imag,
                     closed, law, it, it / closed - 1.0 if closed else None,
                     j_steady, state.dim, records[-1].trace_err))
    prov = base_provenance(cfg)
    if cfg.samples:
        prov["random_states"] = f"uniform XParams, rejection-sampled to a44 - a11 >= {MIN_SAMPLE_GAP}"
    return write_csv(os.path.join(out_dir, "steady_table.csv"), prov, STEADY_HEADER, rows)


def _sweep_point(task):
    cfg, out_dir, i, k, phase, xi = task
    rho = gated_reservoir(sweep_source(cfg), phase)
    pc = pass_config(cfg, xi=xi, max_dim=STEADY_MAX_DIM)
    records, state, j_steady = run_until_steady(vacuum(1), rho, pc, tol=pc.tol,
                                                max_passes=cfg.passes)
    label = f"phase{i}_xi{k}"
    traj = _trajectory_file(cfg, out_dir, label, rho, records, phase=phase, xi_point=xi)
    last = records[-1]
    try:
        weak = steady_mean(rho)
    except DivergenceError:
        weak = None
    return (phase, xi, j_steady, last.j, last.mean_photon, last.entropy, last.entropy_diff,
            last.offdiag, weak, last.trace_err, os.path.basename(traj.path))


def run_sweep(cfg: ScenarioConfig, out_dir: str, workers: int = 1) -> str:
    tasks = [(cfg, out_dir, i, k, phase, xi)
             for i, phase in enumerate(cfg.phases) for k, xi in enumerate(cfg.xis)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    return write_csv(os.path.join(out_dir, "sweep_summary.csv"), base_provenance(cfg),
                     SUMMARY_HEADER, rows)


def run_scenario(cfg: ScenarioConfig, out_dir: Optional[str] = None, workers: int = 1,
                 plot: bool = False) -> List[str]:
    """Run ``cfg`` and return the paths written.

    With ``plot`` set, PNG figures are rendered next to the CSV files.
    """
    out_dir = cfg.output_path if out_dir is None else out_dir
    if workers < 1:
        raise DomainError(f"workers={workers} must be >= 1")
    paths = []
    if cfg.scenario == "fig2":
        trajs = run_pair(cfg, out_dir)
    elif cfg.scenario in ("fig3", "fig4"):
        trajs = run_phase_scan(cfg, out_dir)
    elif cfg.scenario == "steady_table":
        trajs = None
        paths.append(run_steady_table(cfg, out_dir))
    else:
        trajs = None
        paths.append(run_sweep(cfg, out_dir, workers))
    if trajs is not None:
        paths += [t.path for t in trajs]
    if plot:
        from . import plotting
        paths += plotting.render(cfg, out_dir, trajs, paths)
    return paths
