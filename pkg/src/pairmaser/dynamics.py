"""Repeated passes, the coarse-grained master equation and weak-coupling analytics."""

from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import DivergenceError, DomainError, IntegrationError, TruncationError
from ._kernels import PAD, advance, flat_offsets
from .fock import (TAIL_TOL, CavityState, ThermalModel, mean_photon, offdiag_norm,
                   resize, tail_mass, thermal_reference_entropy, von_neumann_entropy)
from .jc_map import HEADROOM_TOL, exact_superoperator, pass_stencil
from .xstate import XState

PASS_MAPS = ("exact", "weak")
STEADY_WINDOW = 5
MAX_RATE_STEP = 0.01


@dataclass(frozen=True)
class PassConfig:
    """Settings for a pass-by-pass trajectory.

    ``rate`` only matters for the master equation.  ``stride`` thins the
    records: one row every ``stride`` passes.  ``max_dim`` defaults to
    ``2*passes + 4``, enough for exact growth from the vacuum.
    """

    xi: float
    rate: float = 1.0
    passes: int = 30
    max_dim: Optional[int] = None
    tol: float = 1e-8
    thermal_model: ThermalModel = ThermalModel.GEOMETRIC
    pass_map: str = "exact"
    stride: int = 1

    def __post_init__(self):
        if not (self.xi >= 0 and np.isfinite(self.xi)):
            raise DomainError(f"xi={self.xi!r} must be finite and non-negative")
        if not self.rate > 0:
            raise DomainError(f"rate={self.rate!r} must be positive")
        if self.passes < 1:
            raise DomainError(f"passes={self.passes} must be >= 1")
        if self.stride < 1:
            raise DomainError(f"stride={self.stride} must be >= 1")
        if self.pass_map not in PASS_MAPS:
            raise DomainError(f"pass_map={self.pass_map!r} not in {PASS_MAPS}")
        if self.max_dim is None:
            object.__setattr__(self, "max_dim", 2 * self.passes + 4)
        if self.max_dim < 3:
            raise DomainError(f"max_dim={self.max_dim} must be >= 3")


@dataclass(frozen=True)
class RunRecord:
    j: int
    mean_photon: float
    entropy: float
    entropy_diff: float
    trace_err: float
    offdiag: float

    FIELDS = ("j", "mean_photon", "entropy", "entropy_diff", "trace_err", "offdiag")

    def row(self):
        return tuple(getattr(self, k) for k in self.FIELDS)


def observe(j: int, state: CavityState, model: ThermalModel) -> RunRecord:
    mean = mean_photon(state)
    entropy = von_neumann_entropy(state)
    return RunRecord(
        j=j,
        mean_photon=mean,
        entropy=entropy,
        entropy_diff=entropy - thermal_reference_entropy(mean, state.dim, model),
        trace_err=state.trace_error(),
        offdiag=offdiag_norm(state),
    )


class _LinearRun:
    """Pass-by-pass evolution with exact-growth bookkeeping.

    Reproduces ``exact_pass``/``weak_pass`` applied repeatedly (same headroom
    rule, same truncation growth) inside a compiled loop.  Only the reachable
    part of the matrix is updated: the diagonal when the reservoir has no
    double-excitation coherence and the input is diagonal, even photon-number
    offsets when the input only has those.
    """

    def __init__(self, initial: CavityState, reservoir: XState, cfg: PassConfig):
        self.reservoir = reservoir
        self.cfg = cfg
        rho = np.asarray(initial.rho)
        offsets = np.subtract.outer(np.arange(initial.dim), np.arange(initial.dim))
        support = offsets[rho != 0]
        if complex(reservoir.a14) == 0 and not support.any():
            self.band = "diag"
        elif not np.any(support % 2):
            self.band = "even"
        else:
            self.band = "full"
        self._load(rho)

    def _load(self, rho):
        d = rho.shape[0]
        self.dim = d
        self.y = np.zeros((d + 2 * PAD, d + 2 * PAD), dtype=complex)
        self.y[PAD:PAD + d, PAD:PAD + d] = rho
        coef, dm, dn = pass_stencil(self.reservoir, float(self.cfg.xi), d, self.cfg.pass_map)
        self.stencil = (coef, flat_offsets(dm, dn, d))
        self.step = {"diag": max(d, 1), "even": 2, "full": 1}[self.band]

    def _grow(self):
        new_dim = self.dim + 2
        if new_dim > self.cfg.max_dim:
            raise TruncationError(
                f"support reaches level {self.dim - 1}; growing to {new_dim} "
                f"exceeds max_dim={self.cfg.max_dim}")
        self._load(resize(CavityState(self.rho()), new_dim).rho)

    def advance(self, n_passes: int):
        """Apply ``n_passes`` passes, growing the truncation whenever needed."""
        while n_passes > 0:
            if self.dim <= 2:
                self._grow()
                continue
            self.y, done = advance(*self.stencil, self.y, n_passes, self.step, HEADROOM_TOL)
            n_passes -= done
            if n_passes:
                self._grow()

    def rho(self) -> np.ndarray:
        return self.y[PAD:PAD + self.dim, PAD:PAD + self.dim].copy()


def trajectory(initial: CavityState, reservoir: XState,
               cfg: PassConfig) -> Iterator[Tuple[RunRecord, CavityState]]:
    """Unbounded stream of (record, state) pairs, one per ``cfg.stride`` passes."""
    run = _LinearRun(initial, reservoir, cfg)
    j = 0
    while True:
        run.advance(cfg.stride)
        j += cfg.stride
        state = CavityState(run.rho())
        yield observe(j, state, cfg.thermal_model), state


def iterate_passes(initial: CavityState, reservoir: XState, cfg: PassConfig) -> List[RunRecord]:
    """Records after each pass (every ``stride``-th pass) up to ``cfg.passes``."""
    out = []
    for rec, _ in trajectory(initial, reservoir, cfg):
        if rec.j > cfg.passes:
            break
        out.append(rec)
    return out


def iterate_states(initial: CavityState, reservoir: XState, cfg: PassConfig):
    """Like ``iterate_passes`` but also returns the final cavity state."""
    out, last = [], initial
    for rec, state in trajectory(initial, reservoir, cfg):
        if rec.j > cfg.passes:
            break
        out.append(rec)
        last = state
    return out, last


def _rel_change(new, old):
    scale = max(abs(new), abs(old))
    return 0.0 if scale == 0 else abs(new - old) / scale


def detect_steady(records: Sequence[RunRecord], tol: float = 1e-8) -> Optional[int]:
    """Pass index after which ``mean_photon`` and ``entropy`` settle.

    Returns the ``j`` of the first record followed by five consecutive
    records whose relative changes in both observables are below ``tol``, or
    ``None``.
    """
    if not records:
        raise DomainError("records must be nonempty")
    quiet = [max(_rel_change(b.mean_photon, a.mean_photon), _rel_change(b.entropy, a.entropy)) < tol
             for a, b in zip(records, records[1:])]
    run = 0
    for i in range(len(quiet) - 1, -1, -1):
        run = run + 1 if quiet[i] else 0
        quiet[i] = run
    for i, n_quiet in enumerate(quiet):
        if n_quiet >= STEADY_WINDOW:
            return records[i].j
    return None


def run_until_steady(initial: CavityState, reservoir: XState, cfg: PassConfig,
                     tol: Optional[float] = None, max_passes: int = 10**7):
    """Iterate until ``detect_steady`` fires on the record stream.

    Returns ``(records, final_state, j_steady)``; ``j_steady`` is ``None`` when
    ``max_passes`` is hit first.
    """
    tol = cfg.tol if tol is None else tol
    records, state = [], initial
    for rec, state in trajectory(initial, reservoir, cfg):
        records.append(rec)
        window = records[-(STEADY_WINDOW + 1):]
        if len(window) == STEADY_WINDOW + 1 and detect_steady(window, tol) is not None:
            return records, state, window[0].j
        if rec.j >= max_passes:
            break
    return records, state, None


# ---- master equation ---------------------------------------------------------

def rk4_step(fun, y, h):
    k1 = fun(y)
    k2 = fun(y + 0.5 * h * k1)
    k3 = fun(y + 0.5 * h * k2)
    k4 = fun(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _rk4_increment(hg):
    """``E`` with ``1 + E`` the one-step RK4 propagator (degree-4 Taylor in ``hg``)."""
    term = np.eye(hg.shape[0], dtype=complex)
    inc = np.zeros_like(hg, dtype=complex)
    for k in range(1, 5):
        term = term @ hg / k
        inc += term
    return inc


def _identity_plus_power(e, n):
    """``(1 + E)^n - 1`` by repeated squaring.

    Keeping the identity out of the stored matrices matters: ``E`` is tiny
    and would lose most of its digits if added to 1 first.
    """
    acc = np.zeros_like(e)
    while n:
        if n & 1:
            acc = acc + e + acc @ e
        n >>= 1
        if n:
            e = 2 * e + e @ e
    return acc


def integrate_master(initial: CavityState, reservoir: XState, cfg: PassConfig,
                     t_end: float, dim: Optional[int] = None,
                     max_steps: int = 10**10) -> CavityState:
    """Integrate ``d rho/dt = rate * (D - 1) rho`` with fixed-step RK4.

    ``D`` is the exact one-pass map on a fixed truncation ``dim`` (default:
    the initial state's).  The step obeys ``rate * h <= 0.01``.  Because the
    generator is constant, long horizons apply the one-step RK4 propagator
    by repeated squaring, which reproduces step-by-step stepping exactly up
    to rounding.
    """
    if not (t_end >= 0 and np.isfinite(t_end)):
        raise IntegrationError(f"t_end={t_end!r} must be finite and non-negative")
    if t_end == 0:
        return initial
    dim = initial.dim if dim is None else dim
    state = resize(initial, dim)
    n_steps = int(np.ceil(cfg.rate * t_end / MAX_RATE_STEP - 1e-9))
    if n_steps > max_steps:
        raise IntegrationError(f"{n_steps} steps exceed max_steps={max_steps}")
    h = t_end / n_steps
    gen = cfg.rate * (exact_superoperator(reservoir, float(cfg.xi), dim) - sp.identity(dim * dim))
    gen = gen.tocsr()
    y = state.rho.ravel().astype(complex)
    if n_steps <= 4096 or dim > 40:
        for _ in range(n_steps):
            y = rk4_step(gen.dot, y, h)
    else:
        y = y + _identity_plus_power(_rk4_increment((h * gen).toarray()), n_steps) @ y
    rho = y.reshape(dim, dim)
    out = CavityState(0.5 * (rho + rho.conj().T))
    if tail_mass(out, 2) >= TAIL_TOL:
        raise TruncationError(
            f"population {tail_mass(out, 2):.2e} reached the top of a dim={dim} truncation")
    return out


# ---- weak-coupling closed forms ----------------------------------------------

def increment_ratio(reservoir: XState, xi: float) -> float:
    """Ratio of successive mean-photon increments, ``1 - 2 xi^2 (a44 - a11)``."""
    return 1.0 - 2.0 * xi * xi * (reservoir.a44 - reservoir.a11)


def emission_weight(reservoir: XState) -> float:
    """``2 a11 + a22 + a33 + a23 + a32``."""
    return (2 * reservoir.a11 + reservoir.a22 + reservoir.a33
            + 2 * complex(reservoir.a23).real)


def first_pass_mean(reservoir: XState, xi: float) -> float:
    return xi * xi * emission_weight(reservoir)


def mean_after_j(reservoir: XState, xi: float, j: int) -> float:
    if j < 1:
        raise DomainError(f"j={j} must be >= 1")
    k = increment_ratio(reservoir, xi)
    n1 = first_pass_mean(reservoir, xi)
    if k == 1.0:
        return j * n1
    return n1 * (1.0 - k ** j) / (1.0 - k)


def steady_mean(reservoir: XState) -> float:
    gap = reservoir.a44 - reservoir.a11
    if not gap > 0:
        raise DivergenceError(
            f"a44 - a11 = {gap:.3g} <= 0: mean photon number grows without bound")
    return emission_weight(reservoir) / (2.0 * gap)
