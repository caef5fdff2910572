"""Truncated Fock-space density matrices of the cavity mode."""

import enum
from dataclasses import dataclass

import numpy as np

from ._util import shannon_bits
from .errors import DomainError, TruncationError

EIG_FLOOR = 1e-14
TAIL_TOL = 1e-12
THERMAL_TAIL_TOL = 1e-10


class ThermalModel(enum.Enum):
    """Reference thermal distribution for a given mean photon number.

    GEOMETRIC is the Bose-Einstein law ``nbar^m / (nbar+1)^(m+1)`` and keeps
    the mean photon number fixed.  EXPONENTIAL weights levels by
    ``exp(-m / nbar)``, whose mean ``1/(e^(1/nbar) - 1)`` is below ``nbar``.
    """

    GEOMETRIC = "geometric"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True, eq=False)
class CavityState:
    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 1:
            raise DomainError(f"cavity density matrix must be square, got {rho.shape}")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @property
    def populations(self) -> np.ndarray:
        return self.rho.diagonal().real

    def trace_error(self) -> float:
        return abs(complex(np.trace(self.rho)) - 1.0)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(_herm(self.rho))[0])


def _herm(m):
    return 0.5 * (m + m.conj().T)


def vacuum(dim: int) -> CavityState:
    if dim < 1:
        raise DomainError(f"dim={dim} must be >= 1")
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    return CavityState(rho)


def diagonal_state(populations) -> CavityState:
    return CavityState(np.diag(np.asarray(populations, dtype=complex)))


def mean_photon(state: CavityState) -> float:
    return float(np.dot(np.arange(state.dim), state.populations))


def von_neumann_entropy(state: CavityState) -> float:
    """Entropy in bits; eigenvalues below 1e-14 contribute nothing."""
    rho = state.rho
    if not np.any(rho - np.diag(rho.diagonal())):
        lam = rho.diagonal().real
    else:
        lam = np.linalg.eigvalsh(_herm(rho))
    lam = np.where(lam < EIG_FLOOR, 0.0, lam)
    return shannon_bits(lam, floor=EIG_FLOOR)


def thermal_populations(nbar: float, dim: int, model: ThermalModel) -> np.ndarray:
    if nbar < 0 or not np.isfinite(nbar):
        raise DomainError(f"nbar={nbar!r} must be finite and non-negative")
    if dim < 1:
        raise DomainError(f"dim={dim} must be >= 1")
    m = np.arange(dim)
    if nbar == 0:
        return (m == 0).astype(float)
    if model is ThermalModel.GEOMETRIC:
        q = nbar / (nbar + 1.0)
    else:
        q = np.exp(-1.0 / nbar)
    tail = q ** dim
    if tail >= THERMAL_TAIL_TOL:
        raise TruncationError(
            f"dim={dim} leaves tail mass {tail:.2e} for nbar={nbar:g} ({model.value})")
    p = (1.0 - q) * q ** m
    return p / p.sum()


def thermal_dim(nbar: float, model: ThermalModel, tol: float = THERMAL_TAIL_TOL) -> int:
    """Smallest truncation whose discarded thermal tail is below ``tol``."""
    if nbar <= 0:
        return 1
    q = nbar / (nbar + 1.0) if model is ThermalModel.GEOMETRIC else np.exp(-1.0 / nbar)
    return int(np.floor(np.log(tol) / np.log(q))) + 1


def thermal_state(nbar: float, dim: int, model: ThermalModel = ThermalModel.GEOMETRIC) -> CavityState:
    return diagonal_state(thermal_populations(nbar, dim, model))


def thermal_entropy_of_mean(nbar: float) -> float:
    if nbar < 0 or not np.isfinite(nbar):
        raise DomainError(f"nbar={nbar!r} must be finite and non-negative")
    if nbar == 0:
        return 0.0
    return float((nbar + 1) * np.log2(nbar + 1) - nbar * np.log2(nbar))


def thermal_reference_entropy(nbar: float, dim: int, model: ThermalModel = ThermalModel.GEOMETRIC) -> float:
    """Entropy of the thermal reference for mean-photon parameter ``nbar``.

    The reference lives on at least ``dim`` levels, widened until its
    discarded tail is negligible.
    """
    nbar = max(float(nbar), 0.0)
    p_th = thermal_populations(nbar, max(dim, thermal_dim(nbar, model)), model)
    return shannon_bits(p_th, floor=EIG_FLOOR)


def entropy_difference(state: CavityState, model: ThermalModel = ThermalModel.GEOMETRIC) -> float:
    """Entropy of ``state`` minus that of its thermal reference.

    The reference carries the same mean photon number parameter and lives on
    its own truncation, wide enough that its discarded tail is negligible.
    """
    return von_neumann_entropy(state) - thermal_reference_entropy(mean_photon(state), state.dim, model)


def offdiag_norm(state: CavityState) -> float:
    a = np.abs(state.rho)
    np.fill_diagonal(a, 0.0)
    return float(a.sum())


def tail_mass(state: CavityState, levels: int) -> float:
    """Population held in the top ``levels`` Fock levels."""
    return float(np.sum(state.populations[state.dim - levels:]))


def resize(state: CavityState, new_dim: int) -> CavityState:
    """Embed into a larger space or cut the top levels.

    Shrinking requires the discarded population to be below 1e-12; no
    renormalization happens in either direction.
    """
    if new_dim < 1:
        raise DomainError(f"new_dim={new_dim} must be >= 1")
    d = state.dim
    if new_dim >= d:
        rho = np.zeros((new_dim, new_dim), dtype=complex)
        rho[:d, :d] = state.rho
        return CavityState(rho)
    lost = tail_mass(state, d - new_dim)
    if lost >= TAIL_TOL:
        raise TruncationError(f"shrinking {d} -> {new_dim} discards mass {lost:.3e}")
    return CavityState(state.rho[:new_dim, :new_dim])


def random_cavity_state(rng: np.random.Generator, dim: int, rank=None) -> CavityState:
    """Random density matrix from a Ginibre ensemble."""
    k = dim if rank is None else rank
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    rho = g @ g.conj().T
    return CavityState(rho / np.trace(rho).real)
