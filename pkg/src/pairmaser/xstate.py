"""Two-qubit X-states of the atom-pair reservoir.

Basis ordering is ``|ee>, |eg>, |ge>, |gg>`` with atom A first.  Only the
diagonal and the two upper anti-diagonal coherences ``a14`` and ``a23`` are
stored; their conjugate partners are implied.
"""

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from ._util import binary_entropy, shannon_bits
from .errors import DomainError

TWO_PI = 2.0 * np.pi
_RANGE_SLACK = 1e-12


@dataclass(frozen=True)
class XState:
    a11: float
    a22: float
    a33: float
    a44: float
    a14: complex = 0j
    a23: complex = 0j

    @property
    def a41(self) -> complex:
        return complex(self.a14).conjugate()

    @property
    def a32(self) -> complex:
        return complex(self.a23).conjugate()

    @property
    def diagonal(self):
        return np.array([self.a11, self.a22, self.a33, self.a44])

    def matrix(self) -> np.ndarray:
        m = np.diag(self.diagonal).astype(complex)
        m[0, 3] = self.a14
        m[3, 0] = self.a41
        m[1, 2] = self.a23
        m[2, 1] = self.a32
        return m

    @classmethod
    def from_matrix(cls, m, atol=1e-12):
        """Read an X-state off a 4x4 array, rejecting non-X entries."""
        m = np.asarray(m, dtype=complex)
        if m.shape != (4, 4):
            raise DomainError(f"expected a 4x4 matrix, got {m.shape}")
        mask = np.ones((4, 4), dtype=bool)
        for i, j in [(0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)]:
            mask[i, j] = False
        if np.max(np.abs(m[mask])) > atol:
            raise DomainError("matrix has entries outside the X pattern")
        if abs(m[3, 0] - np.conj(m[0, 3])) > atol or abs(m[2, 1] - np.conj(m[1, 2])) > atol:
            raise DomainError("matrix is not Hermitian")
        d = np.diag(m)
        if np.max(np.abs(d.imag)) > atol:
            raise DomainError("diagonal is not real")
        return cls(float(d[0].real), float(d[1].real), float(d[2].real),
                   float(d[3].real), complex(m[0, 3]), complex(m[1, 2]))


@dataclass(frozen=True)
class XParams:
    """Bloch-style direct-sum parameters.

    ``alpha`` splits weight between the ``{ee, gg}`` block (``cos^2``) and
    the ``{eg, ge}`` block (``sin^2``).  ``r1, theta1, varphi`` place the outer
    block on its Bloch sphere and set the phase of ``a14``; ``r2, theta2,
    phi`` do the same for the inner block and ``a23``.
    """

    alpha: float
    r1: float
    r2: float
    theta1: float
    theta2: float
    varphi: float = 0.0
    phi: float = 0.0

    RANGES = {
        "alpha": (0.0, np.pi / 2),
        "r1": (0.0, 1.0),
        "r2": (0.0, 1.0),
        "theta1": (0.0, np.pi),
        "theta2": (0.0, np.pi),
        "varphi": (0.0, TWO_PI),
        "phi": (0.0, TWO_PI),
    }

    def check(self):
        for name, (lo, hi) in self.RANGES.items():
            v = getattr(self, name)
            if not np.isfinite(v) or v < lo - _RANGE_SLACK or v > hi + _RANGE_SLACK:
                raise DomainError(f"{name}={v!r} outside [{lo:.6g}, {hi:.6g}]")


class QubitState(NamedTuple):
    p_e: float
    p_g: float


@dataclass(frozen=True)
class ValidationReport:
    trace_error: float
    min_diagonal: float
    min_block_eigenvalue: float
    hermiticity_error: float
    tol: float = 1e-12

    @property
    def valid(self) -> bool:
        return (self.trace_error <= self.tol
                and self.min_diagonal >= -self.tol
                and self.min_block_eigenvalue >= -self.tol
                and self.hermiticity_error <= self.tol)


def build_xstate(params: XParams) -> XState:
    params.check()
    c2 = np.cos(params.alpha) ** 2
    s2 = np.sin(params.alpha) ** 2
    r1, r2 = params.r1, params.r2
    return XState(
        a11=float(0.5 * c2 * (1 + r1 * np.cos(params.theta1))),
        a22=float(0.5 * s2 * (1 + r2 * np.cos(params.theta2))),
        a33=float(0.5 * s2 * (1 - r2 * np.cos(params.theta2))),
        a44=float(0.5 * c2 * (1 - r1 * np.cos(params.theta1))),
        a14=complex(0.5 * r1 * c2 * np.sin(params.theta1) * np.exp(-1j * params.varphi)),
        a23=complex(0.5 * r2 * s2 * np.sin(params.theta2) * np.exp(-1j * params.phi)),
    )


def random_xparams(rng: np.random.Generator) -> XParams:
    """Uniform sample over the admissible parameter box."""
    lo = np.array([v[0] for v in XParams.RANGES.values()])
    hi = np.array([v[1] for v in XParams.RANGES.values()])
    return XParams(*rng.uniform(lo, hi))


def random_xstate(rng: np.random.Generator, min_gap=None) -> XState:
    """Random valid X-state; with ``min_gap``, rejection-sampled so that
    ``a44 - a11 >= min_gap``."""
    if min_gap is not None and not min_gap < 1:
        raise DomainError(f"min_gap={min_gap!r} must be below 1")
    while True:
        rho = build_xstate(random_xparams(rng))
        if min_gap is None or rho.a44 - rho.a11 >= min_gap:
            return rho


def _block_eigenvalues(p, q, c):
    """Eigenvalues of the Hermitian block [[p, c], [c*, q]]."""
    mid = 0.5 * (p + q)
    rad = np.hypot(0.5 * (p - q), abs(c))
    return mid - rad, mid + rad


def eigenvalues(rho: XState):
    lo1, hi1 = _block_eigenvalues(rho.a11, rho.a44, rho.a14)
    lo2, hi2 = _block_eigenvalues(rho.a22, rho.a33, rho.a23)
    return np.array([lo1, hi1, lo2, hi2])


def validate(rho: XState, tol=1e-12) -> ValidationReport:
    m = rho.matrix()
    return ValidationReport(
        trace_error=abs(float(np.sum(rho.diagonal)) - 1.0),
        min_diagonal=float(np.min(rho.diagonal)),
        min_block_eigenvalue=float(np.min(eigenvalues(rho))),
        hermiticity_error=float(np.max(np.abs(m - m.conj().T))),
        tol=tol,
    )


def reduced_states(rho: XState):
    """Marginals of atoms A and B; both are diagonal for any X-state."""
    a = QubitState(rho.a11 + rho.a22, rho.a33 + rho.a44)
    b = QubitState(rho.a11 + rho.a33, rho.a22 + rho.a44)
    return a, b


def classical_correlated(rho: XState) -> XState:
    return replace(rho, a14=0j, a23=0j)


def product_state(rho: XState) -> XState:
    a, b = reduced_states(rho)
    return XState(a.p_e * b.p_e, a.p_e * b.p_g, a.p_g * b.p_e, a.p_g * b.p_g)


def apply_phase_gate(rho: XState, phase: float) -> XState:
    """Imprint a relative phase on the single-excitation coherence."""
    return replace(rho, a23=complex(np.exp(-1j * phase) * rho.a23))


def concurrence(rho: XState) -> float:
    c = max(0.0,
            abs(rho.a23) - np.sqrt(rho.a11 * rho.a44),
            abs(rho.a14) - np.sqrt(rho.a22 * rho.a33))
    return float(min(2.0 * c, 1.0))


def concurrence_wootters(m) -> float:
    """General two-qubit concurrence from the spin-flip eigenvalues."""
    m = np.asarray(m, dtype=complex)
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    r = m @ yy @ m.conj() @ yy
    lam = np.sqrt(np.abs(np.sort(np.linalg.eigvals(r).real)[::-1]))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


class DiscordReport(NamedTuple):
    value: float
    q1: float
    q2: float
    oracle: float
    gap: float


def _discord_branches(rho: XState):
    lam = eigenvalues(rho)
    lam_term = -shannon_bits(np.clip(lam, 0.0, None))
    h_b = binary_entropy(rho.a11 + rho.a33)
    z = 1.0 - 2.0 * (rho.a33 + rho.a44)
    tau = 0.5 * (1.0 + np.sqrt(z * z + 4.0 * (abs(rho.a14) + abs(rho.a23)) ** 2))
    d1 = binary_entropy(min(tau, 1.0))
    d2 = shannon_bits(rho.diagonal) - h_b
    return h_b + lam_term + d1, h_b + lam_term + d2


def discord(rho: XState) -> float:
    """Closed-form discord with measurement on atom B, in bits.

    The minimum over the two analytic branches (transverse and longitudinal
    measurement); values below 1e-9 in magnitude are clamped to zero.
    """
    q1, q2 = _discord_branches(rho)
    q = min(q1, q2)
    return 0.0 if q < 1e-9 else float(q)


def discord_with_gap(rho: XState, **oracle_kw) -> DiscordReport:
    q1, q2 = _discord_branches(rho)
    value = discord(rho)
    ref = discord_oracle(rho.matrix(), **oracle_kw)
    return DiscordReport(value, q1, q2, ref, value - ref)


# ---- brute-force oracle ------------------------------------------------------

def _eig2(a, d, b):
    mid = 0.5 * (a + d)
    rad = np.sqrt((0.5 * (a - d)) ** 2 + np.abs(b) ** 2)
    return mid - rad, mid + rad


def _h(x):
    x = np.where(x > 1e-15, x, 1.0)
    return -x * np.log2(x)


def _conditional_entropy(m4, theta, psi):
    """Mean entropy of A after projecting B onto the axis (theta, psi).

    Broadcasts over arrays of angles.
    """
    theta = np.asarray(theta, dtype=float)
    psi = np.asarray(psi, dtype=float)
    t = m4.reshape(2, 2, 2, 2)  # [a, b, a', b']
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    ph = np.exp(1j * psi)
    total = 0.0
    for v0, v1 in ((c, ph * s), (-np.conj(ph) * s, c)):
        v = np.stack([v0 * np.ones_like(ph), v1 * np.ones_like(ph)])
        # unnormalized conditional A block: sum_{b,b'} conj(v_b) t[a,b,a',b'] v_b'
        blk = np.einsum("b...,abcd,d...->ac...", np.conj(v), t, v)
        p = (blk[0, 0] + blk[1, 1]).real
        safe = np.where(p > 1e-15, p, 1.0)
        lo, hi = _eig2(blk[0, 0].real / safe, blk[1, 1].real / safe, blk[0, 1] / safe)
        total = total + np.where(p > 1e-15, p * (_h(lo) + _h(hi)), 0.0)
    return total


def discord_oracle(m, grid=(41, 64), refine=3) -> float:
    """Discord of an arbitrary two-qubit matrix by direct optimization.

    Scans projective measurements on B over a (theta, psi) grid, then polishes
    the ``refine`` best grid points with Nelder-Mead.
    """
    m = np.asarray(m, dtype=complex)
    t = m.reshape(2, 2, 2, 2)
    rho_b = np.einsum("abad->bd", t)
    s_b = shannon_bits(np.linalg.eigvalsh(rho_b))
    s_ab = shannon_bits(np.clip(np.linalg.eigvalsh(m), 0.0, None))
    th = np.linspace(0.0, np.pi, grid[0])
    ps = np.linspace(0.0, TWO_PI, grid[1], endpoint=False)
    T, P = np.meshgrid(th, ps, indexing="ij")
    J = _conditional_entropy(m, T, P)
    order = np.argsort(J, axis=None)[:refine]
    best = float(J.flat[order[0]])

    def fun(x):
        return float(_conditional_entropy(m, x[0], x[1]))

    for k in order:
        x0 = (T.flat[k], P.flat[k])
        res = minimize(fun, x0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000,
                                "initial_simplex": [x0, (x0[0] + 0.05, x0[1]),
                                                    (x0[0], x0[1] + 0.05)]})
        best = min(best, float(res.fun))
    q = s_b - s_ab + best
    return 0.0 if q < 1e-9 else q


# ---- named reservoir states --------------------------------------------------

# Coherent in both blocks yet without entanglement or discord.
COHERENT_UNCORRELATED = XState(0.223928, 0.223928, 0.276072, 0.276072,
                               0.0823074 - 0.142561j, 0.164615)
COHERENT_UNCORRELATED_PARAMS = XParams(alpha=np.pi / 4, r1=2 / 3, r2=2 / 3,
                                       theta1=11 * np.pi / 20, theta2=11 * np.pi / 20,
                                       varphi=np.pi / 3, phi=0.0)

# Pair of states differing only by the double-excitation coherence a14.
WITHOUT_DOUBLE_COHERENCE = XState(0.142864, 0.0122355, 0.0122355, 0.832665, 0j, 0.0012236)
WITH_DOUBLE_COHERENCE = XState(0.142864, 0.0122355, 0.0122355, 0.832665,
                               0.344901, 0.0012236)
WITHOUT_DOUBLE_COHERENCE_PARAMS = XParams(alpha=np.pi / 20, r1=0.7071, r2=0.1,
                                          theta1=np.pi, theta2=np.pi / 2)
WITH_DOUBLE_COHERENCE_PARAMS = XParams(alpha=np.pi / 20, r1=1.0, r2=0.1,
                                       theta1=3 * np.pi / 4, theta2=np.pi / 2)

# Reservoir used for the relative-phase scans; phi is swept.
PHASE_SCAN_PARAMS = XParams(alpha=np.pi / 3, r1=0.2, r2=1.0, theta1=3 * np.pi / 4,
                            theta2=np.pi / 2, varphi=0.0, phi=0.0)
PHASE_SCAN_PHASES = (0.0, np.pi / 2, 3 * np.pi / 5, 4 * np.pi / 5, np.pi)


def thermal_product_xstate(beta: float, omega: float = 1.0) -> XState:
    """Uncorrelated pair of identical Gibbs qubits at inverse temperature beta."""
    if beta < 0 or not np.isfinite(beta):
        raise DomainError(f"beta={beta!r} must be finite and non-negative")
    pe = 1.0 / (1.0 + np.exp(beta * omega))
    pg = 1.0 - pe
    return XState(pe * pe, pe * pg, pg * pe, pg * pg)


def thermal_entangled_xstate(a11: float, a22: float, a44: float, abs_a23: float) -> XState:
    """Symmetric X-state with a23 = -|a23| and no double-excitation coherence."""
    rho = XState(a11, a22, a22, a44, 0j, complex(-abs(abs_a23)))
    if not validate(rho).valid:
        raise DomainError("entries do not form a valid density matrix")
    return rho
