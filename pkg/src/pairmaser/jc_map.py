"""Resonant two-atom Jaynes-Cummings map acting on the cavity.

``U_ij(x)`` is the matrix element of the operator block ``U_ij`` taken on the
input Fock state ``|x>``; each block shifts the photon number by a fixed
amount (``SHIFTS``).  With an X-state reservoir the reduced one-pass map
couples ``rho'_{m,n}`` to eleven shifted input entries ``rho_{m+dm, n+dn}``;
``f_coefficients`` returns the weight of each.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, TruncationError
from .fock import CavityState, resize
from .xstate import XState

HEADROOM_TOL = 1e-14

# photon-number change produced by each atom-block of the unitary
SHIFTS = {
    (1, 1): 0, (2, 2): 0, (3, 3): 0, (4, 4): 0, (2, 3): 0, (3, 2): 0,
    (1, 2): -1, (1, 3): -1, (2, 4): -1, (3, 4): -1,
    (2, 1): +1, (3, 1): +1, (4, 2): +1, (4, 3): +1,
    (1, 4): -2, (4, 1): +2,
}
# entries of U shared by symmetry between the two atoms
_ALIAS = {(3, 3): (2, 2), (3, 2): (2, 3), (1, 3): (1, 2), (3, 1): (2, 1),
          (3, 4): (2, 4), (4, 3): (4, 2)}

# input offsets (dm, dn) of the eleven f-terms, in order f1..f11
F_OFFSETS = ((0, 0), (1, 1), (-1, -1), (-2, -2), (2, 2), (0, 2), (2, 0),
             (1, -1), (-1, 1), (0, -2), (-2, 0))


@dataclass(frozen=True, eq=False)
class UTable:
    """Closed-form U_ij(x) for x = 0 .. size-1 at a fixed xi."""

    xi: float
    values: dict

    @property
    def size(self) -> int:
        return len(self.values[(1, 1)])

    def __call__(self, i, j, x):
        """``U_ij(x)`` with zero for any negative ``x``; broadcasts over x."""
        arr = self.values[_ALIAS.get((i, j), (i, j))]
        x = np.asarray(x)
        out = np.zeros(x.shape, dtype=complex)
        ok = x >= 0
        out[ok] = arr[x[ok]]
        return out


@lru_cache(maxsize=64)
def build_utable(xi: float, dim: int) -> UTable:
    """Tabulate U_ij(x) for x in 0..dim+1."""
    if dim < 1:
        raise DomainError(f"dim={dim} must be >= 1")
    x = np.arange(dim + 2, dtype=float)
    w_hi = np.sqrt(2 * (2 * x + 3))   # Rabi factor of the {ee,x} manifold
    w_mid = np.sqrt(2 * (2 * x + 1))
    # x = 0 makes the lower Rabi factor imaginary; every use is masked there
    w_lo = np.sqrt(np.abs(2 * (2 * x - 1)))
    u = {}
    u[(1, 1)] = 1 + (x + 1) * (np.cos(xi * w_hi) - 1) / (2 * x + 3)
    u[(4, 4)] = np.where(x == 0, 1.0, 1 + x * (np.cos(xi * w_lo) - 1) / (2 * x - 1))
    u[(2, 2)] = 0.5 * (np.cos(xi * w_mid) + 1)
    u[(2, 3)] = 0.5 * (np.cos(xi * w_mid) - 1)
    u[(1, 4)] = np.where(x <= 1, 0.0,
                         np.sqrt(np.abs(x * (x - 1))) * (np.cos(xi * w_lo) - 1) / (2 * x - 1))
    u[(4, 1)] = np.sqrt((x + 1) * (x + 2)) * (np.cos(xi * w_hi) - 1) / (2 * x + 3)
    u[(1, 2)] = -1j * np.sqrt(x) * np.sin(xi * w_mid) / w_mid
    u[(2, 1)] = -1j * np.sqrt(x + 1) * np.sin(xi * w_hi) / w_hi
    u[(2, 4)] = np.where(x == 0, 0.0, -1j * np.sqrt(x) * np.sin(xi * w_lo) / w_lo)
    u[(4, 2)] = -1j * np.sqrt(x + 1) * np.sin(xi * w_mid) / w_mid
    values = {k: np.asarray(v, dtype=complex) for k, v in u.items()}
    for v in values.values():
        v.setflags(write=False)
    return UTable(float(xi), values)


def f_coefficients(table: UTable, reservoir: XState, dim: int) -> np.ndarray:
    """Weights f1..f11 as an array of shape (11, dim, dim), indexed [k, m, n]."""
    m = np.arange(dim)[:, None]
    n = np.arange(dim)[None, :]
    U = table
    a11, a44 = reservoir.a11, reservoir.a44
    a14, a41 = complex(reservoir.a14), reservoir.a41
    s = reservoir.a22 + reservoir.a33
    c = 2.0 * complex(reservoir.a23).real   # a23 + a32
    w = s + c
    f = np.empty((11, dim, dim), dtype=complex)
    f[0] = (a11 * U(1, 1, m) * U(1, 1, n) + a44 * U(4, 4, m) * U(4, 4, n)
            + s * (U(2, 2, m) * U(2, 2, n) + U(2, 3, m) * U(2, 3, n))
            + c * (U(2, 2, m) * U(2, 3, n) + U(2, 3, m) * U(2, 2, n)))
    f[1] = (w * U(1, 2, m + 1) * np.conj(U(1, 2, n + 1))
            + 2 * a44 * U(2, 4, m + 1) * np.conj(U(2, 4, n + 1)))
    f[2] = (w * U(4, 2, m - 1) * np.conj(U(4, 2, n - 1))
            + 2 * a11 * U(2, 1, m - 1) * np.conj(U(2, 1, n - 1)))
    f[3] = a11 * U(4, 1, m - 2) * U(4, 1, n - 2)
    f[4] = a44 * U(1, 4, m + 2) * U(1, 4, n + 2)
    f[5] = a14 * U(1, 1, m) * U(1, 4, n + 2)
    f[6] = a41 * U(1, 4, m + 2) * U(1, 1, n)
    f[7] = 2 * a41 * U(2, 4, m + 1) * np.conj(U(2, 1, n - 1))
    f[8] = 2 * a14 * U(2, 1, m - 1) * np.conj(U(2, 4, n + 1))
    f[9] = a41 * U(4, 4, m) * U(4, 1, n - 2)
    f[10] = a14 * U(4, 1, m - 2) * U(4, 4, n)
    return f


def _shifted(rho, dm, dn):
    """Array S with S[m, n] = rho[m+dm, n+dn], zero outside the truncation."""
    d = rho.shape[0]
    p = np.zeros((d + 4, d + 4), dtype=complex)
    p[2:d + 2, 2:d + 2] = rho
    return p[2 + dm:2 + dm + d, 2 + dn:2 + dn + d]


def apply_f_map(rho: np.ndarray, reservoir: XState, xi: float) -> np.ndarray:
    """One exact pass on a fixed truncation, no headroom management."""
    d = rho.shape[0]
    f = f_coefficients(build_utable(float(xi), d), reservoir, d)
    out = np.zeros_like(rho, dtype=complex)
    for k, (dm, dn) in enumerate(F_OFFSETS):
        out += f[k] * _shifted(rho, dm, dn)
    return out


def _with_headroom(state: CavityState, levels: int, max_dim, tol=HEADROOM_TOL) -> CavityState:
    rho = state.rho
    top = np.abs(rho[-levels:, :]).max(initial=0.0)
    top = max(top, np.abs(rho[:, -levels:]).max(initial=0.0))
    if state.dim > levels and top <= tol:
        return state
    new_dim = state.dim + levels
    if max_dim is not None and new_dim > max_dim:
        raise TruncationError(
            f"support reaches level {state.dim - 1}; growing to {new_dim} exceeds max_dim={max_dim}")
    return resize(state, new_dim)


def exact_pass(cavity: CavityState, reservoir: XState, xi: float, max_dim=None) -> CavityState:
    """Cavity state after one atom pair has crossed at coupling ``xi = g*tau``.

    The truncation grows by two levels whenever the input has support within
    two levels of the boundary, so the result is exact; exceeding ``max_dim``
    raises ``TruncationError``.
    """
    state = _with_headroom(cavity, 2, max_dim)
    return CavityState(apply_f_map(state.rho, reservoir, xi))


@lru_cache(maxsize=16)
def _ladder(dim):
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    ad = a.T.copy()
    return a, ad, a @ ad, ad @ a, a @ a, ad @ ad


def weak_generator(rho: np.ndarray, reservoir: XState) -> np.ndarray:
    """Coefficient of xi^2 in the small-coupling expansion of one pass.

    Products of ladder operators are taken on the truncated space so that the
    generator is exactly trace-free there.
    """
    a, ad, aad, ada, aa, adad = _ladder(rho.shape[0])
    a11, a44 = reservoir.a11, reservoir.a44
    a14, a41 = complex(reservoir.a14), reservoir.a41
    w = reservoir.a22 + reservoir.a33 + 2.0 * complex(reservoir.a23).real
    a_rho_ad = a @ rho @ ad
    ad_rho_a = ad @ rho @ a
    out = a11 * (2 * ad_rho_a - aad @ rho - rho @ aad)
    out += a44 * (2 * a_rho_ad - ada @ rho - rho @ ada)
    m = 0.5 * (ada + aad)
    out += w * (a_rho_ad + ad_rho_a - m @ rho - rho @ m)
    if a14 != 0:
        out += a14 * (2 * ad @ rho @ ad - adad @ rho - rho @ adad)
        out += a41 * (2 * a @ rho @ a - aa @ rho - rho @ aa)
    return out


def weak_pass(cavity: CavityState, reservoir: XState, xi: float, max_dim=None) -> CavityState:
    """One pass with the unitary expanded to second order in ``xi``."""
    state = _with_headroom(cavity, 2, max_dim)
    rho = state.rho
    return CavityState(rho + xi * xi * weak_generator(rho, reservoir))


# input offsets (dm, dn) of the weak-map terms
WEAK_OFFSETS = ((0, 0), (-1, -1), (1, 1), (-1, 1), (1, -1), (-2, 0), (0, 2), (2, 0), (0, -2))


def weak_coefficients(reservoir: XState, xi: float, dim: int) -> np.ndarray:
    """Weights of ``weak_pass`` per ``WEAK_OFFSETS``, shape (9, dim, dim).

    Same truncation convention as ``weak_generator``: ``a a^dag`` vanishes on
    the top level.
    """
    m = np.arange(dim, dtype=float)[:, None]
    n = np.arange(dim, dtype=float)[None, :]
    top = np.arange(dim) == dim - 1
    em = np.where(top, 0.0, np.arange(dim) + 1.0)
    en, em = em[None, :], em[:, None]
    a11, a44 = reservoir.a11, reservoir.a44
    a14, a41 = complex(reservoir.a14), reservoir.a41
    w = reservoir.a22 + reservoir.a33 + 2.0 * complex(reservoir.a23).real
    x2 = xi * xi
    c = np.zeros((9, dim, dim), dtype=complex)
    c[0] = 1.0 - x2 * (a11 * (em + en) + a44 * (m + n) + 0.5 * w * (m + em + n + en))
    c[1] = x2 * (2 * a11 + w) * np.sqrt(m * n)
    c[2] = x2 * (2 * a44 + w) * np.sqrt((m + 1) * (n + 1))
    c[3] = 2 * x2 * a14 * np.sqrt(m * (n + 1))
    c[4] = 2 * x2 * a41 * np.sqrt((m + 1) * n)
    c[5] = -x2 * a14 * np.sqrt(m * np.maximum(m - 1, 0))
    c[6] = -x2 * a14 * np.sqrt((n + 1) * (n + 2))
    c[7] = -x2 * a41 * np.sqrt((m + 1) * (m + 2))
    c[8] = -x2 * a41 * np.sqrt(n * np.maximum(n - 1, 0))
    # sources beyond the truncation do not exist
    for k, (dm, dn) in enumerate(WEAK_OFFSETS):
        c[k][(m + dm >= dim) | (n + dn >= dim) | (m + dm < 0) | (n + dn < 0)] = 0.0
    return c


@lru_cache(maxsize=128)
def pass_stencil(reservoir: XState, xi: float, dim: int, pass_map: str = "exact"):
    """``(coef, dm, dn)`` with ``rho'[m, n] = sum_k coef[m, n, k] rho[m+dm[k], n+dn[k]]``.

    ``coef`` is laid out (dim, dim, K) so that the terms of one output entry
    are contiguous.
    """
    if pass_map == "exact":
        coef, offsets = f_coefficients(build_utable(float(xi), dim), reservoir, dim), F_OFFSETS
    elif pass_map == "weak":
        coef, offsets = weak_coefficients(reservoir, float(xi), dim), WEAK_OFFSETS
    else:
        raise DomainError(f"unknown pass map {pass_map!r}")
    dm = np.array([o[0] for o in offsets], dtype=np.int64)
    dn = np.array([o[1] for o in offsets], dtype=np.int64)
    out = np.ascontiguousarray(np.moveaxis(coef, 0, -1))
    out.setflags(write=False)
    return out, dm, dn


# ---- superoperators on row-major vec(rho) ------------------------------------

@lru_cache(maxsize=128)
def exact_superoperator(reservoir: XState, xi: float, dim: int) -> sp.csr_matrix:
    """Sparse matrix of ``apply_f_map`` acting on row-major ``vec(rho)``."""
    f = f_coefficients(build_utable(float(xi), dim), reservoir, dim)
    m, n = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    rows, cols, vals = [], [], []
    for k, (dm, dn) in enumerate(F_OFFSETS):
        p, q = m + dm, n + dn
        ok = (p >= 0) & (p < dim) & (q >= 0) & (q < dim) & (f[k] != 0)
        rows.append((m * dim + n)[ok])
        cols.append((p * dim + q)[ok])
        vals.append(f[k][ok])
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(dim * dim, dim * dim))


def _sandwich(x, y):
    """Superoperator of rho -> x @ rho @ y in row-major vec convention."""
    return sp.kron(sp.csr_matrix(x), sp.csr_matrix(y).T)


@lru_cache(maxsize=128)
def weak_superoperator(reservoir: XState, xi: float, dim: int) -> sp.csr_matrix:
    """Sparse matrix of ``weak_pass`` on a fixed truncation."""
    a, ad, aad, ada, aa, adad = _ladder(dim)
    eye = np.eye(dim)
    a11, a44 = reservoir.a11, reservoir.a44
    a14, a41 = complex(reservoir.a14), reservoir.a41
    w = reservoir.a22 + reservoir.a33 + 2.0 * complex(reservoir.a23).real
    m = 0.5 * (ada + aad)
    gen = a11 * (2 * _sandwich(ad, a) - _sandwich(aad, eye) - _sandwich(eye, aad))
    gen += a44 * (2 * _sandwich(a, ad) - _sandwich(ada, eye) - _sandwich(eye, ada))
    gen += w * (_sandwich(a, ad) + _sandwich(ad, a) - _sandwich(m, eye) - _sandwich(eye, m))
    if a14 != 0:
        gen += a14 * (2 * _sandwich(ad, ad) - _sandwich(adad, eye) - _sandwich(eye, adad))
        gen += a41 * (2 * _sandwich(a, a) - _sandwich(aa, eye) - _sandwich(eye, aa))
    return (sp.identity(dim * dim, format="csr") + xi * xi * gen).tocsr()


# ---- joint-unitary oracle ----------------------------------------------------

def _shift_operator(values, shift, dim):
    """Fock-space operator with <x+shift|O|x> = values[x], truncated to dim."""
    op = np.zeros((dim, dim), dtype=complex)
    for x in range(dim):
        y = x + shift
        if 0 <= y < dim:
            op[y, x] = values[x]
    return op


def assemble_joint_unitary(xi: float, dim: int) -> np.ndarray:
    """(4*dim) x (4*dim) matrix of the pass unitary, atom index outermost.

    Row/column ``4``-block ``(i, j)`` holds the Fock operator ``U_ij``.  Blocks
    whose total excitation number reaches past the truncation are not unitary.
    """
    if dim < 3:
        raise DomainError(f"dim={dim} must be >= 3")
    table = build_utable(float(xi), dim)
    big = np.zeros((4 * dim, 4 * dim), dtype=complex)
    for (i, j), s in SHIFTS.items():
        op = _shift_operator(table(i, j, np.arange(dim)), s, dim)
        big[(i - 1) * dim:i * dim, (j - 1) * dim:j * dim] = op
    return big


def partial_trace_pass(rho: np.ndarray, reservoir: XState, xi: float) -> np.ndarray:
    """Tr_AB[U (rho_AB x rho) U^dagger] on a fixed truncation."""
    d = rho.shape[0]
    u = assemble_joint_unitary(xi, d)
    joint = np.kron(reservoir.matrix(), rho)
    out = (u @ joint @ u.conj().T).reshape(4, d, 4, d)
    return np.einsum("imin->mn", out)


def interaction_hamiltonian(dim: int) -> np.ndarray:
    """g = 1 interaction Hamiltonian on the truncated (atoms x field) space."""
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)
    sp = np.array([[0.0, 1.0], [0.0, 0.0]])  # |e><g| with e first
    i2 = np.eye(2)
    h = np.zeros((4 * dim, 4 * dim))
    for s_atom in (np.kron(sp, i2), np.kron(i2, sp)):
        term = np.kron(s_atom, a)
        h += term + term.T
    return h
