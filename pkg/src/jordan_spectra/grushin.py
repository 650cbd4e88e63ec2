"""Grushin problem for the perturbed Jordan block.

The augmented operator

    A(z) = [[A - z, R_-], [R_+, 0]],   R_+ u = u_1,   R_- u_- = u_- e_N,

is invertible for |z| < 1 when A = A0, and its inverse has the scalar
lower-right block E_-+(z). For A = A_delta, z is an eigenvalue exactly when
E_-+(z) vanishes, which is what the zero counter exploits.
"""
import cmath
import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .asymptotics import big_g, big_k
from .errors import ContourTooClose, NodeBudgetExceeded, RegimeViolation
from .jordan import RegimeReport, jordan_block, regime_report
from .linalg import hs_norm, lu_factor, lu_solve, solve_linear

INVERSE_TOL = 1e-12
NEUMANN_KMAX = 30
MAX_NODES = 2 ** 16


def augmented_matrix(a: np.ndarray, z: complex) -> np.ndarray:
    n = a.shape[0]
    m = np.zeros((n + 1, n + 1), dtype=np.complex128)
    m[:n, :n] = a
    m[np.arange(n), np.arange(n)] -= z
    m[n - 1, n] = 1.0
    m[n, 0] = 1.0
    return m


def _apply_unperturbed(x, z):
    # A0(z) = tau^-1 - z Pi_N on C^{N+1}, applied to the rows of x
    out = np.roll(x, -1, axis=0)
    out[:-1] -= z * x[:-1]
    return out


@dataclass(frozen=True)
class GrushinBlocks:
    e0: np.ndarray
    e_plus0: np.ndarray
    e_minus0: np.ndarray
    e_mp0: complex
    z: complex
    n: int

    def assembled(self) -> np.ndarray:
        n = self.n
        m = np.empty((n + 1, n + 1), dtype=np.complex128)
        m[:n, :n] = self.e0
        m[:n, n] = self.e_plus0
        m[n, :n] = self.e_minus0
        m[n, n] = self.e_mp0
        return m


def unperturbed_blocks(z: complex, n: int) -> GrushinBlocks:
    """Inverse blocks of the unperturbed augmented operator at z.

    The inverse is summed as (1 + S + ... + S^N) tau with S = z tau Pi_N,
    then checked against A0(z) E = I.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise ValueError(f"|z| must be < 1, got {abs(z)}")
    if n < 1:
        raise ValueError("n must be >= 1")
    size = n + 1
    tau = np.roll(np.eye(size, dtype=np.complex128), 1, axis=0)
    # Horner: X <- 1 + S X, applied N times, then composed with tau
    x = np.eye(size, dtype=np.complex128)
    for _ in range(n):
        sx = np.roll(np.vstack([x[:-1], np.zeros((1, size))]), 1, axis=0)
        x = np.eye(size, dtype=np.complex128) + z * sx
    e = x @ tau
    resid = _apply_unperturbed(e, z) - np.eye(size)
    if hs_norm(resid) > INVERSE_TOL * max(1.0, hs_norm(e)):
        raise ArithmeticError(f"unperturbed Grushin inverse failed its identity check at z={z}")
    return GrushinBlocks(e0=e[:n, :n].copy(), e_plus0=e[:n, n].copy(), e_minus0=e[n, :n].copy(),
                         e_mp0=complex(e[n, n]), z=z, n=n)


@dataclass(frozen=True)
class ZVector:
    n: int
    z: complex
    entries: np.ndarray

    @property
    def hs_norm(self):
        return hs_norm(self.entries)


def z_vector(z: complex, n: int) -> ZVector:
    """Z_{jk} = z^(N-j+k-1), j, k = 1..N."""
    z = complex(z)
    j = np.arange(1, n + 1)
    expo = n - j[:, None] + j[None, :] - 1
    return ZVector(n=n, z=z, entries=np.power(z, expo).astype(np.complex128))


@dataclass(frozen=True)
class EffectiveEval:
    value: complex
    method: Literal["exact", "neumann", "first_order"]
    regime: RegimeReport


def _regime(z, q, delta, n):
    return regime_report(n, delta, hs_norm(q), min(abs(z), np.nextafter(1.0, 0.0)))


def effective_hamiltonian_exact(z, q, delta, n=None) -> EffectiveEval:
    """E_-+(z) for A_delta, from one (N+1)-dimensional solve.

    Raises SingularMatrix where the augmented problem degenerates.
    """
    q = np.asarray(q, dtype=np.complex128)
    n = q.shape[0] if n is None else n
    a = jordan_block(n) + delta * q
    rhs = np.zeros(n + 1, dtype=np.complex128)
    rhs[n] = 1.0
    x = solve_linear(augmented_matrix(a, z), rhs)
    return EffectiveEval(value=complex(x[n]), method="exact", regime=_regime(z, q, delta, n))


def effective_hamiltonian_neumann(z, q, delta, n=None, k_max=NEUMANN_KMAX) -> EffectiveEval:
    """E_-+^0 - E_-^0 dQ E_+^0 + E_-^0 dQ E^0 dQ E_+^0 - ..., truncated after k_max terms.

    The series parameter delta*||Q||_HS*G(|z|) must be below 1/2.
    """
    q = np.asarray(q, dtype=np.complex128)
    n = q.shape[0] if n is None else n
    regime = _regime(z, q, delta, n)
    if not regime.neumann_ok:
        raise RegimeViolation(f"delta*|Q|*G(|z|) = {regime.neumann_param:.3g} is not below 1/2")
    blocks = unperturbed_blocks(z, n)
    dq = delta * q
    value = blocks.e_mp0
    w = dq @ blocks.e_plus0
    sign = -1.0
    for _ in range(k_max):
        value += sign * (blocks.e_minus0 @ w)
        w = dq @ (blocks.e0 @ w)
        sign = -sign
    return EffectiveEval(value=complex(value), method="neumann", regime=regime)


def neumann_truncation_bound(z, q, delta, n, k_max):
    """Geometric tail bound G (d|Q|G)^(k_max+1) / (1 - d|Q|G)."""
    g = big_g(n, abs(z))
    p = delta * hs_norm(q) * g
    return g * p ** (k_max + 1) / (1.0 - p)


def first_order_approx(z, q, delta, n=None) -> complex:
    """z^N - delta sum_{j,k} q_jk z^(N-j+k-1)."""
    q = np.asarray(q, dtype=np.complex128)
    n = q.shape[0] if n is None else n
    zv = z_vector(z, n).entries
    return complex(complex(z) ** n - delta * np.sum(q * zv))


def _winding(f, r, nodes, max_nodes):
    """Winding number of t -> f(r e^{2 pi i t}) with adaptive refinement."""
    ts = [k / nodes for k in range(nodes)]
    vals = {t: f(r * cmath.exp(2j * math.pi * t)) for t in ts}
    vals[1.0] = vals[0.0]
    count = [nodes]
    total = 0.0
    mods = [abs(v) for v in vals.values()]
    if min(mods) < 1e-10 * max(mods):
        raise ContourTooClose(f"|E_-+| drops to {min(mods):.3e} on |z| = {r} (max {max(mods):.3e})")

    def seg(t0, t1, v0, v1, depth):
        dphi = cmath.phase(v1 / v0)
        if abs(dphi) <= math.pi / 2:
            return dphi
        if count[0] >= max_nodes or depth > 40:
            raise NodeBudgetExceeded(f"phase tracking needed more than {max_nodes} nodes")
        tm = 0.5 * (t0 + t1)
        vm = f(r * cmath.exp(2j * math.pi * tm))
        count[0] += 1
        mods.append(abs(vm))
        return seg(t0, tm, v0, vm, depth + 1) + seg(tm, t1, vm, v1, depth + 1)

    bounds = ts + [1.0]
    for a, b in zip(bounds[:-1], bounds[1:]):
        total += seg(a, b, vals[a], vals[b], 0)
    return total / (2.0 * math.pi), min(mods), max(mods), count[0]


def count_zeros_argument_principle(q, delta, n=None, r=0.5, nodes=256,
                                   max_nodes=MAX_NODES) -> int:
    """Number of eigenvalues of A_delta in |z| < r, from the winding of E_-+ on |z| = r."""
    q = np.asarray(q, dtype=np.complex128)
    n = q.shape[0] if n is None else n
    if nodes < 256:
        raise ValueError("nodes must be >= 256")
    if not 0.0 < r < 1.0:
        raise ValueError("r must lie in (0, 1)")
    a = jordan_block(n) + delta * q
    rhs = np.zeros(n + 1, dtype=np.complex128)
    rhs[n] = 1.0

    def g(z):
        return complex(lu_solve(lu_factor(augmented_matrix(a, z)), rhs)[n])

    wind, lo, hi, _ = _winding(g, r, nodes, max_nodes)
    if lo < 1e-10 * hi:
        raise ContourTooClose(f"|E_-+| drops to {lo:.3e} on |z| = {r} (max {hi:.3e})")
    count = round(wind)
    if abs(wind - count) > 1e-6 or count < 0:
        raise ArithmeticError(f"non-integral winding number {wind}")
    return int(count)


def inverse_identity_residual(z: complex, n: int, blocks: Optional[GrushinBlocks] = None) -> float:
    """Relative HS residual of A0(z) times the assembled inverse blocks, against I."""
    blocks = unperturbed_blocks(z, n) if blocks is None else blocks
    e = blocks.assembled()
    a0 = augmented_matrix(jordan_block(n), z)
    return hs_norm(a0 @ e - np.eye(n + 1)) / max(1.0, hs_norm(e))


def z_norm_closed_form(z, n):
    """|Z(z)|_HS = K(|z|^2)."""
    return big_k(n, abs(z) ** 2)
