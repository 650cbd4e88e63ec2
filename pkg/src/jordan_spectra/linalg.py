"""Dense complex linear algebra: norms, LU solves and a QR eigensolver.

Matrices are plain ``numpy`` complex128 arrays; every public entry point
validates shape and finiteness before handing them to the compiled kernels.
"""
import numpy as np

from . import _kernels
from .errors import NoConvergence, SingularMatrix

TOL_SOLVE = 1e-10
TOL_EIG = 1e-8
PIVOT_FLOOR = 1e-30
QR_MAX_ITER = 60
QR_EXCEPTIONAL_EVERY = 15


def as_matrix(m, square=True):
    a = np.ascontiguousarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def hs_norm(m) -> float:
    a = np.abs(np.asarray(m))
    big = float(a.max()) if a.size else 0.0
    if big == 0.0 or not np.isfinite(big):
        return big
    # scaled so tiny or huge entries neither underflow nor overflow when squared
    return big * float(np.sqrt(np.sum((a / big) ** 2)))


def lu_factor(m):
    """Factor ``m`` in place-safe fashion; raises SingularMatrix below the pivot floor."""
    a = as_matrix(m).copy()
    n = a.shape[0]
    floor = PIVOT_FLOOR * hs_norm(a)
    piv = np.empty(n, dtype=np.int64)
    bad = _kernels.lu_factor(a, piv, floor)
    if bad >= 0:
        raise SingularMatrix(bad, float(np.max(np.abs(a[bad:, bad]))))
    return a, piv


def lu_solve(factors, b):
    lu, piv = factors
    return _kernels.lu_solve(lu, piv, np.ascontiguousarray(b, dtype=np.complex128))


def solve_linear(m, b) -> np.ndarray:
    a = as_matrix(m)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    if b.shape != (a.shape[0],):
        raise ValueError(f"right-hand side has shape {b.shape}, expected ({a.shape[0]},)")
    if not np.all(np.isfinite(b)):
        raise ValueError("right-hand side has non-finite entries")
    return lu_solve(lu_factor(a), b)


def hessenberg(m) -> np.ndarray:
    """Unitarily similar upper Hessenberg form (no balancing)."""
    h = as_matrix(m).copy()
    _kernels.hessenberg(h)
    return h


def _pow2_normalize(h):
    """Scale h in place by an exact power of two when its largest entry is far from 1.

    Returns the exponent e applied (h <- 2^e h). Two steps, since 2^e alone
    overflows for subnormal inputs.
    """
    big = float(np.max(np.abs(h)))
    if big == 0.0 or 2.0 ** -100 <= big <= 2.0 ** 100:
        return 0
    e = -int(np.frexp(big)[1])
    h *= float(np.ldexp(1.0, e // 2))
    h *= float(np.ldexp(1.0, e - e // 2))
    return e


def eigenvalues(m, balance=True) -> np.ndarray:
    """All eigenvalues with multiplicity: balance, Hessenberg reduction, shifted QR.

    Raises NoConvergence if a trailing block needs more than 60 QR sweeps.
    """
    h = as_matrix(m).copy()
    n = h.shape[0]
    if n == 0:
        raise ValueError("empty matrix")
    # balancing can shrink a graded matrix far below 1, so normalize again after it
    e = _pow2_normalize(h)
    if balance:
        _kernels.balance(h)
        e += _pow2_normalize(h)
    _kernels.hessenberg(h)
    w = np.empty(n, dtype=np.complex128)
    bad = _kernels.hessenberg_qr_eigvals(h, w, QR_MAX_ITER, QR_EXCEPTIONAL_EVERY)
    if bad >= 0:
        raise NoConvergence(int(bad))
    if e:
        w /= float(np.ldexp(1.0, e // 2))
        w /= float(np.ldexp(1.0, e - e // 2))
    return w


def eigen_residuals(m, lams, hess=None) -> np.ndarray:
    """Upper bounds on sigma_min(M - lam) from one inverse-iteration step each.

    Works on the unitary Hessenberg form, so each bound costs O(n^2).
    """
    h = hessenberg(m) if hess is None else hess
    return _kernels.hessenberg_residuals(h, np.ascontiguousarray(lams, dtype=np.complex128))


def match_multisets(a, b):
    """Greedy minimal-distance pairing of two equal-size multisets.

    Returns the pairwise distances in pairing order; their maximum is the
    multiset distance used throughout the tests.
    """
    a = np.asarray(a, dtype=np.complex128).ravel()
    b = np.asarray(b, dtype=np.complex128).ravel()
    if a.shape != b.shape:
        raise ValueError("multisets differ in size")
    dist = np.abs(a[:, None] - b[None, :])
    out = np.empty(a.size)
    for k in range(a.size):
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        out[k] = dist[i, j]
        dist[i, :] = np.inf
        dist[:, j] = np.inf
    return out


def multiset_distance(a, b) -> float:
    d = match_multisets(a, b)
    return float(d.max()) if d.size else 0.0


def operator_norm(m) -> float:
    """Largest singular value, as sqrt of the top eigenvalue of M^H M."""
    a = as_matrix(m, square=False)
    gram = a.conj().T @ a
    return float(np.sqrt(np.max(np.abs(eigenvalues(gram)))))
