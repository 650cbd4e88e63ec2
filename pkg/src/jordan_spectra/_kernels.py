"""Compiled dense complex kernels (numba, nopython, GIL released).

All kernels work in place on complex128 C-contiguous arrays and signal
failure through integer status codes; the Python wrappers in
:mod:`jordan_spectra.linalg` turn those codes into exceptions.
"""
import numpy as np
from numba import njit

EPS = np.finfo(np.float64).eps
TINY = np.finfo(np.float64).tiny

_jit = njit(cache=True, nogil=True)


@_jit
def abs1(z):
    return abs(z.real) + abs(z.imag)


@_jit
def balance(a):
    """Parlett-Reinsch diagonal scaling by powers of two (exact in floating point).

    Scaling stops before any row or column maximum would leave
    [TINY/EPS, EPS/TINY], as in LAPACK's gebal.
    """
    n = a.shape[0]
    radix = 2.0
    sqrdx = radix * radix
    sfmin2 = TINY / EPS * radix
    sfmax2 = 1.0 / sfmin2
    for _sweep in range(200):
        done = True
        for i in range(n):
            c = 0.0
            r = 0.0
            ca = 0.0
            ra = 0.0
            for j in range(n):
                ca = max(ca, abs1(a[j, i]))
                ra = max(ra, abs1(a[i, j]))
                if j != i:
                    c += abs1(a[j, i])
                    r += abs1(a[i, j])
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g and max(f, c, ca * f) * radix < sfmax2 and ra / (f * radix) > sfmin2:
                f *= radix
                c *= sqrdx
            g = r * radix
            while c > g and ca * f / radix > sfmin2 and ra * radix / f < sfmax2:
                f /= radix
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                g = 1.0 / f
                for j in range(n):
                    a[i, j] *= g
                for j in range(n):
                    a[j, i] *= f
        if done:
            break


@_jit
def hessenberg(a):
    """Householder reduction to upper Hessenberg form, in place."""
    n = a.shape[0]
    v = np.empty(n, dtype=np.complex128)
    for k in range(n - 2):
        m = n - k - 1
        # scale by the largest entry so the sums of squares cannot underflow
        cmax = 0.0
        for i in range(m):
            cmax = max(cmax, abs(a[k + 1 + i, k]))
        if cmax == 0.0:
            continue
        xnorm = 0.0
        for i in range(m):
            x = a[k + 1 + i, k] / cmax
            xnorm += x.real * x.real + x.imag * x.imag
        xnorm = np.sqrt(xnorm)
        x0 = a[k + 1, k] / cmax
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        alpha = -phase * xnorm
        for i in range(m):
            v[i] = a[k + 1 + i, k] / cmax
        v[0] -= alpha
        vnorm = 0.0
        for i in range(m):
            vnorm += v[i].real * v[i].real + v[i].imag * v[i].imag
        if vnorm == 0.0:
            continue
        scale = 1.0 / np.sqrt(vnorm)
        for i in range(m):
            v[i] *= scale
        # left: rows k+1.., columns k..
        for j in range(k, n):
            dot = 0.0j
            for i in range(m):
                dot += v[i].conjugate() * a[k + 1 + i, j]
            dot *= 2.0
            for i in range(m):
                a[k + 1 + i, j] -= v[i] * dot
        # right: all rows, columns k+1..
        for i in range(n):
            dot = 0.0j
            for j in range(m):
                dot += a[i, k + 1 + j] * v[j]
            dot *= 2.0
            for j in range(m):
                a[i, k + 1 + j] -= dot * v[j].conjugate()
        a[k + 1, k] = alpha * cmax
        for i in range(k + 2, n):
            a[i, k] = 0.0


@_jit
def _wilkinson_shift(a, b, c, d):
    # scaled by the largest entry, otherwise the discriminant underflows for tiny blocks
    s = max(abs1(a), abs1(b), abs1(c), abs1(d))
    if s == 0.0:
        return d
    a = a / s
    b = b / s
    c = c / s
    d = d / s
    half_tr = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) * (a - d) + b * c)
    mu1 = half_tr + disc
    mu2 = half_tr - disc
    if abs(mu1 - d) <= abs(mu2 - d):
        return mu1 * s
    return mu2 * s


@_jit
def hessenberg_qr_eigvals(h, w, max_iter, exceptional_every):
    """Single-shift QR with deflation on an upper Hessenberg matrix.

    Eigenvalues are written to ``w``. Returns -1 on success, otherwise
    the index of the trailing eigenvalue that failed to converge within
    ``max_iter`` iterations.
    """
    n = h.shape[0]
    anorm = 0.0
    for i in range(n):
        for j in range(max(0, i - 1), n):
            anorm += abs1(h[i, j])
    smlnum = TINY * (n / EPS)
    cs = np.empty(n, dtype=np.float64)
    sn = np.empty(n, dtype=np.complex128)
    hi = n - 1
    its = 0
    while hi >= 0:
        lo = hi
        while lo > 0:
            s = abs1(h[lo - 1, lo - 1]) + abs1(h[lo, lo])
            if s == 0.0:
                s = anorm
            if abs1(h[lo, lo - 1]) <= max(EPS * s, smlnum):
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            w[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        if its >= max_iter:
            return hi
        its += 1
        if its % exceptional_every == 0:
            mu = h[hi, hi] + 0.75 * abs1(h[hi, hi - 1])
        else:
            mu = _wilkinson_shift(h[hi - 1, hi - 1], h[hi - 1, hi],
                                  h[hi, hi - 1], h[hi, hi])
        for k in range(lo, hi + 1):
            h[k, k] -= mu
        # H - mu = Q R via Givens rotations
        for k in range(lo, hi):
            x = h[k, k]
            y = h[k + 1, k]
            ax = abs(x)
            ay = abs(y)
            r = np.hypot(ax, ay)
            if r == 0.0:
                c = 1.0
                s = 0.0j
            elif ax == 0.0:
                c = 0.0
                s = y.conjugate() / ay
            else:
                c = ax / r
                s = (x / ax) * y.conjugate() / r
            cs[k] = c
            sn[k] = s
            for j in range(k, hi + 1):
                t1 = h[k, j]
                t2 = h[k + 1, j]
                h[k, j] = c * t1 + s * t2
                h[k + 1, j] = -s.conjugate() * t1 + c * t2
        # R Q
        for k in range(lo, hi):
            c = cs[k]
            s = sn[k]
            top = min(k + 2, hi)
            for i in range(lo, top + 1):
                t1 = h[i, k]
                t2 = h[i, k + 1]
                h[i, k] = c * t1 + s.conjugate() * t2
                h[i, k + 1] = -s * t1 + c * t2
        for k in range(lo, hi + 1):
            h[k, k] += mu
    return -1


@_jit
def lu_factor(a, piv, floor):
    """LU with partial pivoting, in place. Returns -1 or the failing pivot index."""
    n = a.shape[0]
    for k in range(n):
        p = k
        best = abs(a[k, k])
        for i in range(k + 1, n):
            v = abs(a[i, k])
            if v > best:
                best = v
                p = i
        piv[k] = p
        if best <= floor:
            return k
        if p != k:
            for j in range(n):
                t = a[k, j]
                a[k, j] = a[p, j]
                a[p, j] = t
        inv = 1.0 / a[k, k]
        for i in range(k + 1, n):
            a[i, k] *= inv
            l = a[i, k]
            if l != 0.0:
                for j in range(k + 1, n):
                    a[i, j] -= l * a[k, j]
    return -1


@_jit
def lu_solve(lu, piv, b):
    n = lu.shape[0]
    x = b.copy()
    for k in range(n):
        p = piv[k]
        if p != k:
            t = x[k]
            x[k] = x[p]
            x[p] = t
    for i in range(n):
        acc = x[i]
        for j in range(i):
            acc -= lu[i, j] * x[j]
        x[i] = acc
    for i in range(n - 1, -1, -1):
        acc = x[i]
        for j in range(i + 1, n):
            acc -= lu[i, j] * x[j]
        x[i] = acc / lu[i, i]
    return x


@_jit
def hessenberg_residuals(h, lams):
    """One inverse-iteration step of (H - lam) per eigenvalue.

    Returns ||(H - lam) v|| for the unit vector v = x/||x|| solving
    (H - lam) x = b with ||b|| = 1; this bounds the smallest singular
    value of H - lam from above. Zero pivots are replaced by eps*||H||.
    """
    n = h.shape[0]
    anorm = 0.0
    for i in range(n):
        for j in range(n):
            anorm += abs(h[i, j]) ** 2
    anorm = np.sqrt(anorm)
    guard = EPS * max(anorm, TINY)
    out = np.empty(lams.shape[0], dtype=np.float64)
    u = np.empty((n, n), dtype=np.complex128)
    x = np.empty(n, dtype=np.complex128)
    for m in range(lams.shape[0]):
        lam = lams[m]
        for i in range(n):
            for j in range(n):
                u[i, j] = h[i, j]
            u[i, i] -= lam
            x[i] = 1.0 / np.sqrt(n)
        for k in range(n - 1):
            if abs(u[k + 1, k]) > abs(u[k, k]):
                for j in range(k, n):
                    t = u[k, j]
                    u[k, j] = u[k + 1, j]
                    u[k + 1, j] = t
                t = x[k]
                x[k] = x[k + 1]
                x[k + 1] = t
            if abs(u[k, k]) < guard:
                u[k, k] = guard
            l = u[k + 1, k] / u[k, k]
            if l != 0.0:
                for j in range(k + 1, n):
                    u[k + 1, j] -= l * u[k, j]
                x[k + 1] -= l * x[k]
        if abs(u[n - 1, n - 1]) < guard:
            u[n - 1, n - 1] = guard
        for i in range(n - 1, -1, -1):
            acc = x[i]
            for j in range(i + 1, n):
                acc -= u[i, j] * x[j]
            x[i] = acc / u[i, i]
        xn = 0.0
        for i in range(n):
            xn += abs(x[i]) ** 2
        out[m] = 1.0 / np.sqrt(xn)
    return out
