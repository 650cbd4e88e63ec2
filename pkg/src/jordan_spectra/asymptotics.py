"""Partial geometric sums K_N, M_{N,k} and the combinations built from them.

All functions accept scalars or arrays for ``t`` and broadcast. ``n`` may be
``math.inf`` where the infinite sum converges (t < 1).
"""
import math
from dataclasses import dataclass

import numpy as np

SWITCHOVER = 1e-4


def _scalar_or_array(x, like):
    return float(x) if np.ndim(like) == 0 else x


def big_g(n, r):
    """min(n, 1/(1-r)), with r = 1 mapped to n."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        inv = np.where(r < 1.0, 1.0 / np.where(r < 1.0, 1.0 - r, 1.0), np.inf)
    return _scalar_or_array(np.minimum(float(n), inv), r)


def _one_minus_pow(t, n):
    # 1 - t^n accurate also for t close to 1
    with np.errstate(divide="ignore"):
        return -np.expm1(n * np.log(t))


def _direct_sum(n, k, t, start=0):
    nu = np.arange(start, int(n), dtype=float)
    terms = np.power.outer(t.ravel(), nu)
    if k:
        terms *= nu ** k
    return terms.sum(axis=1).reshape(t.shape)


def big_k(n, t):
    """K_n(t) = sum_{nu=0}^{n-1} t^nu."""
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise ValueError("t must lie in [0, 1]")
    if math.isinf(n):
        with np.errstate(divide="ignore"):
            return _scalar_or_array(1.0 / (1.0 - t), t)
    out = np.empty(t.shape)
    far = np.abs(1.0 - t) > SWITCHOVER
    tf = t[far]
    with np.errstate(divide="ignore", invalid="ignore"):
        out[far] = np.where(tf == 0.0, 1.0, _one_minus_pow(tf, n) / (1.0 - tf))
    if np.any(~far):
        out[~far] = _direct_sum(n, 0, t[~far])
    return _scalar_or_array(out, t)


def _eulerian(k):
    """Coefficients of the Eulerian polynomial A_k, so Li_{-k}(t) = t A_k(t)/(1-t)^(k+1)."""
    row = [1]
    for m in range(2, k + 1):
        row = [(j + 1) * (row[j] if j < len(row) else 0)
               + (m - j) * (row[j - 1] if j >= 1 else 0) for j in range(m)]
    return row


def polylog_neg(k, t):
    """sum_{nu>=1} nu^k t^nu for t < 1."""
    t = np.asarray(t, dtype=float)
    if k == 0:
        return t / (1.0 - t)
    poly = np.polyval(_eulerian(k)[::-1], t)
    return t * poly / (1.0 - t) ** (k + 1)


def m_poly(n, k, t):
    """M_{n,k}(t) = sum_{nu=1}^{n-1} nu^k t^nu (exact partial sum)."""
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise ValueError("t must lie in [0, 1]")
    if math.isinf(n):
        return _scalar_or_array(polylog_neg(k, t), t)
    if n < 1:
        raise ValueError("n must be >= 1")
    out = _direct_sum(n, k, np.atleast_1d(t), start=1)
    return _scalar_or_array(out.reshape(t.shape), t)


def m_tail(n, k, t):
    """M_{inf,k}(t) - M_{n,k}(t) = sum_{nu>=n} nu^k t^nu, with t^n factored out.

    Returns the pair ``(t**n, rest)`` so that ratios can cancel t^n exactly
    when it underflows.
    """
    t = np.asarray(t, dtype=float)
    s = 1.0 / (1.0 - t)
    rest = np.zeros(t.shape)
    for j in range(k + 1):
        sj = s if j == 0 else polylog_neg(j, t)
        rest = rest + math.comb(k, j) * float(n) ** (k - j) * sj
    return t ** n, rest


def k_differential(n, order, t):
    """(t d/dt)^order K_n at t, i.e. sum nu^order t^nu."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    return m_poly(n, order, t)


def curvature_combination(n, t):
    """(2/t)(K (t d/dt)^2 K - (t d/dt K)^2), continuous at t = 0 with value 2."""
    t = np.asarray(t, dtype=float)
    if n < 2:
        raise ValueError("n must be >= 2")
    k0 = big_k(n, t)
    k1 = m_poly(n, 1, t)
    k2 = m_poly(n, 2, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 2.0 * (k0 * k2 - k1 * k1) / t
    return _scalar_or_array(np.where(t == 0.0, 2.0, val), t)


def dz_z_norm_sq(n, t):
    """|z d/dz Z|^2_HS = 2(K (t d/dt)^2 K + (t d/dt K)^2) at t = |z|^2."""
    t = np.asarray(t, dtype=float)
    k0 = big_k(n, t)
    k1 = m_poly(n, 1, t)
    k2 = m_poly(n, 2, t)
    return _scalar_or_array(2.0 * (k0 * k2 + k1 * k1), t)


def density_correction(n, t):
    """Finite-n interior density minus its n = infinity limit, at t = |z|^2.

    Closed form -(2/pi) n^2 t^(n-1) / (1 - t^n)^2; no cancellation, so it stays
    accurate when the correction is far below the leading term.
    """
    t = np.asarray(t, dtype=float)
    if math.isinf(n):
        return _scalar_or_array(np.zeros(t.shape), t)
    val = -(2.0 / math.pi) * n * n * t ** (n - 1) / _one_minus_pow(t, n) ** 2
    return _scalar_or_array(np.where(t == 0.0, 0.0 if n > 1 else np.nan, val), t)


@dataclass(frozen=True)
class EquivalenceReport:
    quantity: str
    grid: str
    ratio_min: float
    ratio_max: float

    @property
    def spread(self):
        return self.ratio_max / self.ratio_min

    def as_dict(self):
        return {"quantity": self.quantity, "grid": self.grid, "ratio_min": self.ratio_min,
                "ratio_max": self.ratio_max, "spread": self.spread}


def default_grid(n, points=400):
    return np.linspace(0.01, 1.0 - 1.0 / n, points)


def _report(name, grid, ratio):
    ratio = np.asarray(ratio, dtype=float)
    if not np.all(np.isfinite(ratio)) or np.any(ratio <= 0):
        raise FloatingPointError(f"non-finite or non-positive ratio for {name}")
    return EquivalenceReport(name, grid, float(ratio.min()), float(ratio.max()))


def check_equivalences(k_list=(0, 1, 2, 3), n_list=(10, 100, 1000), t_grid=None):
    """Bounded-ratio checks of the order-of-magnitude equivalences for M_{N,k} and the curvature.

    ``t_grid`` is an array (filtered to (0, 1-1/N] per N) or a callable
    ``n -> array``; the default is 400 evenly spaced points on [0.01, 1-1/N].
    """
    def grid_for(n):
        if t_grid is None:
            g = default_grid(n)
        elif callable(t_grid):
            g = np.asarray(t_grid(n), dtype=float)
        else:
            g = np.asarray(t_grid, dtype=float)
        g = g[(g > 0) & (g <= 1.0 - 1.0 / n)]
        if g.size == 0:
            raise ValueError(f"empty t grid for N={n}")
        return g

    def describe(g):
        return f"{g.size} pts in [{g.min():.4g}, {g.max():.4g}]"

    reports = []
    n_top = max(n_list)
    g_inf = grid_for(n_top)
    for k in k_list:
        ratio = polylog_neg(k, g_inf) / (g_inf / (1.0 - g_inf) ** (k + 1))
        reports.append(_report(f"M_inf,{k} / (t/(1-t)^{k + 1})", describe(g_inf), ratio))
    for k in k_list:
        pooled = {"tail": [], "fin_inf": [], "min": []}
        for n in n_list:
            g = grid_for(n)
            _, rest = m_tail(n, k, g)
            tail_ratio = rest * (1.0 - g) / (n + 1.0 / (1.0 - g)) ** k
            for lo, hi, band in ((0.0, 0.5, "t<=0.5"), (0.5, 1.0, "t>0.5")):
                sel = (g > lo) & (g <= hi)
                if np.any(sel):
                    reports.append(_report(
                        f"(M_inf,{k} - M_{n},{k}) / (t^N/(1-t) (N+1/(1-t))^{k}) [{band}]",
                        describe(g[sel]), tail_ratio[sel]))
            fin = m_poly(n, k, g)
            fin_inf = fin / polylog_neg(k, g)
            reports.append(_report(f"M_{n},{k} / M_inf,{k}", describe(g), fin_inf))
            ratio_min = fin / (g * np.minimum(1.0 / (1.0 - g), n) ** (k + 1))
            reports.append(_report(f"M_{n},{k} / (t min(1/(1-t), N)^{k + 1})", describe(g), ratio_min))
            pooled["tail"].append(tail_ratio)
            pooled["fin_inf"].append(fin_inf)
            pooled["min"].append(ratio_min)
        nl = ",".join(str(n) for n in n_list)
        reports.append(_report(f"(M_inf,{k} - M_N,{k}) / (t^N/(1-t) (N+1/(1-t))^{k}) uniform",
                               f"N in {{{nl}}}", np.concatenate(pooled["tail"])))
        reports.append(_report(f"M_N,{k} / M_inf,{k} uniform", f"N in {{{nl}}}",
                               np.concatenate(pooled["fin_inf"])))
        reports.append(_report(f"M_N,{k} / (t min(1/(1-t), N)^{k + 1}) uniform", f"N in {{{nl}}}",
                               np.concatenate(pooled["min"])))
    pooled = []
    for n in n_list:
        g = grid_for(n)
        ratio = curvature_combination(n, g) / big_k(n, g) ** 4
        pooled.append(ratio)
        reports.append(_report(f"curvature_{n} / K_{n}^4", describe(g), ratio))
    reports.append(_report("curvature_N / K_N^4 uniform",
                           "N in {" + ",".join(str(n) for n in n_list) + "}", np.concatenate(pooled)))
    return reports


def bridge_constant(n_list, t_grid=None):
    """Smallest C with |finite-N density - limit| <= C t^(N-1) N^2 on the grid."""
    best = 0.0
    for n in n_list:
        g = default_grid(n) if t_grid is None else np.asarray(t_grid(n) if callable(t_grid) else t_grid)
        g = g[(g > 0) & (g <= 1.0 - 1.0 / n)]
        scale = g ** (n - 1) * n * n
        # points where t^(N-1) underflows carry no information
        keep = scale > 1e-290
        ratio = np.abs(density_correction(n, g[keep])) / scale[keep]
        best = max(best, float(np.max(ratio)))
    return best
