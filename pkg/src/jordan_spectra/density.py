"""Predicted interior eigenvalue density and its Monte Carlo counterparts."""
import csv
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy import stats

from .asymptotics import big_k, curvature_combination, density_correction
from .errors import InsufficientData, MixedSpecs, RegimeViolation
from .jordan import PerturbationSpec, build, regime_flags
from .linalg import TOL_EIG, eigen_residuals, eigenvalues, hessenberg, hs_norm

HIST_COLUMNS = ("r_lo", "r_hi", "count", "trials", "predicted", "poisson_err")
DH_INFLATION = 1e-6
MIN_EXPECTED = 25.0


def predicted_density(z_modulus):
    """2 / (pi (1 - |z|^2)^2) per unit area."""
    r = np.asarray(z_modulus, dtype=float)
    if np.any((r < 0) | (r >= 1)):
        raise ValueError("|z| must lie in [0, 1)")
    out = 2.0 / (math.pi * (1.0 - r * r) ** 2)
    return float(out) if np.ndim(z_modulus) == 0 else out


def predicted_density_finite_n(n, z_modulus):
    """Finite-N leading density (1/pi) curvature_N(t) / K_N(t)^2 at t = |z|^2.

    Evaluated as the limiting density plus its closed-form correction, which
    agrees with the sum formula and keeps full relative accuracy in the
    correction itself.
    """
    r = np.asarray(z_modulus, dtype=float)
    if n < 2:
        raise ValueError("n must be >= 2")
    out = predicted_density(r) + density_correction(n, r * r)
    return float(out) if np.ndim(z_modulus) == 0 else out


def predicted_density_from_sums(n, z_modulus):
    t = np.asarray(z_modulus, dtype=float) ** 2
    return curvature_combination(n, t) / (math.pi * big_k(n, t) ** 2)


def expected_count_disk(r):
    """Integral of the limiting density over D(0, r): 2 r^2 / (1 - r^2)."""
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r >= 1)):
        raise ValueError("r must lie in [0, 1)")
    out = 2.0 * r * r / (1.0 - r * r)
    return float(out) if out.ndim == 0 else out


@dataclass
class SpectrumSample:
    spec: PerturbationSpec
    eigenvalues: np.ndarray
    max_residual: float
    accepted: bool
    a_norm: float = float("nan")

    @property
    def residual_ok(self):
        return self.max_residual <= TOL_EIG * self.a_norm


def sample_spectrum(spec: PerturbationSpec) -> SpectrumSample:
    """Build A_delta for ``spec`` and compute its spectrum with residual certificates."""
    op = build(spec)
    lams = eigenvalues(op.a_delta)
    res = eigen_residuals(op.a_delta, lams, hess=hessenberg(op.a_delta))
    return SpectrumSample(spec=spec, eigenvalues=lams, max_residual=float(res.max()),
                          accepted=op.accepted, a_norm=hs_norm(op.a_delta))


@dataclass
class RadialHistogram:
    edges: np.ndarray
    counts: np.ndarray
    trials: int
    rejected: int = 0
    predicted: np.ndarray = field(init=False)

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=float)
        if self.edges.ndim != 1 or self.edges.size < 2 or np.any(np.diff(self.edges) <= 0):
            raise ValueError("edges must be a strictly increasing sequence of length >= 2")
        if self.edges[0] < 0 or self.edges[-1] >= 1:
            raise ValueError("edges must lie in [0, 1)")
        self.counts = np.asarray(self.counts, dtype=np.int64)
        self.predicted = np.diff(expected_count_disk(self.edges))

    @classmethod
    def empty(cls, edges):
        edges = np.asarray(edges, dtype=float)
        return cls(edges=edges, counts=np.zeros(edges.size - 1, dtype=np.int64), trials=0)

    @property
    def poisson_err(self):
        """Standard error of the per-trial mean count, sqrt(predicted*trials)/trials."""
        if self.trials == 0:
            return np.full(self.predicted.shape, np.inf)
        return np.sqrt(self.predicted / self.trials)

    @property
    def mean_counts(self):
        return self.counts / self.trials if self.trials else np.zeros(self.counts.shape)

    def add(self, eigs, accepted=True):
        if not accepted:
            self.rejected += 1
            return self
        mods = np.abs(np.asarray(eigs))
        mods = mods[mods <= self.edges[-1]]
        self.counts += np.histogram(mods, bins=self.edges)[0]
        self.trials += 1
        return self

    def merge(self, other):
        if not np.array_equal(self.edges, other.edges):
            raise ValueError("cannot merge histograms with different edges")
        out = RadialHistogram(self.edges, self.counts + other.counts, self.trials + other.trials,
                              self.rejected + other.rejected)
        return out

    def testable(self):
        return self.predicted * self.trials >= MIN_EXPECTED

    def z_scores(self):
        return (self.mean_counts - self.predicted) / self.poisson_err

    def rows(self):
        err = self.poisson_err
        for i in range(self.counts.size):
            yield (self.edges[i], self.edges[i + 1], int(self.counts[i]), self.trials,
                   self.predicted[i], err[i])

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(HIST_COLUMNS)
            for row in self.rows():
                w.writerow([repr(float(row[0])), repr(float(row[1])), row[2], row[3],
                            repr(float(row[4])), repr(float(row[5]))])


def default_edges(r_max, width=0.05):
    nbins = max(1, int(round(r_max / width)))
    return np.linspace(0.0, r_max, nbins + 1)


def _common_shape(samples):
    keys = {(s.spec.n, s.spec.delta) for s in samples}
    if len(keys) > 1:
        raise MixedSpecs(f"samples mix (n, delta) values: {sorted(keys)}")
    return keys.pop() if keys else None


def check_profile_regime(n, delta, r_max):
    """The theorem regime must hold at r0 = r_max + 1/N (with the c1 = 2 norm bound)."""
    r0 = r_max + 1.0 / n
    if r0 >= 1.0:
        raise RegimeViolation(f"r_max + 1/N = {r0:.4g} is not inside the unit disc")
    report = regime_flags(PerturbationSpec(n=n, delta=delta), r0)
    if not report.theorem_ok:
        raise RegimeViolation(f"error term {report.error_term:.3g} at r0 = {r0:.4g} is not small")
    return report


def empirical_profile(samples: Sequence[SpectrumSample], edges=None, r_max=0.6,
                      check_regime=True) -> RadialHistogram:
    """Radial histogram of |lambda| <= r_max over the accepted samples."""
    edges = default_edges(r_max) if edges is None else np.asarray(edges, dtype=float)
    if edges[-1] > r_max + 1e-12:
        raise ValueError("edges extend beyond r_max")
    shape = _common_shape(samples)
    if shape is not None and check_regime:
        check_profile_regime(shape[0], shape[1], r_max)
    hist = RadialHistogram.empty(edges)
    for s in samples:
        hist.add(s.eigenvalues, s.accepted)
    return hist


@dataclass(frozen=True)
class UniformityReport:
    chi2: float
    dof: int
    passed: bool
    points: int
    critical: float


def angular_chi2(angles, sectors=16, level=0.999):
    angles = np.mod(np.asarray(angles, dtype=float), 2.0 * math.pi)
    counts = np.histogram(angles, bins=sectors, range=(0.0, 2.0 * math.pi))[0]
    expected = angles.size / sectors
    chi2 = float(np.sum((counts - expected) ** 2) / expected)
    crit = float(stats.chi2.ppf(level, sectors - 1))
    return UniformityReport(chi2=chi2, dof=sectors - 1, passed=chi2 < crit, points=int(angles.size),
                            critical=crit)


def rotation_uniformity(samples, r_max, sectors=16, min_points=100) -> UniformityReport:
    """Chi-square test of the angles of accepted interior eigenvalues against uniform."""
    lams = [s.eigenvalues[np.abs(s.eigenvalues) <= r_max] for s in samples if s.accepted]
    lams = np.concatenate(lams) if lams else np.empty(0, dtype=complex)
    if lams.size < min_points:
        raise InsufficientData(f"only {lams.size} interior eigenvalues, need {min_points}")
    return angular_chi2(np.angle(lams), sectors)


@dataclass(frozen=True)
class DaviesHagerReport:
    contained: bool
    inner_count: int
    bound: float
    radius: float
    outer_radius: float
    in_scope: bool

    @property
    def count_ok(self):
        return self.inner_count <= self.bound


def davies_hager_check(sample: SpectrumSample, sigma: float) -> DaviesHagerReport:
    """Containment in D(0, R N^(3/N)) and the interior count bound in D(0, R e^-sigma)."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    n, delta = sample.spec.n, sample.spec.delta
    radius = delta ** (1.0 / n)
    outer = radius * n ** (3.0 / n)
    mods = np.abs(sample.eigenvalues)
    return DaviesHagerReport(
        contained=bool(np.all(mods <= outer * (1.0 + DH_INFLATION))),
        inner_count=int(np.sum(mods < radius * math.exp(-sigma))),
        bound=2.0 / sigma + 4.0 / sigma * math.log(n),
        radius=radius,
        outer_radius=outer,
        in_scope=delta <= n ** -7.0,
    )
