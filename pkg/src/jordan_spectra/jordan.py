"""The Jordan block, its perturbations A_delta = A0 + delta*Q, and regime checks."""
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .asymptotics import big_g
from .linalg import hs_norm
from .sampling import RngState, sample_ginibre

THEOREM_THRESHOLD = 0.1


def jordan_block(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return np.eye(n, k=1, dtype=np.complex128)


def rank_one_q(n: int) -> np.ndarray:
    """Q u = (u|e_1) e_N: a single one in the bottom-left corner."""
    q = np.zeros((n, n), dtype=np.complex128)
    q[n - 1, 0] = 1.0
    return q


@dataclass(frozen=True)
class PerturbationSpec:
    n: int
    delta: float
    kind: Literal["gaussian", "rank_one"] = "gaussian"
    master_seed: int = 0
    trial_index: int = 0
    c1: float = 2.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.kind not in ("gaussian", "rank_one"):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if self.c1 <= 0:
            raise ValueError("c1 must be positive")

    @property
    def rng(self):
        return RngState(self.master_seed, self.trial_index)


@dataclass(frozen=True)
class PerturbedOperator:
    spec: PerturbationSpec
    q: np.ndarray
    a_delta: np.ndarray
    accepted: bool

    @property
    def q_norm(self):
        return hs_norm(self.q)


def build(spec: PerturbationSpec) -> PerturbedOperator:
    if spec.kind == "gaussian":
        q = sample_ginibre(spec.n, spec.rng)
    else:
        q = rank_one_q(spec.n)
    a = jordan_block(spec.n) + spec.delta * q
    accepted = hs_norm(q) <= spec.c1 * spec.n
    return PerturbedOperator(spec=spec, q=q, a_delta=a, accepted=bool(accepted))


def rank_one_oracle_eigenvalues(n: int, delta: float) -> np.ndarray:
    """delta^(1/n) e^(2 pi i k/n), k = 0..n-1."""
    if n < 1 or delta <= 0:
        raise ValueError("need n >= 1 and delta > 0")
    k = np.arange(n)
    return delta ** (1.0 / n) * np.exp(2j * np.pi * k / n)


@dataclass(frozen=True)
class RegimeReport:
    neumann_ok: bool
    theorem_ok: bool
    error_term: float
    neumann_param: float


def error_term(n, delta, r):
    """r^(N-1) N (1-r)^2 / delta + delta N^3."""
    return r ** (n - 1) * n * (1.0 - r) ** 2 / delta + delta * n ** 3


def regime_report(n, delta, q_norm, z_modulus) -> RegimeReport:
    if not 0.0 <= z_modulus < 1.0:
        raise ValueError(f"|z| must lie in [0, 1), got {z_modulus}")
    param = delta * q_norm * big_g(n, z_modulus)
    err = error_term(n, delta, z_modulus)
    return RegimeReport(neumann_ok=param < 0.5, theorem_ok=err < THEOREM_THRESHOLD,
                        error_term=err, neumann_param=param)


def regime_flags(spec: PerturbationSpec, z_modulus: float,
                 q_norm: Optional[float] = None) -> RegimeReport:
    """Neumann-series and theorem-regime flags at radius ``z_modulus``.

    Without an explicit ``q_norm`` the acceptance bound c1*n on ||Q||_HS is used,
    which is what every accepted sample satisfies.
    """
    if q_norm is None:
        q_norm = spec.c1 * spec.n
    return regime_report(spec.n, spec.delta, q_norm, z_modulus)


def rotation_conjugate(q: np.ndarray, theta: float) -> np.ndarray:
    """e^(i theta) D Q D^-1 with D = diag(e^(i theta j)).

    With this Q', e^(i theta) D A_delta D^-1 = A0 + delta Q', so the spectrum
    of A0 + delta Q' is the spectrum of A_delta rotated by theta.
    """
    n = q.shape[0]
    d = np.exp(1j * theta * np.arange(1, n + 1))
    return np.exp(1j * theta) * (d[:, None] * q / d[None, :])
