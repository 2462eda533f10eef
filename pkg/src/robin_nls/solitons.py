"""
Stationary solitons and reflectionless Riemann-Hilbert problems.

Pure soliton data (r = 0) turn the RH problem into a finite linear system:
with C_j = c_j e^{2i theta(xi_j)} and D_j = lam conj(C_j) the ansatz

    [m]_1(k) = e1 + sum_j C_j P_j / (k - xi_j),  P_j = [m(xi_j)]_2
    [m]_2(k) = e2 + sum_l D_l Q_l / (k - conj xi_l),  Q_l = [m(conj xi_l)]_1

closes on the 2M unknown 2-vectors P_j, Q_l.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import FrozenSet, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import DomainError, PoleEvaluation, SingularSystem, SingularW, ValidationFailure
from .scattering import theta

logger = logging.getLogger("robin_solitons")


class SolitonParams(BaseModel):
    """Stationary one-soliton parameters (lambda, omega, phi or alpha)"""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: int = Field(alias="lambda")
    omega: float = Field(gt=0)
    phi: Optional[float] = None
    alpha: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _check_family(self):
        if self.lam not in (1, -1):
            raise ValueError("lambda must be +1 or -1")
        if self.lam == -1 and (self.phi is None or self.alpha is not None):
            raise ValueError("focusing solitons are parametrised by phi")
        if self.lam == 1 and (self.alpha is None or self.phi is not None):
            raise ValueError("defocusing solitons are parametrised by alpha")
        return self

    @property
    def sqrt_omega(self) -> float:
        return float(np.sqrt(self.omega))

    @property
    def q_s(self) -> float:
        if self.lam == -1:
            return self.sqrt_omega * float(np.tanh(self.phi))
        return float(np.sqrt(self.alpha ** 2 + self.omega))

    @property
    def rho1(self) -> float:
        return 0.5 * self.sqrt_omega

    @property
    def xi1(self) -> complex:
        return 1j * self.rho1

    @property
    def c1(self) -> complex:
        s = self.sqrt_omega
        if self.lam == -1:
            return -1j * s * np.exp(-self.phi)
        return 1j * self.alpha * s / (self.q_s + s)

    @property
    def boundary_value(self) -> float:
        """u_s0(0)"""
        if self.lam == -1:
            return self.sqrt_omega / float(np.cosh(self.phi))
        return float(self.alpha)

    @property
    def singular_point(self) -> Optional[float]:
        """Negative x where the defocusing closed form blows up."""
        if self.lam == -1:
            return None
        s = self.sqrt_omega
        return -float(np.log((s + self.q_s) / self.alpha)) / s

    def data(self) -> "ReflectionlessData":
        return ReflectionlessData(xi=(self.xi1,), c=(self.c1,), lam=self.lam)


def _sech(z):
    z = np.abs(z)
    e = np.exp(-z)
    return 2.0 * e / (1.0 + e * e)


def soliton_profile(params: SolitonParams, x):
    """u_s0(x) for any real x (the defocusing form is singular at params.singular_point)."""
    x = np.asarray(x, dtype=float)
    s = params.sqrt_omega
    if params.lam == -1:
        return s * _sech(s * x + params.phi)

    x_sing = params.singular_point
    if np.any(np.abs(x - x_sing) < 1e-9):
        raise DomainError(f"defocusing soliton is singular at x = {x_sing:.12g}")
    alpha, q = params.alpha, params.q_s
    decay = np.exp(-s * x)
    numerator = 2.0 * alpha * s * (q + s) * decay
    denominator = alpha ** 2 * (1.0 - decay * decay) + 2.0 * s * (q + s)
    return numerator / denominator


def stationary_soliton(params: SolitonParams, x, t):
    """u_s(x, t) = e^{i omega t} u_s0(x) on x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("the stationary soliton is evaluated on x >= 0 only")
    return np.exp(1j * params.omega * t) * soliton_profile(params, x)


def soliton_spectral_functions(params: SolitonParams, k):
    """
    Closed-form a_s, b_s and Delta_s of the stationary soliton.

    Returns:
        (a_s, b_s, Delta_s) evaluated at k.
    """
    k = np.asarray(k, dtype=complex)
    s = params.sqrt_omega
    q = params.q_s
    a = (2 * k + 1j * q) / (2 * k + 1j * s)
    b = -1j * np.sqrt(params.lam * (q * q - s * s)) / (2 * k + 1j * s)
    delta = (k - 1j * params.rho1) * (2 * k + 1j * q) / (k + 1j * params.rho1)
    return a, b, delta


def one_soliton_m(params: SolitonParams, x: float, t: float, k: complex, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Closed-form solution m_s(x, t, k) of the one-soliton RH problem."""
    rho = params.rho1
    xi = params.xi1
    if abs(k - xi) < tol.pole_tol or abs(k - np.conj(xi)) < tol.pole_tol:
        raise PoleEvaluation(f"k = {k} sits on a pole of the one-soliton solution")
    lam = params.lam
    c = params.c1
    weight = np.exp(-4 * rho * x)
    denominator = 4 * rho ** 2 - lam * abs(c) ** 2 * weight

    m11 = 1 + lam * abs(c) ** 2 * weight * (np.conj(xi) - xi) / ((k - xi) * denominator)
    m12 = 4 * lam * rho ** 2 * np.conj(c) * np.exp(-2 * rho * x + 4j * rho ** 2 * t) / ((k + 1j * rho) * denominator)
    m21 = c * np.exp(2j * theta(x, t, xi)) / (k - xi) * 4 * rho ** 2 / denominator
    m22 = 1 + 2j * lam * rho * abs(c) ** 2 * weight / ((k + 1j * rho) * denominator)
    return np.array([[m11, m12], [m21, m22]], dtype=complex)


# ============================================================================
# REFLECTIONLESS RH PROBLEM
# ============================================================================

@dataclass(frozen=True)
class ReflectionlessData:
    """Pole data sigma_d = {(xi_j, c_j)}"""
    xi: Tuple[complex, ...]
    c: Tuple[complex, ...]
    lam: int

    def __post_init__(self):
        xi = tuple(complex(z) for z in self.xi)
        c = tuple(complex(z) for z in self.c)
        if len(xi) != len(c):
            raise ValidationFailure("each pole needs exactly one residue constant")
        if self.lam not in (1, -1):
            raise ValidationFailure("lambda must be +1 or -1")
        if any(z.imag <= 0 for z in xi):
            raise ValidationFailure("poles must lie in the open upper half-plane")
        if any(z == 0 for z in c):
            raise ValidationFailure("residue constants must be nonzero")
        for i in range(len(xi)):
            for j in range(i):
                if xi[i] == xi[j]:
                    raise ValidationFailure(f"duplicate pole {xi[i]}")
        if self.lam == 1 and len(xi) > 1:
            logger.warning("defocusing data with several poles: solvability is checked at runtime only")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "c", c)

    @property
    def M(self) -> int:
        return len(self.xi)


@dataclass(frozen=True, eq=False)
class ReflectionlessSolution:
    data: ReflectionlessData
    x: float
    t: float
    C: np.ndarray
    D: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    tol: Tolerances = DEFAULT_TOLERANCES

    @classmethod
    def solve(cls, data: ReflectionlessData, x: float, t: float, tol: Tolerances = DEFAULT_TOLERANCES):
        M = data.M
        xi = np.array(data.xi, dtype=complex)
        C = np.array(data.c, dtype=complex) * np.exp(2j * theta(x, t, xi))
        D = data.lam * np.conj(C)
        if M == 0:
            empty = np.zeros((0, 2), dtype=complex)
            return cls(data, x, t, C, D, empty, empty, tol)

        xi_bar = np.conj(xi)
        A = np.eye(2 * M, dtype=complex)
        A[:M, M:] = -D[None, :] / (xi[:, None] - xi_bar[None, :])
        A[M:, :M] = -C[None, :] / (xi_bar[:, None] - xi[None, :])
        rhs = np.zeros((2 * M, 2), dtype=complex)
        rhs[:M, 1] = 1.0
        rhs[M:, 0] = 1.0

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LinAlgWarning)
            lu, piv = lu_factor(A)
        pivots = np.abs(np.diag(lu))
        if pivots.min() <= tol.singular_tol * max(1.0, pivots.max()):
            raise SingularSystem(
                f"reflectionless system is singular at x = {x:g}, t = {t:g} (min pivot {pivots.min():.3e})"
            )
        X = lu_solve((lu, piv), rhs)
        return cls(data, x, t, C, D, X[:M], X[M:], tol)

    @property
    def u(self) -> complex:
        """u = 2i lim k m_12."""
        if self.data.M == 0:
            return 0j
        return complex(2j * np.sum(self.D * self.Q[:, 0]))

    def m(self, k: complex) -> np.ndarray:
        """m(x, t, k); the regular column is read from the stored pole values near a pole."""
        k = complex(k)
        xi = np.array(self.data.xi, dtype=complex)
        xi_bar = np.conj(xi)
        gap = np.abs(k - xi)
        gap_bar = np.abs(k - xi_bar)
        if self.data.M and min(gap.min(), gap_bar.min()) < self.tol.pole_tol:
            raise PoleEvaluation(f"k = {k} sits on a pole")

        col1 = np.array([1.0, 0.0], dtype=complex) + (self.C / (k - xi)) @ self.P
        col2 = np.array([0.0, 1.0], dtype=complex) + (self.D / (k - xi_bar)) @ self.Q
        if self.data.M:
            j = int(np.argmin(gap))
            if gap[j] < self.tol.pole_proximity:
                col2 = self.P[j].copy()
            l = int(np.argmin(gap_bar))
            if gap_bar[l] < self.tol.pole_proximity:
                col1 = self.Q[l].copy()
        return np.column_stack([col1, col2])

    def residue_defect(self, j: int, k: complex) -> float:
        """| (k - xi_j) [m]_1(k) - C_j [m(xi_j)]_2 |, which vanishes like |k - xi_j|."""
        col1 = self.m(k)[:, 0]
        return float(np.linalg.norm((k - self.data.xi[j]) * col1 - self.C[j] * self.P[j]))


def solve_reflectionless(
    data: ReflectionlessData,
    x: float,
    t: float,
    ks: Sequence[complex] = (),
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Tuple[np.ndarray, complex]:
    """
    Solve the reflectionless RH problem.

    Args:
        data: Pole data
        x, t: Space-time point
        ks: Spectral parameters at which m is returned

    Returns:
        (m values with shape (len(ks), 2, 2), u_sol)
    """
    solution = ReflectionlessSolution.solve(data, x, t, tol)
    values = np.array([solution.m(k) for k in ks], dtype=complex).reshape(len(ks), 2, 2)
    return values, solution.u


@dataclass(frozen=True)
class RenormalizedBox:
    """Indices (0-based) of the poles moved across by a_box"""
    box: FrozenSet[int] = frozenset()

    def a_box(self, k, xi: Sequence[complex]):
        value = np.ones_like(np.asarray(k, dtype=complex))
        for j in self.box:
            value = value * (k - xi[j]) / (k - np.conj(xi[j]))
        return value


def solve_renormalized(
    data: ReflectionlessData,
    box: RenormalizedBox,
    x: float,
    t: float,
    k_eval: complex,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """m_box = m_sol a_box^{sigma_3} at k_eval."""
    if any(j < 0 or j >= data.M for j in box.box):
        raise ValidationFailure(f"box {sorted(box.box)} does not index {data.M} poles")
    m = ReflectionlessSolution.solve(data, x, t, tol).m(k_eval)
    a = complex(box.a_box(k_eval, data.xi))
    return m @ np.diag([a, 1.0 / a])


# ============================================================================
# DARBOUX DRESSING
# ============================================================================

@dataclass(frozen=True, eq=False)
class DressingState:
    xi1: complex
    lam: int
    d1: complex
    W1: np.ndarray
    B1: np.ndarray

    @property
    def u_shift(self) -> complex:
        return complex(2j * self.B1[0, 1])

    def algebraic_residual(self, m_reg_xi: np.ndarray, m_reg_xi_bar: np.ndarray) -> float:
        first = (self.xi1 * np.eye(2) + self.B1) @ m_reg_xi @ np.array([1.0, -self.d1])
        second = (np.conj(self.xi1) * np.eye(2) + self.B1) @ m_reg_xi_bar @ np.array([-self.lam * np.conj(self.d1), 1.0])
        return float(max(np.linalg.norm(first), np.linalg.norm(second)))


def shift_from_w(W1: np.ndarray, xi1: complex, lam: int) -> complex:
    """2i (B1)_12 in terms of the entries of W1 for symmetric regular data."""
    return 4j * xi1 * W1[0, 0] * W1[0, 1] / (abs(W1[0, 0]) ** 2 - lam * abs(W1[0, 1]) ** 2)


def darboux_dress(
    xi1: complex,
    c1: complex,
    m_reg_xi: np.ndarray,
    m_reg_xi_bar: np.ndarray,
    x: float,
    t: float,
    lam: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> DressingState:
    """
    Add the pole pair (xi1, conj xi1) to a regular RH solution.

    Args:
        xi1, c1: Pole on the positive imaginary axis and its residue constant
        m_reg_xi, m_reg_xi_bar: Regular solution at xi1 and conj(xi1), both unimodular

    Returns:
        DressingState with d1, W1 and B1 = -W1 diag(xi1, conj xi1) W1^{-1}.
    """
    xi1 = complex(xi1)
    if xi1.imag <= 0 or abs(xi1.real) > tol.loc_tol:
        raise ValidationFailure(f"Darboux pole must be on the positive imaginary axis, got {xi1}")
    if abs(c1) <= tol.singular_tol:
        raise ValidationFailure("residue constant must be nonzero")
    for name, m in (("m_reg(xi1)", m_reg_xi), ("m_reg(conj xi1)", m_reg_xi_bar)):
        if abs(np.linalg.det(m) - 1.0) > 1e-8:
            raise ValidationFailure(f"{name} is not unimodular")

    d1 = complex(c1 * np.exp(2j * theta(x, t, xi1)) / (xi1 - np.conj(xi1)))
    W1 = np.column_stack([
        m_reg_xi @ np.array([1.0, -d1]),
        m_reg_xi_bar @ np.array([-lam * np.conj(d1), 1.0]),
    ])
    det = np.linalg.det(W1)
    if abs(det) < tol.singular_tol:
        raise SingularW(f"|det W1| = {abs(det):.3e} at x = {x:g}, t = {t:g}")
    scaled = W1 @ np.diag([xi1, np.conj(xi1)])
    B1 = -np.linalg.solve(W1.T, scaled.T).T
    return DressingState(xi1=xi1, lam=lam, d1=d1, W1=W1, B1=B1)


# ============================================================================
# BOUNDARY DETERMINANT
# ============================================================================

def robin_beta(q: float, a_at: Optional[complex] = None, b_at: Optional[complex] = None, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """
    Branch of beta for the boundary determinant.

    Args:
        a_at: a(-iq/2), needed when q < 0
        b_at: b(iq/2), needed when q > 0
    """
    if q < 0:
        if a_at is None:
            raise ValidationFailure("a(-iq/2) is required when q < 0")
        return q / 2 if abs(a_at) > tol.singular_tol else -q / 2
    if b_at is None:
        raise ValidationFailure("b(iq/2) is required when q > 0")
    return q / 2 if abs(b_at) <= tol.singular_tol else -q / 2


def robin_determinant(data: ReflectionlessData, beta: float, t: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """|m_11(0, t, -i beta)|^2 - lam |m_21(0, t, -i beta)|^2 for the reflectionless solution."""
    m = ReflectionlessSolution.solve(data, 0.0, t, tol).m(-1j * beta)
    return float(abs(m[0, 0]) ** 2 - data.lam * abs(m[1, 0]) ** 2)
