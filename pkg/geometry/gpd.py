# geometry/gpd.py
"""
Group-level generalized polar decomposition x = p k (sigma(p) = p^-1,
sigma(k) = k), the classical Newton polar iteration, analytic functions of
2-cyclic matrices and the polar-coordinates integrator for x' = X(t, x) x.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, DomainError, UnsupportedOrderError
from .involutions import Involution, projectors, split
from .matcore import Mat, ad_power, as_mat, bernoulli_table, commutator, expm, fro, inv, logm
from .series import DEXPINV_MAX_ORDER, GPD_MAX_ORDER, dexpinv_apply, gpd_series

logger = logging.getLogger(__name__)

GPD_WARN_NORM = 0.5
NEWTON_POLAR_TOL = 1e-13
NEWTON_POLAR_MAX_ITER = 50
POLAR_COORDS_TRUNC = 6
TWO_CYCLIC_TOL = 1e-12
PSI_TAYLOR_RADIUS = 1e-6
_PSI_TAYLOR_TERMS = 16


@dataclass(frozen=True, eq=False)
class PolarFactors:
    p_factor: Mat
    k_factor: Mat
    residual: float


@dataclass(frozen=True, eq=False)
class PolarCoordsState:
    t: float
    P: Mat
    K: Mat

    def group_element(self) -> Mat:
        return expm(self.P) @ expm(self.K)


# ----------------------------
# Generalized + classical polar
# ----------------------------

def generalized_polar(x, inv_: Involution, order: int = GPD_MAX_ORDER, warn_norm: float = GPD_WARN_NORM) -> PolarFactors:
    """x = exp(S) exp(Q) with (S, Q) = gpd_series(split(log x))."""
    xm = as_mat(x, square=True, name="x")
    X = logm(xm)
    size = fro(X)
    if size > warn_norm:
        logger.warning("polar log_norm=%.3e above %.2g, series truncation may dominate", size, warn_norm)

    parts = split(X, inv_)
    S, Q = gpd_series(parts.P, parts.K, order)
    p_factor = expm(S)
    k_factor = expm(Q)
    residual = fro(p_factor @ k_factor - xm)
    logger.debug("polar sigma=%s order=%d log_norm=%.3e residual=%.3e", inv_.label, order, size, residual)
    return PolarFactors(p_factor=p_factor, k_factor=k_factor, residual=residual)


def classical_polar(x, tol: float = NEWTON_POLAR_TOL, max_iter: int = NEWTON_POLAR_MAX_ITER) -> PolarFactors:
    """
    Newton iteration y <- (y + y^-T) / 2 from y = x. The limit is the
    orthogonal factor q; s = x q^T. Stops once the relative update is below
    `tol`.
    """
    xm = as_mat(x, square=True, name="x")
    y = xm
    change = float("inf")
    for it in range(1, max_iter + 1):
        y_next = 0.5 * (y + inv(y).T)
        change = fro(y_next - y) / max(fro(y_next), 1.0)
        y = y_next
        if change <= tol:
            s = xm @ y.T
            logger.debug("newton polar iterations=%d change=%.3e", it, change)
            return PolarFactors(p_factor=s, k_factor=y, residual=fro(s @ y - xm))
    raise ConvergenceError("newton polar iteration did not converge", residual=change, iterations=max_iter)


# ----------------------------
# Analytic functions of 2-cyclic matrices
# ----------------------------

def _phi1_block(m: Mat) -> Tuple[Mat, Mat]:
    """(exp(M), phi1(M)) from one exponential of the augmented [[M, I], [0, 0]]."""
    n = m.shape[0]
    aug = np.zeros((2 * n, 2 * n))
    aug[:n, :n] = m
    aug[:n, n:] = np.eye(n)
    e = expm(aug)
    return e[:n, :n], e[:n, n:]


def _companion(theta: Mat, sign: float) -> Mat:
    m = theta.shape[0]
    out = np.zeros((2 * m, 2 * m))
    out[:m, m:] = sign * theta
    out[m:, :m] = np.eye(m)
    return out


def _exp_blocks(theta: Mat) -> Tuple[Mat, Mat]:
    m = theta.shape[0]
    e, phi1 = _phi1_block(_companion(theta, 1.0))
    return e[m:, :m], phi1[m:, :m]


def _sin_blocks(theta: Mat) -> Tuple[Mat, Mat]:
    m = theta.shape[0]
    e = expm(_companion(theta, -1.0))
    return e[m:, :m], np.zeros((m, m))


def _cos_blocks(theta: Mat) -> Tuple[Mat, Mat]:
    m = theta.shape[0]
    _, phi1 = _phi1_block(_companion(theta, -1.0))
    return np.zeros((m, m)), -phi1[m:, :m]


def _cayley_blocks(theta: Mat) -> Tuple[Mat, Mat]:
    r = inv(np.eye(theta.shape[0]) - 0.25 * theta)
    return 0.5 * r, 0.25 * r


def _identity_blocks(theta: Mat) -> Tuple[Mat, Mat]:
    m = theta.shape[0]
    return np.eye(m), np.zeros((m, m))


@dataclass(frozen=True)
class AnalyticFunction:
    """
    psi with its scalar form, Taylor coefficients a_k (psi(z) = sum a_k z^k)
    and the block evaluator returning (psi1(Theta), psi2(Theta)).
    """

    name: str
    scalar: Callable[[complex], complex]
    taylor: Callable[[int], float]
    blocks: Callable[[Mat], Tuple[Mat, Mat]]

    def at_zero(self) -> float:
        return float(self.taylor(0))


def _exp_taylor(k: int) -> float:
    return 1.0 / math.factorial(k)


def _cos_taylor(k: int) -> float:
    return 0.0 if k % 2 else (-1.0) ** (k // 2) / math.factorial(k)


def _sin_taylor(k: int) -> float:
    return (-1.0) ** ((k - 1) // 2) / math.factorial(k) if k % 2 else 0.0


def _cayley_scalar(z: complex) -> complex:
    d = 1.0 - z / 2.0
    if d == 0:
        raise DomainError("cayley resolvent: pole at z = 2", eigenvalue=complex(z))
    return 1.0 / d


ANALYTIC_FUNCTIONS: Dict[str, AnalyticFunction] = {
    "exp": AnalyticFunction("exp", cmath.exp, _exp_taylor, _exp_blocks),
    "cos": AnalyticFunction("cos", cmath.cos, _cos_taylor, _cos_blocks),
    "sin": AnalyticFunction("sin", cmath.sin, _sin_taylor, _sin_blocks),
    "cayley": AnalyticFunction("cayley", _cayley_scalar, lambda k: 2.0 ** (-k), _cayley_blocks),
    "identity": AnalyticFunction("identity", lambda z: z, lambda k: 1.0 if k == 1 else 0.0, _identity_blocks),
}


def get_analytic_function(fn) -> AnalyticFunction:
    if isinstance(fn, AnalyticFunction):
        return fn
    try:
        return ANALYTIC_FUNCTIONS[str(fn)]
    except KeyError as exc:
        raise DomainError(f"unknown analytic function {fn!r}; known: {sorted(ANALYTIC_FUNCTIONS)}") from exc


def psi_scalar(fn, branch: str, s: float) -> float:
    """
    psi1(s) = (psi(r) - psi(-r)) / (2r),  psi2(s) = (psi(r) + psi(-r) - 2 psi(0)) / (2s),
    r = sqrt(s). Near s = 0 the removable singularity is handled with the odd /
    even parts of the Taylor series.
    """
    f = get_analytic_function(fn)
    if branch not in ("psi1", "psi2"):
        raise ValueError(f"branch must be 'psi1' or 'psi2', got {branch!r}")

    if abs(s) < PSI_TAYLOR_RADIUS:
        first = 1 if branch == "psi1" else 2
        total = 0.0
        for m in range(_PSI_TAYLOR_TERMS):
            total += f.taylor(first + 2 * m) * s**m
        return float(total)

    r = cmath.sqrt(s)
    hi, lo = f.scalar(r), f.scalar(-r)
    if branch == "psi1":
        value = (hi - lo) / (2.0 * r)
    else:
        value = (hi + lo - 2.0 * f.scalar(0.0)) / (2.0 * s)
    return float(complex(value).real)


def analytic_fn_2cyclic(P, S, fn) -> Mat:
    """
    psi(P) = psi(0) I + Psi1 P + P Psi1 + P Psi2 P + Psi2 Theta,   Theta = P^2 Pi-.

    Psi_i = V psi_i(V^T P^2 V) V^T Pi- with V an orthonormal basis of range(Pi-),
    i.e. psi_i(Theta) restricted to the minus block and zero on the plus block.
    """
    f = get_analytic_function(fn)
    p = as_mat(P, square=True, name="P")
    s = as_mat(S, square=True, name="S")
    pair = projectors(s)
    defect = fro(s @ p @ s + p)
    if defect > TWO_CYCLIC_TOL * max(1.0, fro(p)):
        raise DomainError(f"P is not 2-cyclic for S: |SPS + P|_F = {defect:.3e}")

    n = p.shape[0]
    out = f.at_zero() * np.eye(n)
    basis = scipy.linalg.orth(pair.minus)
    if basis.shape[1] == 0:
        return out

    p2 = p @ p
    theta = p2 @ pair.minus
    psi1_m, psi2_m = f.blocks(basis.T @ p2 @ basis)
    lift = basis.T @ pair.minus
    psi1 = basis @ psi1_m @ lift
    psi2 = basis @ psi2_m @ lift
    return out + psi1 @ p + p @ psi1 + p @ psi2 @ p + psi2 @ theta


# ----------------------------
# Polar coordinates integrator
# ----------------------------

def _polar_coords_rhs(P: Mat, K: Mat, X: Mat, inv_: Involution, coeffs: List[float], trunc: int) -> Tuple[Mat, Mat]:
    parts = split(X, inv_)
    xm, xp = parts.P, parts.K

    p_dot = xm - commutator(P, xp)
    k_arg = xp.copy()
    for j, c in enumerate(coeffs, start=1):
        p_dot = p_dot + (4.0**j) * c * ad_power(P, xm, 2 * j)
        k_arg = k_arg - 2.0 * (4.0**j - 1.0) * c * ad_power(P, xm, 2 * j - 1)
    return p_dot, dexpinv_apply(K, k_arg, trunc)


def polar_coords_integrate(
    Xfun: Callable[[float], Mat],
    inv_: Involution,
    t_end: float,
    h: float,
    trunc: int = POLAR_COORDS_TRUNC,
) -> List[PolarCoordsState]:
    """
    Integrate x' = X(t) x in coordinates x = exp(P) exp(K), P in p, K in k,
    from x(0) = I with classical RK4. c_{2j} = B_{2j}/(2j)! for j <= trunc // 2,
    and dexpinv on the K equation is cut at the same order.
    Returns the state at t = 0 and after every step; the last step lands on t_end.
    """
    if h <= 0.0 or t_end < 0.0:
        raise ValueError(f"need h > 0 and t_end >= 0, got h={h} t_end={t_end}")
    if not 1 <= trunc <= DEXPINV_MAX_ORDER:
        raise UnsupportedOrderError(f"polar coordinates: trunc must lie in 1..{DEXPINV_MAX_ORDER}, got {trunc}")
    table = bernoulli_table()
    coeffs = [table.as_float(2 * j) / math.factorial(2 * j) for j in range(1, trunc // 2 + 1)]

    n0 = as_mat(Xfun(0.0), square=True, name="X(0)").shape[0]
    P = np.zeros((n0, n0))
    K = np.zeros((n0, n0))
    steps = max(1, int(round(t_end / h))) if t_end > 0.0 else 0
    dt = t_end / steps if steps else 0.0

    def rhs(t: float, P_: Mat, K_: Mat) -> Tuple[Mat, Mat]:
        return _polar_coords_rhs(P_, K_, as_mat(Xfun(t), square=True, name="X(t)"), inv_, coeffs, trunc)

    out = [PolarCoordsState(t=0.0, P=P, K=K)]
    for i in range(steps):
        t = i * dt
        k1p, k1k = rhs(t, P, K)
        k2p, k2k = rhs(t + 0.5 * dt, P + 0.5 * dt * k1p, K + 0.5 * dt * k1k)
        k3p, k3k = rhs(t + 0.5 * dt, P + 0.5 * dt * k2p, K + 0.5 * dt * k2k)
        k4p, k4k = rhs(t + dt, P + dt * k3p, K + dt * k3k)
        P = P + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        K = K + (dt / 6.0) * (k1k + 2.0 * k2k + 2.0 * k3k + k4k)
        out.append(PolarCoordsState(t=(i + 1) * dt, P=P, K=K))
    return out
