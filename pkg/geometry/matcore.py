# geometry/matcore.py
"""
Dense matrix kernel.

Matrices are plain float64 numpy arrays ("Mat"); every public function checks
shape and finiteness on entry and returns a fresh array, never a view of its
input. Matrix functions come from scipy.linalg; this module adds the domain
checks the rest of the app relies on (principal branches only, explicit
errors naming the offending eigenvalue) and the Lie-algebra plumbing
(ad powers, Bernoulli numbers, dexp / dexpinv series).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Tuple

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .errors import Diverged, DomainError, ShapeError, SingularMatrixError

Mat = npt.NDArray[np.float64]

BERNOULLI_MAX_INDEX = 20

# Eigenvalues this close to the negative real axis count as on the cut.
_CUT_TOL = 1e-12

# Residual of A A^-1 - I above which the conditioning is checked.
_INV_RESIDUAL_TOL = 1e-8


# ----------------------------
# Construction + validation
# ----------------------------

def as_mat(a, *, square: bool = False, name: str = "matrix") -> Mat:
    """
    Coerce to a 2-D float64 array and enforce the Mat invariants:
    finite entries, and rows == cols when `square`.
    """
    m = np.array(a, dtype=np.float64, copy=True)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError(f"{name} has non-finite entries")
    if square and m.shape[0] != m.shape[1]:
        raise ShapeError(f"{name} must be square, got {m.shape[0]}x{m.shape[1]}")
    return m


def require_same_shape(a: Mat, b: Mat, what: str = "operands") -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{what} differ in shape: {a.shape} vs {b.shape}")


def fro(a) -> float:
    """Frobenius norm; every tolerance in the app is stated in it."""
    return float(np.linalg.norm(a, "fro")) if np.ndim(a) == 2 else float(np.linalg.norm(a))


# ----------------------------
# Matrix functions
# ----------------------------

def expm(A) -> Mat:
    """
    Principal matrix exponential (scipy's scaling-and-squaring Padé scheme).

    Overflow is reported as `Diverged`, never as inf/nan in the result.
    """
    a = as_mat(A, square=True, name="expm argument")
    with np.errstate(over="ignore", invalid="ignore"):
        out = scipy.linalg.expm(a)
    if not np.all(np.isfinite(out)):
        raise Diverged("matrix exponential overflowed", norm=fro(a))
    return np.asarray(out, dtype=np.float64)


def _check_principal_domain(a: Mat, op: str) -> None:
    eigs = np.linalg.eigvals(a)
    scale = max(1.0, float(np.max(np.abs(eigs))) if eigs.size else 1.0)
    for lam in eigs:
        if lam.real <= 0.0 and abs(lam.imag) <= _CUT_TOL * scale:
            raise DomainError(
                f"{op}: eigenvalue {complex(lam):.6g} lies on the closed negative real axis",
                eigenvalue=complex(lam),
            )


def _real_result(out, op: str) -> Mat:
    out = np.asarray(out)
    if np.iscomplexobj(out):
        imag = float(np.max(np.abs(out.imag))) if out.size else 0.0
        if imag > 1e-10 * max(1.0, float(np.max(np.abs(out.real)))):
            raise DomainError(f"{op}: principal value is not real (imag part {imag:.3e})")
        out = out.real
    if not np.all(np.isfinite(out)):
        raise DomainError(f"{op}: result has non-finite entries")
    return np.array(out, dtype=np.float64)


def logm(A) -> Mat:
    """
    Principal logarithm (inverse scaling and squaring: repeated square roots,
    then a Padé approximant of log(1 + x)).
    """
    a = as_mat(A, square=True, name="logm argument")
    _check_principal_domain(a, "logm")
    return _real_result(scipy.linalg.logm(a), "logm")


def sqrtm(A) -> Mat:
    """Principal square root (Schur method)."""
    a = as_mat(A, square=True, name="sqrtm argument")
    _check_principal_domain(a, "sqrtm")
    return _real_result(scipy.linalg.sqrtm(a), "sqrtm")


def inv(A) -> Mat:
    """Inverse by LU. cond() is only consulted when A A^-1 misses the identity."""
    a = as_mat(A, square=True, name="inverse argument")
    try:
        out = scipy.linalg.inv(a, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"matrix is singular: {exc}") from exc
    if not np.all(np.isfinite(out)):
        raise SingularMatrixError("matrix is numerically singular")
    if fro(a @ out - np.eye(a.shape[0])) > _INV_RESIDUAL_TOL and np.linalg.cond(a) > 1.0 / np.finfo(np.float64).eps:
        raise SingularMatrixError("matrix is numerically singular")
    return out


# ----------------------------
# Lie algebra plumbing
# ----------------------------

def commutator(A, B) -> Mat:
    a = np.asarray(A, dtype=np.float64)
    b = np.asarray(B, dtype=np.float64)
    require_same_shape(a, b, "commutator operands")
    return a @ b - b @ a


def ad_power(A, V, j: int) -> Mat:
    """ad_A^j(V) with ad_A(V) = AV - VA; j = 0 returns a copy of V."""
    a = as_mat(A, square=True, name="A")
    v = as_mat(V, square=True, name="V")
    require_same_shape(a, v, "ad_power operands")
    if j < 0:
        raise ValueError(f"ad power must be non-negative, got {j}")
    out = v
    for _ in range(j):
        out = a @ out - out @ a
    return out


@dataclass(frozen=True)
class BernoulliTable:
    """Exact Bernoulli numbers B_0..B_n with the B_1 = -1/2 convention."""

    values: Mapping[int, Fraction]

    def __getitem__(self, j: int) -> Fraction:
        return self.values[j]

    def __len__(self) -> int:
        return len(self.values)

    def as_float(self, j: int) -> float:
        return float(self.values[j])


@lru_cache(maxsize=None)
def bernoulli_table(n: int = BERNOULLI_MAX_INDEX) -> BernoulliTable:
    """
    B_0..B_n from sum_{k=0}^{m} C(m+1, k) B_k = 0 (m >= 1), in Fractions.
    """
    b = [Fraction(1)]
    for m in range(1, n + 1):
        acc = sum((math.comb(m + 1, k) * b[k] for k in range(m)), Fraction(0))
        b.append(-acc / (m + 1))
    return BernoulliTable(values={j: bj for j, bj in enumerate(b)})


def dexp_apply(A, V, order: int) -> Mat:
    """Forward series dexp_A(V) = sum_{j=0}^{order} ad_A^j(V) / (j+1)!."""
    a = as_mat(A, square=True, name="A")
    term = as_mat(V, square=True, name="V")
    require_same_shape(a, term, "dexp operands")
    out = term.copy()
    for j in range(1, order + 1):
        term = a @ term - term @ a
        out = out + term / math.factorial(j + 1)
    return out


# ----------------------------
# Classical polar oracle
# ----------------------------

def svd_polar(A) -> Tuple[Mat, Mat]:
    """
    A = s q with s spd and q orthogonal, from a singular value decomposition.
    """
    a = as_mat(A, square=True, name="svd_polar argument")
    sv = scipy.linalg.svdvals(a)
    if sv[-1] <= sv[0] * a.shape[0] * np.finfo(np.float64).eps:
        raise SingularMatrixError(f"svd_polar: matrix is singular (sigma_min={sv[-1]:.3e})")
    q, s = scipy.linalg.polar(a, side="left")
    s = 0.5 * (s + s.T)
    return np.asarray(s, dtype=np.float64), np.asarray(q, dtype=np.float64)
