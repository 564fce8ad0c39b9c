# geometry/involutions.py
"""
Involutive automorphisms sigma (group level) / d sigma (algebra level), the
splitting g = p + k they induce, the projectors of an involutive matrix and a
checker for the symmetric-space product axioms.

Built-in kinds:

    transpose-inverse   sigma(x) = x^-T,   d sigma(X) = -X^T
    conjugate           sigma(x) = conj(x), d sigma(X) = conj(X)
                        (on real 2n x 2n embeddings [[A, -B], [B, A]] of A + iB)
    inner(r)            sigma(x) = r x r,  d sigma(X) = r X r,   r^2 = I
"""
from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, NotInvolutiveError, ShapeError, SymspaceError
from .matcore import Mat, as_mat, commutator, expm, fro, inv, logm

logger = logging.getLogger(__name__)

INNER_TOL = 1e-14
PROJECTOR_TOL = 1e-12
AXIOM_TOL = 1e-10


class InvolutionKind(str, enum.Enum):
    TRANSPOSE_INVERSE = "transpose-inverse"
    CONJUGATE = "conjugate"
    INNER = "inner"


# ----------------------------
# Involutive matrices
# ----------------------------

def involution_defect(r) -> float:
    m = as_mat(r, square=True, name="r")
    return fro(m @ m - np.eye(m.shape[0]))


def reflection(n: int, axes: Sequence[int] = (0,)) -> Mat:
    """I - 2 sum e_i e_i^T over `axes`; axes=(0,) is the SO(n)/SO(n-1) choice."""
    r = np.eye(n)
    for i in axes:
        r[i, i] = -1.0
    return r


def anti_identity(n: int) -> Mat:
    """Exchange matrix [e_n, ..., e_1] (persymmetric / perskew-symmetric split)."""
    return np.fliplr(np.eye(n))


def complex_to_real(z) -> Mat:
    """A + iB  ->  [[A, -B], [B, A]]."""
    zz = np.asarray(z, dtype=np.complex128)
    a, b = zz.real, zz.imag
    return as_mat(np.block([[a, -b], [b, a]]))


def real_to_complex(m) -> np.ndarray:
    a = as_mat(m, square=True)
    n2 = a.shape[0]
    if n2 % 2:
        raise ShapeError(f"real embedding must have even size, got {n2}")
    n = n2 // 2
    return a[:n, :n] + 1j * a[n:, :n]


def _conjugation_matrix(n2: int) -> Mat:
    if n2 % 2:
        raise ShapeError(f"conjugate involution acts on even-sized real embeddings, got {n2}")
    n = n2 // 2
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)]))


# ----------------------------
# Involution
# ----------------------------

@dataclass(frozen=True, eq=False)
class Involution:
    kind: InvolutionKind
    r: Optional[Mat] = None

    @property
    def label(self) -> str:
        return self.kind.value

    def group_map(self, x) -> Mat:
        m = as_mat(x, square=True, name="group element")
        if self.kind is InvolutionKind.TRANSPOSE_INVERSE:
            return inv(m).T
        r = self._r_for(m)
        return r @ m @ r

    def algebra_map(self, X) -> Mat:
        m = as_mat(X, square=True, name="algebra element")
        if self.kind is InvolutionKind.TRANSPOSE_INVERSE:
            return -m.T
        r = self._r_for(m)
        return r @ m @ r

    def _r_for(self, m: Mat) -> Mat:
        if self.kind is InvolutionKind.CONJUGATE:
            return _conjugation_matrix(m.shape[0])
        assert self.r is not None
        if self.r.shape != m.shape:
            raise ShapeError(f"inner involution r is {self.r.shape}, element is {m.shape}")
        return self.r


def make_involution(kind: Union[InvolutionKind, str], r=None) -> Involution:
    k = InvolutionKind(kind)
    if k is InvolutionKind.INNER:
        if r is None:
            raise NotInvolutiveError("inner involution needs a matrix r with r^2 = I")
        rm = as_mat(r, square=True, name="r")
        defect = involution_defect(rm)
        if defect > INNER_TOL:
            raise NotInvolutiveError(f"r is not involutive: |r^2 - I|_F = {defect:.3e}")
        return Involution(kind=k, r=rm)
    return Involution(kind=k)


def parse_involution(spec: str) -> Involution:
    """
    CLI ids: "transpose-inverse", "conjugate", "inner:<path-to-r-matrix-file>".
    """
    from .matio import read_matrix

    raw = (spec or "").strip()
    if raw.startswith("inner:"):
        path = raw[len("inner:"):]
        if not path:
            raise DomainError("inner involution id needs a matrix file: inner:<path>")
        return make_involution(InvolutionKind.INNER, read_matrix(Path(path)))
    try:
        return make_involution(raw)
    except ValueError as exc:
        if isinstance(exc, SymspaceError):
            raise
        raise DomainError(
            f"unknown involution id {raw!r} (transpose-inverse | conjugate | inner:<file>)"
        ) from exc


# ----------------------------
# Splitting + projectors
# ----------------------------

@dataclass(frozen=True, eq=False)
class Splitting:
    P: Mat   # d sigma(P) = -P, Lie triple system part
    K: Mat   # d sigma(K) = K, subalgebra part
    source: Involution


def split(X, inv_: Involution) -> Splitting:
    x = as_mat(X, square=True, name="X")
    dx = inv_.algebra_map(x)
    return Splitting(P=0.5 * (x - dx), K=0.5 * (x + dx), source=inv_)


def p_residual(inv_: Involution, M) -> float:
    """|d sigma(M) + M|_F : zero iff M lies in p."""
    m = as_mat(M, square=True)
    return fro(inv_.algebra_map(m) + m)


def k_residual(inv_: Involution, M) -> float:
    m = as_mat(M, square=True)
    return fro(inv_.algebra_map(m) - m)


@dataclass(frozen=True, eq=False)
class ProjectorPair:
    plus: Mat
    minus: Mat


def projectors(S) -> ProjectorPair:
    s = as_mat(S, square=True, name="S")
    defect = involution_defect(s)
    if defect > PROJECTOR_TOL:
        raise NotInvolutiveError(f"S is not involutive: |S^2 - I|_F = {defect:.3e}")
    eye = np.eye(s.shape[0])
    return ProjectorPair(plus=0.5 * (eye + s), minus=0.5 * (eye - s))


def lift_group_automorphism(inv_: Involution, x) -> Mat:
    """sigma(x) = exp(d sigma(log x)); the logm domain error propagates."""
    return expm(inv_.algebra_map(logm(x)))


def grading_residuals(X, Y, inv_: Involution, Z=None) -> Dict[str, float]:
    """
    Z2-grading residuals of the splitting:

      kk   p-part of [K_X, K_Y]
      kp   k-part of [K_X, P_Y]
      pp   p-part of [P_X, P_Y]
      lts  k-part of [P_X, [P_Y, P_Z]]
    """
    sx, sy = split(X, inv_), split(Y, inv_)
    sz = split(np.asarray(X) @ np.asarray(Y) if Z is None else Z, inv_)
    kk = commutator(sx.K, sy.K)
    kp = commutator(sx.K, sy.P)
    pp = commutator(sx.P, sy.P)
    triple = commutator(sx.P, commutator(sy.P, sz.P))
    return {
        "kk": fro(split(kk, inv_).P),
        "kp": fro(split(kp, inv_).K),
        "pp": fro(split(pp, inv_).P),
        "lts": fro(split(triple, inv_).K),
    }


# ----------------------------
# Symmetric space products + axiom checker
# ----------------------------

def sandwich_product(x, y) -> Mat:
    """x . y = x y^-1 x, the product on G_sigma = {x : sigma(x) = x^-1}."""
    a = as_mat(x, square=True, name="x")
    b = as_mat(y, square=True, name="y")
    return a @ inv(b) @ a


def sphere_product(x, y) -> Mat:
    """x . y = (2 x x^T - I) y on unit vectors (reflection through x)."""
    a = as_mat(x, name="x")
    b = as_mat(y, name="y")
    return (2.0 * (a @ a.T) - np.eye(a.shape[0])) @ b


@dataclass
class AxiomReport:
    residuals: Dict[str, float] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)
    tol: float = AXIOM_TOL

    @property
    def passed(self) -> bool:
        return not self.failures and all(v <= self.tol for v in self.residuals.values())

    def summary(self) -> str:
        parts = [f"{k}={v:.3e}" for k, v in self.residuals.items()]
        if self.failures:
            parts.append(f"undefined={len(self.failures)}")
        return " ".join(parts)


def _rel(lhs: Mat, rhs: Mat) -> float:
    return fro(lhs - rhs) / max(1.0, fro(rhs))


def check_symmetric_space_axioms(
    product: Callable[[Mat, Mat], Mat],
    samples: Sequence,
    tol: float = AXIOM_TOL,
) -> AxiomReport:
    """
    Max relative residuals of
      (i)   x.x = x
      (ii)  x.(x.y) = y
      (iii) x.(y.z) = (x.y).(x.z)
    over the samples (all ordered pairs, cyclic consecutive triples).
    A product that fails on a sample is recorded, not raised.
    """
    xs = [np.asarray(s, dtype=np.float64) for s in samples]
    report = AxiomReport(residuals={"idempotent": 0.0, "left_inverse": 0.0, "distributive": 0.0}, tol=tol)

    def record(axiom: str, fn: Callable[[], Tuple[Mat, Mat]], where: str) -> None:
        try:
            with np.errstate(all="raise"):
                lhs, rhs = fn()
            value = _rel(lhs, rhs)
            if not np.isfinite(value):
                raise FloatingPointError("non-finite residual")
        except (SymspaceError, np.linalg.LinAlgError, FloatingPointError) as exc:
            report.failures.append(f"{axiom} {where}: {exc}")
            report.residuals[axiom] = float("inf")
            return
        report.residuals[axiom] = max(report.residuals[axiom], value)

    for i, x in enumerate(xs):
        record("idempotent", lambda x=x: (product(x, x), x), f"sample={i}")

    for (i, x), (j, y) in itertools.permutations(enumerate(xs), 2):
        record("left_inverse", lambda x=x, y=y: (product(x, product(x, y)), y), f"pair=({i},{j})")

    n = len(xs)
    if n >= 3:
        for i in range(n):
            x, y, z = xs[i], xs[(i + 1) % n], xs[(i + 2) % n]
            record(
                "distributive",
                lambda x=x, y=y, z=z: (product(x, product(y, z)), product(product(x, y), product(x, z))),
                f"triple={i}",
            )

    logger.debug("axioms %s passed=%s", report.summary(), report.passed)
    return report
