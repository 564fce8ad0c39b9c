# geometry/flows.py
"""
One-step flows and the composition schemes built on involutive conjugations.

A Flow is an immutable wrapper around a pure stepper (h, y) -> y. Its
`period` counts the base steps one macro-step consumes (2^k for a level-k
Thue-Morse scheme, 1 otherwise); defect and error measurements are taken in
whole macro-steps only.

Conjugations come in two flavours, both exposing `conjugate(flow) -> Flow`:

  - InvolutiveStateMap T:  sigma(phi)_h = T o phi_h o T
  - TimeReversal:          sigma(phi)_h = phi_{-h}
                           (fixed points of phi -> sigma(phi^-1) are the
                           self-adjoint methods)

Thue-Morse patterns are written in application order: "01" applies phi first,
then sigma(phi).
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Protocol, Sequence, Tuple

import numpy as np
import scipy.optimize

from .errors import ConvergenceError, LadderError, PeriodError

logger = logging.getLogger(__name__)

State = np.ndarray
Stepper = Callable[[float, State], State]
VectorField = Callable[[State], State]

INVERT_TOL = 1e-12
INVERT_MAX_ITER = 50
ERROR_FLOOR = 1e-14
MIN_LADDER_POINTS = 4


def _vec(y) -> State:
    return np.asarray(y, dtype=np.float64)


def sup_norm(y) -> float:
    a = np.asarray(y)
    return float(np.max(np.abs(a))) if a.size else 0.0


# ----------------------------
# Flow + inversion strategies
# ----------------------------

class InversionKind(str, enum.Enum):
    ANALYTIC_INVERSE = "analytic-inverse"
    ANALYTIC_ADJOINT = "analytic-adjoint"
    NEWTON = "newton"


@dataclass(frozen=True)
class Inversion:
    """
    How to undo a step.

      analytic-inverse   `map(h, y1)` returns phi_h^-1(y1)
      analytic-adjoint   `map(h, y)` is the adjoint phi*_h = (phi_{-h})^-1, so
                         phi_h^-1 = phi*_{-h}
      newton             solve phi_h(y0) = y1 numerically
    """

    kind: InversionKind = InversionKind.NEWTON
    map: Optional[Stepper] = None
    tol: float = INVERT_TOL
    max_iter: int = INVERT_MAX_ITER

    @classmethod
    def analytic(cls, inverse: Stepper) -> "Inversion":
        return cls(kind=InversionKind.ANALYTIC_INVERSE, map=inverse)

    @classmethod
    def adjoint(cls, adjoint: Stepper) -> "Inversion":
        return cls(kind=InversionKind.ANALYTIC_ADJOINT, map=adjoint)

    @classmethod
    def newton(cls, tol: float = INVERT_TOL, max_iter: int = INVERT_MAX_ITER) -> "Inversion":
        return cls(kind=InversionKind.NEWTON, tol=tol, max_iter=max_iter)

    def mapped(self, wrap: Callable[[Stepper], Stepper]) -> "Inversion":
        if self.map is None:
            return self
        return replace(self, map=wrap(self.map))


@dataclass(frozen=True, eq=False)
class Flow:
    stepper: Stepper
    declared_order: int
    inversion: Inversion = field(default_factory=Inversion.newton)
    name: str = "flow"
    period: int = 1

    def step(self, h: float, y) -> State:
        return _vec(self.stepper(h, _vec(y)))

    def macro_steps(self, n_steps: int) -> int:
        if n_steps < 0 or n_steps % self.period:
            raise PeriodError(
                f"{self.name}: n_steps={n_steps} is not a multiple of the macro-step period {self.period}"
            )
        return n_steps // self.period

    def advance(self, y0, h: float, n_steps: int) -> State:
        """Run `n_steps` base steps (n_steps / period macro-steps) of size h."""
        y = _vec(y0)
        for _ in range(self.macro_steps(n_steps)):
            y = self.step(h, y)
        return y


def invert_step(flow: Flow, h: float, y1) -> State:
    """y0 with flow.stepper(h, y0) = y1."""
    y1 = _vec(y1)
    inv_ = flow.inversion
    if inv_.kind is InversionKind.ANALYTIC_INVERSE:
        return _vec(inv_.map(h, y1))
    if inv_.kind is InversionKind.ANALYTIC_ADJOINT:
        return _vec(inv_.map(-h, y1))

    shape = y1.shape

    def residual(z: np.ndarray) -> np.ndarray:
        return (flow.step(h, z.reshape(shape)) - y1).ravel()

    sol = scipy.optimize.root(
        residual,
        y1.ravel(),
        method="hybr",
        options={"xtol": inv_.tol * 1e-2, "maxfev": inv_.max_iter * (y1.size + 1)},
    )
    y0 = sol.x.reshape(shape)
    res = sup_norm(residual(sol.x))
    if not np.all(np.isfinite(y0)) or res > inv_.tol * max(1.0, sup_norm(y1)):
        raise ConvergenceError(f"{flow.name}: newton step inversion failed ({sol.message})", residual=res, iterations=int(sol.nfev))
    return y0


def inverse_flow(flow: Flow) -> Flow:
    return Flow(
        stepper=lambda h, y: invert_step(flow, h, y),
        declared_order=flow.declared_order,
        inversion=Inversion.analytic(flow.stepper),
        name=f"inverse({flow.name})",
        period=flow.period,
    )


def selfadjoint_inversion(flow_stepper: Stepper) -> Inversion:
    """Inversion for a self-adjoint stepper: phi_h^-1 = phi_{-h}."""
    return Inversion.adjoint(flow_stepper)


# ----------------------------
# Conjugations
# ----------------------------

class Conjugation(Protocol):
    name: str

    def conjugate(self, flow: Flow) -> Flow: ...


@dataclass(frozen=True, eq=False)
class InvolutiveStateMap:
    apply: Callable[[State], State]
    name: str = "T"

    def __call__(self, y) -> State:
        return _vec(self.apply(_vec(y)))

    @classmethod
    def from_matrix(cls, m, name: str = "T") -> "InvolutiveStateMap":
        mat = np.array(m, dtype=np.float64)
        return cls(apply=lambda y: mat @ y, name=name)

    @classmethod
    def identity(cls) -> "InvolutiveStateMap":
        return cls(apply=lambda y: np.array(y, copy=True), name="identity")

    def involution_defect(self, samples: Sequence) -> float:
        return max((sup_norm(self(self(y)) - _vec(y)) for y in samples), default=0.0)

    def conjugate(self, flow: Flow) -> Flow:
        return conjugate_flow(flow, self)


@dataclass(frozen=True)
class TimeReversal:
    name: str = "time-reversal"

    def conjugate(self, flow: Flow) -> Flow:
        return Flow(
            stepper=lambda h, y: flow.stepper(-h, y),
            declared_order=flow.declared_order,
            inversion=flow.inversion.mapped(lambda m: (lambda h, y: m(-h, y))),
            name=f"reversed({flow.name})",
            period=flow.period,
        )


def conjugate_flow(flow: Flow, T: InvolutiveStateMap) -> Flow:
    """stepper'(h, y) = T(stepper(h, T(y))); the inversion is conjugated alike."""

    def wrap(m: Stepper) -> Stepper:
        return lambda h, y: T(m(h, T(y)))

    return Flow(
        stepper=wrap(flow.stepper),
        declared_order=flow.declared_order,
        inversion=flow.inversion.mapped(wrap),
        name=f"{T.name}({flow.name})",
        period=flow.period,
    )


def compose_reversing_symmetries(R1: InvolutiveStateMap, R2: InvolutiveStateMap) -> InvolutiveStateMap:
    """R1 R2^-1 R1 (R2 is its own inverse)."""
    return InvolutiveStateMap(apply=lambda y: R1(R2(R1(y))), name=f"{R1.name}.{R2.name}")


def split_vector_field(F: VectorField, T: InvolutiveStateMap) -> Tuple[VectorField, VectorField]:
    """
    F = F_sym + F_rev with T a symmetry of F_sym and a reversing symmetry of
    F_rev: F_sym = (F + T F T) / 2, F_rev = (F - T F T) / 2.
    """

    def f_sym(y):
        y = _vec(y)
        return 0.5 * (_vec(F(y)) + T(F(T(y))))

    def f_rev(y):
        y = _vec(y)
        return 0.5 * (_vec(F(y)) - T(F(T(y))))

    return f_sym, f_rev


# ----------------------------
# Composition schemes
# ----------------------------

def scovel(flow: Flow, sigma: Conjugation) -> Flow:
    """psi_h = phi_{h/2} o sigma(phi^-1)_{h/2}; sigma(phi^-1) acts first."""
    back = sigma.conjugate(inverse_flow(flow))
    fwd_conj = sigma.conjugate(flow)

    def stepper(h: float, y: State) -> State:
        return flow.step(0.5 * h, back.step(0.5 * h, y))

    def inverse(h: float, y: State) -> State:
        return fwd_conj.step(0.5 * h, invert_step(flow, 0.5 * h, y))

    return Flow(
        stepper=stepper,
        declared_order=flow.declared_order,
        inversion=Inversion.analytic(inverse),
        name=f"scovel({flow.name})",
        period=flow.period,
    )


def thue_morse_pattern(k: int, conjugate: bool = False, reversed_order: bool = False) -> str:
    """
    Level k word in application order: t_{k+1} = t_k + ~t_k ("0", "01", "0110", ...).
    `reversed_order` builds t_{k+1} = ~t_k + t_k instead; `conjugate` starts from "1".
    """
    if k < 0:
        raise ValueError(f"Thue-Morse level must be >= 0, got {k}")
    word = "1" if conjugate else "0"
    flip = str.maketrans("01", "10")
    for _ in range(k):
        comp = word.translate(flip)
        word = comp + word if reversed_order else word + comp
    return word


def thue_morse(flow: Flow, sigma: Conjugation, k: int, conjugate: bool = False, reversed_order: bool = False) -> Flow:
    pattern = thue_morse_pattern(k, conjugate, reversed_order)
    base = flow
    mirrored = sigma.conjugate(flow)

    def stepper(h: float, y: State) -> State:
        for c in pattern:
            y = (mirrored if c == "1" else base).step(h, y)
        return y

    def inverse(h: float, y: State) -> State:
        for c in reversed(pattern):
            y = invert_step(mirrored if c == "1" else base, h, y)
        return y

    return Flow(
        stepper=stepper,
        declared_order=flow.declared_order,
        inversion=Inversion.analytic(inverse),
        name=f"tm{k}({flow.name})",
        period=flow.period * len(pattern),
    )


def _triple(first: Flow, middle: Flow, c_outer: float, c_mid: float) -> Tuple[Stepper, Stepper]:
    def stepper(h: float, y: State) -> State:
        y = first.step(c_outer * h, y)
        y = middle.step(c_mid * h, y)
        return first.step(c_outer * h, y)

    def inverse(h: float, y: State) -> State:
        y = invert_step(first, c_outer * h, y)
        y = invert_step(middle, c_mid * h, y)
        return invert_step(first, c_outer * h, y)

    return stepper, inverse


def yoshida_coefficients(p: int) -> Tuple[float, float]:
    """alpha = 1 / (2 - 2^(1/(2p+1))), beta = 1 - 2 alpha."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    alpha = 1.0 / (2.0 - 2.0 ** (1.0 / (2 * p + 1)))
    return alpha, 1.0 - 2.0 * alpha


def symmetrize_coefficients(p: int) -> Tuple[float, float]:
    """a = 1 / (2 + 2^(1/(2p+1))), b = 1 - 2a; all positive."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    a = 1.0 / (2.0 + 2.0 ** (1.0 / (2 * p + 1)))
    return a, 1.0 - 2.0 * a


def yoshida(flow: Flow, p: int) -> Flow:
    """phi_{alpha h} o phi_{beta h} o phi_{alpha h}; order 2p + 2 for a self-adjoint order-2p base."""
    alpha, beta = yoshida_coefficients(p)
    stepper, inverse = _triple(flow, flow, alpha, beta)
    return Flow(
        stepper=stepper,
        declared_order=max(flow.declared_order, 2 * p + 2),
        inversion=Inversion.analytic(inverse),
        name=f"yoshida{p}({flow.name})",
        period=flow.period,
    )


def symmetrize_selfadjoint(flow: Flow, T: Conjugation, p: int, iterations: int = 1) -> Flow:
    """
    phi^[j+1]_h = phi^[j]_{ah} o sigma(phi^[j])_{bh} o phi^[j]_{ah} with (a, b) from
    symmetrize_coefficients(p + j). Symmetry error order 2(p + k) after k
    iterations; the global order stays at the base order.
    """
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    current = flow
    for level in range(iterations):
        a, b = symmetrize_coefficients(p + level)
        stepper, inverse = _triple(current, T.conjugate(current), a, b)
        current = Flow(
            stepper=stepper,
            declared_order=flow.declared_order,
            inversion=Inversion.analytic(inverse),
            name=f"sym{p + level}({current.name})",
            period=flow.period,
        )
    return current


# ----------------------------
# Defects
# ----------------------------

def symmetry_defect(flow: Flow, T: InvolutiveStateMap, y0, h: float, n_steps: int, mode: str = "symmetry") -> float:
    """
    symmetry:   |T(Phi(T y0)) - Phi(y0)|_inf
    reversing:  |T(Phi(T(Phi(y0)))) - y0|_inf
    with Phi = n_steps base steps of the flow (whole macro-steps only).
    """
    y0 = _vec(y0)
    flow.macro_steps(n_steps)
    if mode == "symmetry":
        return sup_norm(T(flow.advance(T(y0), h, n_steps)) - flow.advance(y0, h, n_steps))
    if mode == "reversing":
        return sup_norm(T(flow.advance(T(flow.advance(y0, h, n_steps)), h, n_steps)) - y0)
    raise ValueError(f"mode must be 'symmetry' or 'reversing', got {mode!r}")


def is_reversing_symmetry(flow: Flow, R: InvolutiveStateMap, y0, h: float, tol: float = 1e-11) -> bool:
    return symmetry_defect(flow, R, y0, h, flow.period, mode="reversing") <= tol


def selfadjoint_defect(flow: Flow, y, h: float) -> float:
    """|phi_{-h}(phi_h(y)) - y|_inf; zero for self-adjoint methods."""
    y = _vec(y)
    return sup_norm(flow.step(-h, flow.step(h, y)) - y)


def is_selfadjoint(flow: Flow, y, h: float, tol: float = 1e-11) -> bool:
    return selfadjoint_defect(flow, y, h) <= tol


# ----------------------------
# Order estimation
# ----------------------------

@dataclass(frozen=True)
class OrderEstimate:
    slope: float
    intercept: float
    residual: float
    ladder: Tuple[Tuple[float, float], ...]

    def within(self, expected: float, band: float) -> bool:
        return abs(self.slope - expected) <= band


def linear_slope(points: Sequence[Tuple[float, float]]) -> Optional[Tuple[float, float]]:
    """
    Simple least-squares line through (x, y) points.
    Returns (slope, intercept), or None when x has no spread.
    """
    if len(points) < 2:
        return None
    xs = np.array([p[0] for p in points], dtype=np.float64)
    ys = np.array([p[1] for p in points], dtype=np.float64)
    x_mean = xs.mean()
    y_mean = ys.mean()
    denom = float(np.sum((xs - x_mean) ** 2))
    if denom == 0.0:
        return None
    slope = float(np.sum((xs - x_mean) * (ys - y_mean))) / denom
    return slope, float(y_mean - slope * x_mean)


def estimate_order(ladder: Sequence[Tuple[float, float]], floor: float = ERROR_FLOOR, min_points: int = MIN_LADDER_POINTS) -> OrderEstimate:
    """Slope of log(error) against log(h); points at or below `floor` are dropped."""
    usable = sorted(((float(h), float(e)) for h, e in ladder if math.isfinite(e) and e > floor), reverse=True)
    hs = [h for h, _ in usable]
    if len(usable) < min_points:
        raise LadderError(f"need at least {min_points} ladder points above {floor:g}, got {len(usable)}")
    if any(h <= 0.0 for h in hs) or len(set(hs)) != len(hs):
        raise LadderError("ladder steps must be positive and distinct")

    logs = [(math.log(h), math.log(e)) for h, e in usable]
    fit = linear_slope(logs)
    assert fit is not None
    slope, intercept = fit
    residual = max(abs(ly - (slope * lx + intercept)) for lx, ly in logs)
    logger.debug("order slope=%.3f residual=%.3e points=%d", slope, residual, len(usable))
    return OrderEstimate(slope=slope, intercept=intercept, residual=residual, ladder=tuple(usable))


def ladder_steps(hmax: float, rungs: int) -> List[float]:
    if rungs < 1 or hmax <= 0.0:
        raise LadderError(f"ladder needs hmax > 0 and rungs >= 1, got hmax={hmax} rungs={rungs}")
    return [hmax * 0.5**r for r in range(rungs)]


def steps_for(t_end: float, h: float, period: int = 1, rel_tol: float = 1e-9) -> int:
    """Number of base steps covering t_end; t_end must be a whole number of macro-steps."""
    n = int(round(t_end / h))
    if n <= 0 or abs(n * h - t_end) > rel_tol * max(1.0, abs(t_end)) or n % period:
        raise LadderError(f"t_end={t_end:g} is not a whole number of macro-steps ({period} x h={h:g})")
    return n
