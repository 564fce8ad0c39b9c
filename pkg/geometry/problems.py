# geometry/problems.py
"""
Linear test problems for the composition schemes, each with an exact solution.

    harmonic     q' = p, p' = -q;  R = diag(1, -1) reversing, S = -I symmetry
    linear-sym   y' = (A1 + A2) y with S A1 S = A2, S = swap
    so3          y' = (E2 - E3) y, A1 = E2, A2 = -E3, S = swap(e2, e3)
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from .errors import ConfigError
from .flows import Flow, Inversion, InvolutiveStateMap, VectorField, selfadjoint_inversion
from .matcore import Mat, expm, inv


@dataclass(frozen=True, eq=False)
class Problem:
    name: str
    A: Mat
    y0: np.ndarray
    base: Flow                       # order 1, not self-adjoint
    selfadjoint: Flow                # order 2, self-adjoint
    symmetry: InvolutiveStateMap
    reversing: Optional[InvolutiveStateMap] = None
    t_end: float = 1.0

    @property
    def vector_field(self) -> VectorField:
        a = self.A
        return lambda y: a @ y

    def exact(self, t: float, y0=None) -> np.ndarray:
        y = self.y0 if y0 is None else np.asarray(y0, dtype=np.float64)
        return expm(t * self.A) @ y


# ----------------------------
# Steppers
# ----------------------------

def forward_euler_flow(A: Mat, name: str = "forward-euler") -> Flow:
    eye = np.eye(A.shape[0])
    return Flow(
        stepper=lambda h, y: y + h * (A @ y),
        declared_order=1,
        inversion=Inversion.analytic(lambda h, y: np.linalg.solve(eye + h * A, y)),
        name=name,
    )


def cayley_flow(A: Mat, name: str = "cayley") -> Flow:
    """Implicit midpoint on a linear field: (I - hA/2)^-1 (I + hA/2)."""
    eye = np.eye(A.shape[0])

    def stepper(h, y):
        return np.linalg.solve(eye - 0.5 * h * A, y + 0.5 * h * (A @ y))

    return Flow(stepper=stepper, declared_order=2, inversion=selfadjoint_inversion(stepper), name=name)


def leapfrog_flow(name: str = "leapfrog") -> Flow:
    """Stormer-Verlet for q' = p, p' = -q (kick-drift-kick)."""

    def stepper(h, y):
        q, p = float(y[0]), float(y[1])
        p_half = p - 0.5 * h * q
        q_new = q + h * p_half
        return np.array([q_new, p_half - 0.5 * h * q_new])

    return Flow(stepper=stepper, declared_order=2, inversion=selfadjoint_inversion(stepper), name=name)


def lie_trotter_flow(A1: Mat, A2: Mat, name: str = "lie-trotter") -> Flow:
    """exp(h A2) exp(h A1): the A1 substep acts first."""
    return Flow(
        stepper=lambda h, y: expm(h * A2) @ (expm(h * A1) @ y),
        declared_order=1,
        inversion=Inversion.analytic(lambda h, y: expm(-h * A1) @ (expm(-h * A2) @ y)),
        name=name,
    )


def strang_flow(A1: Mat, A2: Mat, name: str = "strang") -> Flow:
    def stepper(h, y):
        half = expm(0.5 * h * A1)
        return half @ (expm(h * A2) @ (half @ y))

    return Flow(stepper=stepper, declared_order=2, inversion=selfadjoint_inversion(stepper), name=name)


# ----------------------------
# Problems
# ----------------------------

def harmonic_problem() -> Problem:
    A = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return Problem(
        name="harmonic",
        A=A,
        y0=np.array([1.0, 0.0]),
        base=forward_euler_flow(A),
        selfadjoint=leapfrog_flow(),
        symmetry=InvolutiveStateMap.from_matrix(-np.eye(2), name="S"),
        reversing=InvolutiveStateMap.from_matrix(np.diag([1.0, -1.0]), name="R"),
    )


def linear_sym_problem() -> Problem:
    A1 = np.array([[-1.0, 0.3], [0.0, 0.0]])
    A2 = np.array([[0.0, 0.0], [0.3, -1.0]])
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    return Problem(
        name="linear-sym",
        A=A1 + A2,
        y0=np.array([1.0, 0.25]),
        base=lie_trotter_flow(A1, A2),
        selfadjoint=strang_flow(A1, A2),
        symmetry=InvolutiveStateMap.from_matrix(swap, name="S"),
    )


def so3_generators() -> Dict[int, Mat]:
    return {
        1: np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]),
        2: np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]),
        3: np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
    }


def so3_problem() -> Problem:
    e = so3_generators()
    A1, A2 = e[2], -e[3]
    swap = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    return Problem(
        name="so3",
        A=A1 + A2,
        y0=np.array([0.3, 1.0, -0.2]),
        base=lie_trotter_flow(A1, A2),
        selfadjoint=strang_flow(A1, A2),
        symmetry=InvolutiveStateMap.from_matrix(swap, name="S"),
    )


PROBLEMS: Dict[str, Callable[[], Problem]] = {
    "harmonic": harmonic_problem,
    "linear-sym": linear_sym_problem,
    "so3": so3_problem,
}


def get_problem(name: str) -> Problem:
    try:
        return PROBLEMS[name]()
    except KeyError as exc:
        raise ConfigError(f"unknown problem {name!r}; known: {sorted(PROBLEMS)}") from exc


def linear_flow(M: Mat, order: int = 1, name: str = "linear") -> Flow:
    """y -> M y regardless of h."""
    return Flow(
        stepper=lambda h, y: M @ y,
        declared_order=order,
        inversion=Inversion.analytic(lambda h, y: inv(M) @ y),
        name=name,
    )
