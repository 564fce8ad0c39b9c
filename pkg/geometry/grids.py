# geometry/grids.py
"""
Uniform periodic grids on [-L, L)^2 and their circulant stencils.

A field is stored as an n x n array u[i, j] = u(x_i, y_j) and flattened
row-major for the flows, so the x-direction acts on the first index:

    D_x = kron(D1, I),   D_y = kron(I, D1)

and grid transposition (u(x, y) -> u(y, x)) swaps D_x with D_y exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .errors import ShapeError
from .flows import InvolutiveStateMap


@dataclass(frozen=True, eq=False)
class GridState:
    n: int
    L: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.n, self.n):
            raise ShapeError(f"grid values must be {self.n}x{self.n}, got {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def spacing(self) -> float:
        return grid_spacing(self.n, self.L)

    @classmethod
    def from_function(cls, n: int, L: float, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "GridState":
        x = grid_points(n, L)
        xx, yy = np.meshgrid(x, x, indexing="ij")
        return cls(n=n, L=L, values=fn(xx, yy))

    @classmethod
    def from_vector(cls, n: int, L: float, v) -> "GridState":
        return cls(n=n, L=L, values=np.asarray(v, dtype=np.float64).reshape(n, n))

    def flat(self) -> np.ndarray:
        return self.values.ravel().copy()

    def transposed(self) -> "GridState":
        return GridState(n=self.n, L=self.L, values=self.values.T.copy())

    def symmetry_error(self) -> float:
        return float(np.max(np.abs(self.values - self.values.T)))


def grid_spacing(n: int, L: float) -> float:
    return 2.0 * L / n


def grid_points(n: int, L: float) -> np.ndarray:
    return -L + grid_spacing(n, L) * np.arange(n)


# ----------------------------
# Circulant stencils
# ----------------------------

def _circulant(n: int, coeffs: dict) -> sp.csr_matrix:
    """Sparse circulant with `coeffs` = {offset: value}, offsets in {-1, 0, 1}."""
    if n < 3:
        raise ShapeError(f"periodic stencils need n >= 3, got {n}")
    diagonals, offsets = [], []
    for off, val in coeffs.items():
        if val == 0.0:
            continue
        diagonals.append(np.full(n - abs(off), val))
        offsets.append(off)
        if off != 0:
            wrap = -np.sign(off) * (n - 1)
            diagonals.append(np.full(1, val))
            offsets.append(int(wrap))
    return sp.diags(diagonals, offsets, shape=(n, n), format="csr")


def periodic_first_derivative(n: int, delta: float) -> sp.csr_matrix:
    """Central [-1, 0, 1] / (2 delta)."""
    return _circulant(n, {-1: -1.0, 1: 1.0}) / (2.0 * delta)


def periodic_second_derivative(n: int, delta: float) -> sp.csr_matrix:
    """[1, -2, 1] / delta^2; rows sum to zero."""
    return _circulant(n, {-1: 1.0, 0: -2.0, 1: 1.0}) / (delta * delta)


def directional(op: sp.spmatrix, n: int, axis: str) -> sp.csr_matrix:
    eye = sp.identity(n, format="csr")
    if axis == "x":
        return sp.kron(op, eye, format="csr")
    if axis == "y":
        return sp.kron(eye, op, format="csr")
    raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")


def transpose_map(n: int) -> InvolutiveStateMap:
    return InvolutiveStateMap(apply=lambda v: np.asarray(v).reshape(n, n).T.ravel().copy(), name="transpose")


def field_symmetry_error(v, n: int) -> float:
    u = np.asarray(v).reshape(n, n)
    return float(np.max(np.abs(u - u.T)))
