# geometry/series.py
"""
Truncated non-commutative series.

    sym_bch          log(e^X e^Y e^X), degrees 1 and 3
    gpd_series       (S, Q) with e^S e^Q = e^(P + K), degrees 1..4
    dexpinv_apply    sum_j B_j / j! ad_A^j (V), j <= 8

Commutator terms are evaluated left to right exactly as written below, with no
re-association, so results are bit-reproducible across runs.

Degree-5 terms are deliberately absent from gpd_series: the published list has
one term without a coefficient. `fit_degree5_coefficient` estimates it
numerically as a diagnostic; its output never feeds the series.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import UnsupportedOrderError
from .matcore import Mat, as_mat, bernoulli_table, commutator as br, expm, fro, logm, require_same_shape, svd_polar

logger = logging.getLogger(__name__)

SYM_BCH_ORDERS = (1, 3)
GPD_MAX_ORDER = 4
DEXPINV_MAX_ORDER = 8


def _require_order(order: int, allowed, what: str) -> int:
    if not isinstance(order, (int, np.integer)) or int(order) not in allowed:
        raise UnsupportedOrderError(f"{what}: order must be one of {tuple(allowed)}, got {order!r}")
    return int(order)


def _pair(X, Y, what: str) -> Tuple[Mat, Mat]:
    x = as_mat(X, square=True, name=f"{what} X")
    y = as_mat(Y, square=True, name=f"{what} Y")
    require_same_shape(x, y, f"{what} operands")
    return x, y


# ----------------------------
# Symmetric BCH
# ----------------------------

def sym_bch(X, Y, order: int = 3) -> Mat:
    """
    Z with exp(Z) ~ exp(X) exp(Y) exp(X).

      order 1:  2X + Y
      order 3:  2X + Y + 1/6 [Y,[Y,X]] - 1/6 [X,[X,Y]]
    """
    order = _require_order(order, SYM_BCH_ORDERS, "sym_bch")
    x, y = _pair(X, Y, "sym_bch")
    z = 2.0 * x + y
    if order >= 3:
        z = z + br(y, br(y, x)) / 6.0 - br(x, br(x, y)) / 6.0
    return z


# ----------------------------
# Generalized polar recurrence
# ----------------------------

def gpd_series(P, K, order: int = 4) -> Tuple[Mat, Mat]:
    """
    Truncated (S, Q) with exp(S) exp(Q) = exp(P + K) for a split P + K.

    S:  P
        - 1/2  [P,K]
        - 1/6  [K,[P,K]]
        + 1/24 [P,[P,[P,K]]] - 1/24 [K,[K,[P,K]]]
    Q:  K
        - 1/12 [P,[P,K]]

    Gradings of (P, K) are assumed, not re-checked.
    """
    order = _require_order(order, range(1, GPD_MAX_ORDER + 1), "gpd_series")
    p, k = _pair(P, K, "gpd_series")

    s = p.copy()
    q = k.copy()
    if order < 2:
        return s, q

    pk = br(p, k)
    s = s - 0.5 * pk
    if order < 3:
        return s, q

    s = s - br(k, pk) / 6.0
    q = q - br(p, br(p, k)) / 12.0
    if order < 4:
        return s, q

    s = s + br(p, br(p, br(p, k))) / 24.0 - br(k, br(k, pk)) / 24.0
    return s, q


# ----------------------------
# dexpinv
# ----------------------------

def dexpinv_apply(A, V, order: int = DEXPINV_MAX_ORDER) -> Mat:
    """sum_{j=0}^{order} (B_j / j!) ad_A^j (V)."""
    order = _require_order(order, range(1, DEXPINV_MAX_ORDER + 1), "dexpinv_apply")
    a, v = _pair(A, V, "dexpinv_apply")
    table = bernoulli_table()

    out = v.copy()
    term = v
    for j in range(1, order + 1):
        term = br(a, term)
        bj = table[j]
        if bj != 0:
            out = out + (float(bj) / math.factorial(j)) * term
    return out


# ----------------------------
# Degree-5 diagnostic
# ----------------------------

@dataclass(frozen=True)
class Degree5Fit:
    coefficient: float
    residual: float
    per_scale: Tuple[Tuple[float, float], ...]


def _degree5_known(p: Mat, k: Mat) -> Mat:
    pk = br(p, k)
    return -br(k, br(k, br(k, pk))) / 120.0 - br(pk, br(p, pk)) / 180.0


def fit_degree5_coefficient(seed: int = 0, scales: Sequence[float] = (0.2, 0.1, 0.05, 0.025), n: int = 4) -> Degree5Fit:
    """
    Fit the coefficient of [K,[P,[P,[P,K]]]] in the degree-5 part of S.

    For each scale t, X = t X0 is split under transpose-inverse, the true S is
    log of the spd factor of svd_polar(exp X), and (S_true - S_4)/t^5 minus the
    two fully-specified degree-5 terms is projected onto the unknown one. The
    per-scale estimates carry an O(t) degree-6 bias; a linear fit in t removes
    it. `residual` is the relative size of what the projection leaves over at
    the smallest scale.
    """
    from .involutions import InvolutionKind, make_involution, split

    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal((n, n))
    x0 /= fro(x0)
    inv_ = make_involution(InvolutionKind.TRANSPOSE_INVERSE)
    unit = split(x0, inv_)
    p, k = unit.P, unit.K
    w = br(k, br(p, br(p, br(p, k))))
    ww = float(np.sum(w * w))
    known = _degree5_known(p, k)

    estimates = []
    leftover = 0.0
    for t in sorted(scales, reverse=True):
        parts = split(t * x0, inv_)
        s4, _ = gpd_series(parts.P, parts.K, 4)
        s_factor, _ = svd_polar(expm(t * x0))
        r = (logm(s_factor) - s4) / t**5 - known
        c = float(np.sum(r * w)) / ww if ww > 0.0 else 0.0
        estimates.append((float(t), c))
        leftover = fro(r - c * w) / max(fro(r), np.finfo(np.float64).tiny)

    ts = np.array([e[0] for e in estimates])
    cs = np.array([e[1] for e in estimates])
    coefficient = float(np.polyfit(ts, cs, 1)[1]) if len(ts) >= 2 else float(cs[0])
    logger.info("degree5 fit coefficient=%.6g residual=%.3e seed=%s", coefficient, leftover, seed)
    return Degree5Fit(coefficient=coefficient, residual=float(leftover), per_scale=tuple(estimates))
