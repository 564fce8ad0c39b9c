# geometry/verification.py
"""
Seeded invariant suites behind `symspace verify`. Each suite returns a
SuiteResult holding one Check per property; a suite passes iff every check
does. Nothing here raises on a failed property.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

import numpy as np
import scipy.linalg

from .errors import SymspaceError
from .matcore import ad_power, bernoulli_table, commutator, dexp_apply, expm, fro, logm, sqrtm, svd_polar
from .series import dexpinv_apply

logger = logging.getLogger(__name__)

SUITES = ("matcore", "involutions", "series", "gpd", "flows")

POLAR_SAMPLES = 100
INVOLUTION_SAMPLES = 50
TWO_CYCLIC_SAMPLES = 50


@dataclass(frozen=True)
class Check:
    label: str
    value: float
    ok: bool


@dataclass
class SuiteResult:
    name: str
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.ok for c in self.checks)

    def at_most(self, label: str, value: float, limit: float) -> None:
        self.checks.append(Check(label, float(value), bool(np.isfinite(value) and value <= limit)))

    def at_least(self, label: str, value: float, limit: float) -> None:
        self.checks.append(Check(label, float(value), bool(np.isfinite(value) and value >= limit)))

    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.ok]


# ----------------------------
# Random inputs
# ----------------------------

def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_spd(rng: np.random.Generator, n: int, lo: float = 0.5, hi: float = 3.0) -> np.ndarray:
    q = random_orthogonal(rng, n)
    return q @ np.diag(rng.uniform(lo, hi, n)) @ q.T


def random_well_conditioned(rng: np.random.Generator, n: int, cond: float = 1e3) -> np.ndarray:
    u, v = random_orthogonal(rng, n), random_orthogonal(rng, n)
    return u @ np.diag(np.geomspace(1.0, 1.0 / cond, n)) @ v.T


def random_scaled(rng: np.random.Generator, n: int, norm: float) -> np.ndarray:
    x = rng.standard_normal((n, n))
    return x * (norm / fro(x))


def random_two_cyclic(rng: np.random.Generator, a: int, b: int) -> Tuple[np.ndarray, np.ndarray]:
    """(P, S) with S = diag(I_a, -I_b) rotated by a random orthogonal and SPS = -P."""
    q = random_orthogonal(rng, a + b)
    s = np.diag(np.concatenate([np.ones(a), -np.ones(b)]))
    p = np.zeros((a + b, a + b))
    p[:a, a:] = 0.5 * rng.standard_normal((a, b))
    p[a:, :a] = 0.5 * rng.standard_normal((b, a))
    return q @ p @ q.T, q @ s @ q.T


def dense_analytic(fn: str, P: np.ndarray) -> np.ndarray:
    if fn == "exp":
        return scipy.linalg.expm(P)
    if fn == "cos":
        return scipy.linalg.cosm(P)
    if fn == "sin":
        return scipy.linalg.sinm(P)
    if fn == "cayley":
        return np.linalg.inv(np.eye(P.shape[0]) - 0.5 * P)
    if fn == "identity":
        return P.copy()
    raise ValueError(fn)


def _slope(xs, ys) -> float:
    from .flows import linear_slope

    fit = linear_slope(list(zip(np.log(xs), np.log(ys))))
    return float("nan") if fit is None else fit[0]


# ----------------------------
# Suites
# ----------------------------

def verify_matcore(seed: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    out = SuiteResult("matcore")

    worst = 0.0
    for _ in range(10):
        a = random_scaled(rng, 4, 5.0)
        worst = max(worst, fro(expm(a) @ expm(-a) - np.eye(4)))
    out.at_most("expm(A) expm(-A) = I", worst, 1e-11)

    worst = 0.0
    for _ in range(10):
        a = random_scaled(rng, 4, 1.0)
        worst = max(worst, fro(logm(expm(a)) - a))
    out.at_most("logm(expm(A)) = A", worst, 1e-10)

    worst = 0.0
    for _ in range(10):
        a = random_spd(rng, 4)
        r = sqrtm(a)
        worst = max(worst, fro(r @ r - a))
    out.at_most("sqrtm(A)^2 = A", worst, 1e-11)

    a, b, c = (rng.standard_normal((4, 4)) for _ in range(3))
    jac = fro(ad_power(a, commutator(b, c), 1) - commutator(ad_power(a, b, 1), c) - commutator(b, ad_power(a, c, 1)))
    out.at_most("ad Jacobi identity", jac, 1e-12 * max(1.0, fro(a) * fro(b) * fro(c)))

    table = bernoulli_table()
    bad = 0
    for m in range(1, len(table)):
        if sum((math.comb(m + 1, k) * table[k] for k in range(m + 1)), Fraction(0)) != 0:
            bad += 1
    out.at_most("Bernoulli recurrence (exact)", bad, 0)

    worst = 0.0
    for _ in range(10):
        x = random_well_conditioned(rng, 5)
        s, q = svd_polar(x)
        worst = max(worst, fro(s @ q - x), fro(q.T @ q - np.eye(5)))
    out.at_most("svd_polar residual", worst, 1e-12)

    worst = 0.0
    for _ in range(5):
        a = random_scaled(rng, 3, 0.1)
        v = rng.standard_normal((3, 3))
        worst = max(worst, fro(dexp_apply(a, dexpinv_apply(a, v, 8), 8) - v))
    out.at_most("dexp o dexpinv = id", worst, 1e-9)
    return out


def _involutions_under_test(rng: np.random.Generator):
    from .involutions import InvolutionKind, complex_to_real, make_involution, reflection

    return [
        (make_involution(InvolutionKind.TRANSPOSE_INVERSE), lambda: rng.standard_normal((4, 4))),
        (make_involution(InvolutionKind.INNER, reflection(4)), lambda: rng.standard_normal((4, 4))),
        (
            make_involution(InvolutionKind.CONJUGATE),
            lambda: complex_to_real(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))),
        ),
    ]


def verify_involutions(seed: int) -> SuiteResult:
    from .involutions import (
        check_symmetric_space_axioms,
        grading_residuals,
        k_residual,
        p_residual,
        projectors,
        reflection,
        sandwich_product,
        split,
        sphere_product,
    )

    rng = np.random.default_rng(seed)
    out = SuiteResult("involutions")

    for inv_, sample in _involutions_under_test(rng):
        worst_inv = worst_bracket = worst_grade = 0.0
        for _ in range(INVOLUTION_SAMPLES):
            x, y = sample(), sample()
            worst_inv = max(worst_inv, fro(inv_.algebra_map(inv_.algebra_map(x)) - x))
            worst_bracket = max(
                worst_bracket,
                fro(inv_.algebra_map(commutator(x, y)) - commutator(inv_.algebra_map(x), inv_.algebra_map(y))),
            )
            worst_grade = max(worst_grade, max(grading_residuals(x, y, inv_).values()))
            parts = split(x, inv_)
            worst_grade = max(worst_grade, p_residual(inv_, parts.P), k_residual(inv_, parts.K))
        out.at_most(f"{inv_.label}: d sigma involutive ({INVOLUTION_SAMPLES} samples)", worst_inv, 1e-14)
        out.at_most(f"{inv_.label}: d sigma bracket-preserving ({INVOLUTION_SAMPLES} samples)", worst_bracket, 1e-12)
        out.at_most(f"{inv_.label}: grading residuals ({INVOLUTION_SAMPLES} samples)", worst_grade, 1e-12)

    pair = projectors(reflection(3))
    eye = np.eye(3)
    proj = max(
        fro(pair.plus + pair.minus - eye),
        fro(pair.plus @ pair.minus),
        fro(pair.plus @ pair.plus - pair.plus),
        fro(eye - 2.0 * pair.minus - reflection(3)),
    )
    out.at_most("projector identities", proj, 1e-13)

    spd = check_symmetric_space_axioms(sandwich_product, [random_spd(rng, 4) for _ in range(20)])
    out.at_most("spd sandwich product axioms", max(spd.residuals.values()), spd.tol)

    units = []
    for _ in range(10):
        v = rng.standard_normal((3, 1))
        units.append(v / np.linalg.norm(v))
    sphere = check_symmetric_space_axioms(sphere_product, units)
    out.at_most("sphere product axioms", max(sphere.residuals.values()), sphere.tol)
    return out


def verify_series(seed: int) -> SuiteResult:
    from .involutions import InvolutionKind, k_residual, make_involution, p_residual, reflection, split
    from .series import gpd_series, sym_bch

    rng = np.random.default_rng(seed)
    out = SuiteResult("series")

    x, y = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
    eps = np.array([1e-1, 5e-2, 2.5e-2, 1.25e-2])
    errs = [fro(logm(expm(e * x) @ expm(e * y) @ expm(e * x)) - sym_bch(e * x, e * y, 3)) for e in eps]
    out.at_least("sym_bch order-3 slope", _slope(eps, errs), 4.7)

    for inv_ in (make_involution(InvolutionKind.TRANSPOSE_INVERSE), make_involution(InvolutionKind.INNER, reflection(3))):
        base = random_scaled(rng, 3, 1.0)
        worst = 0.0
        for order in (2, 3, 4):
            sizes = np.array([0.2, 0.1, 0.05, 0.025])
            res = []
            for t in sizes:
                parts = split(t * base, inv_)
                s, q = gpd_series(parts.P, parts.K, order)
                res.append(fro(expm(s) @ expm(q) - expm(t * base)))
                worst = max(worst, p_residual(inv_, s), k_residual(inv_, q))
            out.at_least(f"{inv_.label}: gpd order {order} residual slope", _slope(sizes, res), order + 0.7)
        out.at_most(f"{inv_.label}: S in p, Q in k", worst, 1e-12)
    return out


def verify_gpd(seed: int) -> SuiteResult:
    from .gpd import analytic_fn_2cyclic, classical_polar, polar_coords_integrate
    from .involutions import InvolutionKind, k_residual, make_involution, p_residual, reflection

    rng = np.random.default_rng(seed)
    out = SuiteResult("gpd")

    worst = 0.0
    for _ in range(POLAR_SAMPLES):
        x = random_well_conditioned(rng, 5)
        _, q_svd = svd_polar(x)
        worst = max(worst, fro(classical_polar(x).k_factor - q_svd))
    out.at_most(f"newton polar vs svd polar ({POLAR_SAMPLES} samples)", worst, 1e-11)

    worst = 0.0
    for i in range(TWO_CYCLIC_SAMPLES):
        a = 1 + i % 4
        b = 1 + (i // 4) % 4
        p, s = random_two_cyclic(rng, a, b)
        for fn in ("exp", "cos", "sin"):
            worst = max(worst, fro(analytic_fn_2cyclic(p, s, fn) - dense_analytic(fn, p)))
    out.at_most(f"2-cyclic theorem vs dense ({TWO_CYCLIC_SAMPLES} samples)", worst, 1e-10)

    xi = 0.1 * np.array([[0.0, -1.0, -2.0], [1.0, 0.0, -3.0], [2.0, 3.0, 0.0]])
    inv_ = make_involution(InvolutionKind.INNER, reflection(3))
    traj = polar_coords_integrate(lambda t: xi, inv_, 1.0, 1e-3)
    end = traj[-1]
    out.at_most("polar coordinates flow", fro(end.group_element() - expm(xi)), 1e-8)
    grading = max(max(p_residual(inv_, s.P), k_residual(inv_, s.K)) for s in traj)
    out.at_most("polar coordinates gradings", grading, 1e-10)
    return out


def verify_flows(seed: int) -> SuiteResult:
    from .flows import (
        TimeReversal,
        estimate_order,
        is_selfadjoint,
        scovel,
        symmetrize_coefficients,
        symmetry_defect,
        thue_morse_pattern,
        yoshida_coefficients,
    )
    from .problems import harmonic_problem

    rng = np.random.default_rng(seed)
    out = SuiteResult("flows")

    worst = 0.0
    for p in range(1, 7):
        alpha, beta = yoshida_coefficients(p)
        a, b = symmetrize_coefficients(p)
        worst = max(
            worst,
            abs(2 * alpha + beta - 1.0),
            abs(2 * alpha ** (2 * p + 1) + beta ** (2 * p + 1)),
            abs(2 * a + b - 1.0),
            abs(2 * a ** (2 * p + 1) - b ** (2 * p + 1)),
        )
    out.at_most("composition coefficient identities", worst, 1e-14)

    patterns = [thue_morse_pattern(k) for k in range(4)]
    out.at_most("Thue-Morse words", 0.0 if patterns == ["0", "01", "0110", "01101001"] else 1.0, 0.0)

    prob = harmonic_problem()
    y0 = rng.standard_normal(2)
    psi = scovel(prob.base, prob.reversing)
    out.at_most("scovel reversing defect", symmetry_defect(psi, prob.reversing, y0, 0.1, 1, "reversing"), 1e-12)
    out.at_least("forward Euler reversing defect", symmetry_defect(prob.base, prob.reversing, y0, 0.1, 1, "reversing"), 1e-4)
    out.at_most(
        "scovel under time reversal is self-adjoint",
        0.0 if is_selfadjoint(scovel(prob.base, TimeReversal()), y0, 0.1) else 1.0,
        0.0,
    )

    hs = [0.1 * 0.5**k for k in range(5)]
    ladder = []
    for h in hs:
        n = int(round(1.0 / h))
        ladder.append((h, float(np.max(np.abs(prob.selfadjoint.advance(prob.y0, h, n) - prob.exact(n * h))))))
    out.at_least("leapfrog order", estimate_order(ladder).slope, 1.9)
    return out


SUITE_FUNCTIONS: Dict[str, Callable[[int], SuiteResult]] = {
    "matcore": verify_matcore,
    "involutions": verify_involutions,
    "series": verify_series,
    "gpd": verify_gpd,
    "flows": verify_flows,
}


def run_suite(name: str, seed: int) -> SuiteResult:
    """Run one suite; an unexpected library error fails the suite instead of escaping."""
    try:
        result = SUITE_FUNCTIONS[name](seed)
    except SymspaceError as exc:
        logger.error("verify suite=%s error=%s", name, exc)
        result = SuiteResult(name)
        result.checks.append(Check(f"raised {type(exc).__name__}: {exc}", float("nan"), False))
    logger.info("verify suite=%s passed=%s checks=%d", name, result.passed, len(result.checks))
    return result
