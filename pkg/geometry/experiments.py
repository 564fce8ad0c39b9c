# geometry/experiments.py
"""
Order-of-convergence experiments.

  altdir   u_t = u_x + u_y + c u^2 on a periodic [-L, L)^2 grid, split by
           direction; Thue-Morse levels 0..k over the transpose conjugation.
           Two row families:
             fe-tm     forward Euler substeps at the fixed step cfg.h
             heun-tm   Heun x(h/2) y(h) x(h/2) base on the h-ladder
  stiff    u_t = lap(u) - u (u - 1)^2 on [-1, 1)^2, delta = 0.1; the
           self-adjoint FE/BE base, its Yoshida triple jump and the
           positive-step symmetrization on a ladder anchored at the stability
           limit h0 of the base method.
  compose  the four composition schemes on the small linear problems.

Every (scheme, level, h) row is an independent job; rows are computed on a
bounded thread pool and sorted before they are returned.
"""
from __future__ import annotations

import asyncio
import csv
import io
import logging
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConfigError, ConvergenceError, Diverged, LadderError
from .flows import (
    Flow,
    Inversion,
    TimeReversal,
    ladder_steps,
    scovel,
    selfadjoint_inversion,
    steps_for,
    sup_norm,
    symmetrize_selfadjoint,
    symmetry_defect,
    thue_morse,
    yoshida,
)
from .grids import GridState, directional, field_symmetry_error, periodic_first_derivative, periodic_second_derivative, transpose_map
from .problems import Problem, get_problem

logger = logging.getLogger(__name__)

EXPERIMENTS = ("altdir", "stiff")
STIFF_SCHEMES = ("base", "yoshida", "selfadjoint")
COMPOSE_SCHEMES = ("scovel", "tm", "yoshida", "selfadjoint")
STATUS_OK = "ok"
STATUS_DIVERGED = "diverged"
CSV_DIGITS = 17


# ----------------------------
# Configuration
# ----------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: int
    L: float
    h: float
    nonlinearity: float
    levels: int
    rungs: int
    hmax: float
    t_end: float
    schemes: Tuple[str, ...]
    seed: int = 0
    out: Optional[Path] = None
    delta: Optional[float] = None
    divergence_threshold: float = 1e6
    reference_refinement: int = 64
    be_tol: float = 1e-12
    be_max_iter: int = 30
    h0_bracket: Tuple[float, float] = (1e-3, 1.0 / 3.0)
    h0_bisections: int = 30
    growth_tol: float = 1e-9
    workers: int = 4

    @classmethod
    def from_settings(cls, experiment: str, **overrides) -> "ExperimentConfig":
        """
        Defaults from settings.SYMSPACE; keyword overrides (None means keep the
        default) win. `delta` fixes n = round(2L / delta) when given.
        """
        from django.conf import settings

        conf = settings.SYMSPACE
        if experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {experiment!r}; known: {EXPERIMENTS}")
        opts = {k: v for k, v in overrides.items() if v is not None}

        if experiment == "altdir":
            sect = conf["ALTDIR"]
            base = dict(
                n=sect["GRID"], L=sect["L"], h=sect["H"], nonlinearity=sect["NONLINEARITY"],
                levels=sect["LEVELS"], rungs=sect["RUNGS"], hmax=sect["HMAX"],
                schemes=("fe-tm", "heun-tm"),
            )
        else:
            sect = conf["STIFF"]
            base = dict(
                n=0, L=sect["L"], delta=sect["DELTA"], h=0.0, nonlinearity=1.0,
                levels=1, rungs=sect["RUNGS"], hmax=0.0, schemes=STIFF_SCHEMES,
                h0_bracket=tuple(sect["H0_BRACKET"]), h0_bisections=sect["H0_BISECTIONS"], growth_tol=sect["GROWTH_TOL"],
            )
        base.update(
            seed=conf["SEED"],
            t_end=conf["T_END"],
            divergence_threshold=conf["DIVERGENCE_THRESHOLD"],
            reference_refinement=conf["REFERENCE_REFINEMENT"],
            be_tol=conf["BE_NEWTON_TOL"],
            be_max_iter=conf["BE_NEWTON_MAX_ITER"],
            workers=conf["WORKERS"],
        )
        if "n" in opts and "delta" not in opts:
            base["delta"] = None
        base.update(opts)

        if base.get("delta"):
            base["n"] = int(round(2.0 * base["L"] / base["delta"]))
        if base.get("out") is not None:
            base["out"] = Path(base["out"])
        base["schemes"] = tuple(base["schemes"])

        cfg = cls(experiment=experiment, **base)
        cfg.validate()
        return cfg

    @property
    def spacing(self) -> float:
        return 2.0 * self.L / self.n

    def validate(self) -> None:
        if self.n < 3:
            raise ConfigError(f"grid needs at least 3 points per dimension, got {self.n}")
        if self.L <= 0.0 or self.t_end <= 0.0:
            raise ConfigError(f"L and t_end must be positive, got L={self.L} t_end={self.t_end}")
        if self.rungs < 1 or self.levels < 0:
            raise ConfigError(f"need rungs >= 1 and levels >= 0, got rungs={self.rungs} levels={self.levels}")
        if self.delta is not None and abs(self.n * self.delta - 2.0 * self.L) > 1e-9 * self.L:
            raise ConfigError(f"delta={self.delta} does not divide [-L, L) with L={self.L}")
        if self.experiment == "altdir":
            if self.h <= 0.0 or self.hmax <= 0.0:
                raise ConfigError(f"altdir needs h > 0 and hmax > 0, got h={self.h} hmax={self.hmax}")
            try:
                for h in ladder_steps(self.hmax, self.rungs):
                    steps_for(self.t_end, h, 2**self.levels)
            except LadderError as exc:
                raise ConfigError(f"altdir ladder: {exc}") from exc
        else:
            if self.growth_tol < 0.0:
                raise ConfigError(f"growth_tol must be non-negative, got {self.growth_tol}")
            lo, hi = self.h0_bracket
            if not 0.0 < lo < hi:
                raise ConfigError(f"h0 bracket must satisfy 0 < lo < hi, got {self.h0_bracket}")
            unknown = set(self.schemes) - set(STIFF_SCHEMES)
            if unknown:
                raise ConfigError(f"unknown stiff schemes {sorted(unknown)}")


# ----------------------------
# Rows + CSV
# ----------------------------

@dataclass(frozen=True, order=True)
class ResultRow:
    scheme: str
    level: int
    h: float
    global_error: Optional[float] = field(default=None, compare=False)
    symmetry_error: Optional[float] = field(default=None, compare=False)
    status: str = field(default=STATUS_OK, compare=False)

    @classmethod
    def diverged(cls, scheme: str, level: int, h: float) -> "ResultRow":
        return cls(scheme=scheme, level=level, h=h, status=STATUS_DIVERGED)


@dataclass(frozen=True, order=True)
class ComposeRow:
    scheme: str
    level: int
    h: float
    global_error: float = field(compare=False)
    symmetry_error: float = field(compare=False)
    reversing_error: Optional[float] = field(default=None, compare=False)
    steps: int = field(default=0, compare=False)


Row = Union[ResultRow, ComposeRow]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, f".{CSV_DIGITS}g")
    return str(v)


def format_csv(rows: Sequence[Row], row_type=None) -> str:
    """Header row always present; None becomes an empty cell."""
    kind = row_type or (type(rows[0]) if rows else ResultRow)
    header = [f.name for f in fields(kind)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(getattr(row, name)) for name in header])
    return buf.getvalue()


def write_csv(rows: Sequence[Row], path: Union[str, Path], row_type=None) -> Path:
    p = Path(path)
    p.write_text(format_csv(rows, row_type), encoding="utf-8")
    return p


# ----------------------------
# Async row pool
# ----------------------------

Job = Callable[[], Row]


async def _run_jobs(jobs: Sequence[Job], workers: int) -> List[Row]:
    gate = asyncio.Semaphore(max(1, workers))

    async def one(job: Job) -> Row:
        async with gate:
            return await asyncio.to_thread(job)

    return list(await asyncio.gather(*(one(j) for j in jobs)))


def run_jobs(jobs: Sequence[Job], workers: int = 4) -> List[Row]:
    return sorted(asyncio.run(_run_jobs(jobs, workers)))


# ----------------------------
# Shared PDE plumbing
# ----------------------------

def _check_state(u: np.ndarray, threshold: float) -> np.ndarray:
    if not np.all(np.isfinite(u)):
        raise Diverged("field became non-finite")
    size = sup_norm(u)
    if size > threshold:
        raise Diverged(f"field norm {size:.3e} above {threshold:g}", norm=size)
    return u


def _run_guarded(flow: Flow, u0: np.ndarray, h: float, n_macro: int, threshold: float) -> np.ndarray:
    u = u0
    with np.errstate(all="ignore"):
        for _ in range(n_macro):
            u = _check_state(flow.step(h, u), threshold)
    return u


def _evaluate(
    scheme: str,
    level: int,
    h: float,
    flow: Flow,
    u0: np.ndarray,
    n_macro: int,
    reference: np.ndarray,
    n: int,
    threshold: float,
) -> ResultRow:
    try:
        u = _run_guarded(flow, u0, h, n_macro, threshold)
    except (Diverged, ConvergenceError, np.linalg.LinAlgError, ArithmeticError) as exc:
        logger.info("row scheme=%s level=%d h=%.6g status=diverged reason=%s", scheme, level, h, exc)
        return ResultRow.diverged(scheme, level, h)
    row = ResultRow(
        scheme=scheme,
        level=level,
        h=h,
        global_error=sup_norm(u - reference),
        symmetry_error=field_symmetry_error(u, n),
    )
    logger.info("row scheme=%s level=%d h=%.6g global=%.3e symmetry=%.3e", scheme, level, h, row.global_error, row.symmetry_error)
    return row


# ----------------------------
# Alternating directions
# ----------------------------

@dataclass(frozen=True, eq=False)
class AltdirProblem:
    n: int
    L: float
    dx: sp.csr_matrix
    dy: sp.csr_matrix
    c: float

    @classmethod
    def build(cls, cfg: ExperimentConfig) -> "AltdirProblem":
        d1 = periodic_first_derivative(cfg.n, cfg.spacing)
        return cls(n=cfg.n, L=cfg.L, dx=directional(d1, cfg.n, "x"), dy=directional(d1, cfg.n, "y"), c=cfg.nonlinearity)

    def initial(self) -> np.ndarray:
        return GridState.from_function(self.n, self.L, lambda x, y: np.exp(-x * x - y * y)).flat()

    def field(self, axis: str) -> Callable[[np.ndarray], np.ndarray]:
        d = self.dx if axis == "x" else self.dy
        c = self.c
        return lambda u: d @ u + 0.5 * c * u * u

    def full_field(self, u: np.ndarray) -> np.ndarray:
        return self.dx @ u + self.dy @ u + self.c * u * u


def forward_euler_substep(F: Callable[[np.ndarray], np.ndarray]) -> Callable[[float, np.ndarray], np.ndarray]:
    return lambda h, u: u + h * F(u)


def heun_substep(F: Callable[[np.ndarray], np.ndarray]) -> Callable[[float, np.ndarray], np.ndarray]:
    def step(h, u):
        k1 = F(u)
        k2 = F(u + h * k1)
        return u + 0.5 * h * (k1 + k2)

    return step


def altdir_fe_flow(prob: AltdirProblem) -> Flow:
    """FE in x, then FE in y."""
    fx = forward_euler_substep(prob.field("x"))
    fy = forward_euler_substep(prob.field("y"))
    return Flow(stepper=lambda h, u: fy(h, fx(h, u)), declared_order=1, inversion=Inversion.newton(), name="fe-adi")


def altdir_heun_flow(prob: AltdirProblem) -> Flow:
    """Heun x(h/2), Heun y(h), Heun x(h/2)."""
    hx = heun_substep(prob.field("x"))
    hy = heun_substep(prob.field("y"))
    return Flow(
        stepper=lambda h, u: hx(0.5 * h, hy(h, hx(0.5 * h, u))),
        declared_order=2,
        inversion=Inversion.newton(),
        name="heun-adi",
    )


def snap_horizon(t_end: float, macro: float) -> float:
    """Smallest whole number of macro-steps reaching t_end."""
    return macro * math.ceil(t_end / macro - 1e-9)


def _altdir_reference(prob: AltdirProblem, u0: np.ndarray, t: float, h_ref: float, threshold: float) -> np.ndarray:
    n_ref = max(1, int(round(t / h_ref)))
    return _run_guarded(altdir_heun_flow(prob), u0, t / n_ref, n_ref, threshold)


def run_altdir_experiment(cfg: ExperimentConfig) -> List[ResultRow]:
    prob = AltdirProblem.build(cfg)
    u0 = prob.initial()
    T = transpose_map(cfg.n)
    jobs: List[Job] = []

    if "fe-tm" in cfg.schemes:
        t_fixed = snap_horizon(cfg.t_end, (2**cfg.levels) * cfg.h)
        ref1 = _altdir_reference(prob, u0, t_fixed, cfg.h / cfg.reference_refinement, cfg.divergence_threshold)
        base = altdir_fe_flow(prob)
        n_base = int(round(t_fixed / cfg.h))
        for k in range(cfg.levels + 1):
            flow = thue_morse(base, T, k)
            jobs.append(
                lambda k=k, flow=flow: _evaluate(
                    "fe-tm", k, cfg.h, flow, u0, n_base // flow.period, ref1, cfg.n, cfg.divergence_threshold
                )
            )

    if "heun-tm" in cfg.schemes:
        hs = ladder_steps(cfg.hmax, cfg.rungs)
        ref2 = _altdir_reference(prob, u0, cfg.t_end, min(hs) / cfg.reference_refinement, cfg.divergence_threshold)
        base = altdir_heun_flow(prob)
        for k in range(cfg.levels + 1):
            flow = thue_morse(base, T, k)
            for h in hs:
                n_base = steps_for(cfg.t_end, h, flow.period)
                jobs.append(
                    lambda k=k, h=h, flow=flow, n_base=n_base: _evaluate(
                        "heun-tm", k, h, flow, u0, n_base // flow.period, ref2, cfg.n, cfg.divergence_threshold
                    )
                )

    rows = run_jobs(jobs, cfg.workers)
    logger.info("altdir rows=%d n=%d levels=%d", len(rows), cfg.n, cfg.levels)
    return rows


# ----------------------------
# Stiff reaction-diffusion
# ----------------------------

@dataclass(frozen=True, eq=False)
class StiffProblem:
    n: int
    L: float
    dxx: sp.csr_matrix
    dyy: sp.csr_matrix
    newton_tol: float = 1e-12
    newton_max_iter: int = 30

    @classmethod
    def build(cls, cfg: ExperimentConfig) -> "StiffProblem":
        d2 = periodic_second_derivative(cfg.n, cfg.spacing)
        return cls(
            n=cfg.n,
            L=cfg.L,
            dxx=directional(d2, cfg.n, "x"),
            dyy=directional(d2, cfg.n, "y"),
            newton_tol=cfg.be_tol,
            newton_max_iter=cfg.be_max_iter,
        )

    def initial(self) -> np.ndarray:
        return GridState.from_function(self.n, self.L, lambda x, y: np.exp(-9.0 * x * x - 9.0 * y * y)).flat()

    @staticmethod
    def reaction(u: np.ndarray) -> np.ndarray:
        return -u * (u - 1.0) ** 2

    @staticmethod
    def reaction_prime(u: np.ndarray) -> np.ndarray:
        return -(u - 1.0) * (3.0 * u - 1.0)

    def operator(self, axis: str) -> sp.csr_matrix:
        return self.dxx if axis == "x" else self.dyy

    def forward_euler(self, axis: str, tau: float, u: np.ndarray) -> np.ndarray:
        return u + tau * (self.operator(axis) @ u + 0.5 * self.reaction(u))

    def backward_euler(self, axis: str, tau: float, u: np.ndarray) -> np.ndarray:
        """
        Solve v - tau (D v + f(v)/2) = u by Newton, warm-started from the FE
        predictor. A root is accepted only when both the last update and the
        residual at the new iterate are within tolerance.
        """
        d = self.operator(axis)
        eye = sp.identity(u.size, format="csc")
        scale_d = 1.0 + abs(tau) * float(abs(d).sum(axis=1).max())

        def residual(v):
            return v - tau * (d @ v + 0.5 * self.reaction(v)) - u

        v = self.forward_euler(axis, tau, u)
        g = residual(v)
        res = float("inf")
        for it in range(1, self.newton_max_iter + 1):
            jac = (eye - tau * (d + sp.diags(0.5 * self.reaction_prime(v)))).tocsc()
            delta = spla.spsolve(jac, g)
            if not np.all(np.isfinite(delta)):
                raise ConvergenceError("backward Euler Newton produced a non-finite update", residual=res, iterations=it)
            v = v - delta
            g = residual(v)
            scale = max(1.0, sup_norm(v))
            res = sup_norm(g)
            if sup_norm(delta) <= self.newton_tol * scale and res <= self.newton_tol * scale * scale_d:
                return v
        raise ConvergenceError("backward Euler Newton did not converge", residual=res, iterations=self.newton_max_iter)


def stiff_base_flow(prob: StiffProblem) -> Flow:
    """FE(h/2, F1), FE(h/2, F2), BE(h/2, F2), BE(h/2, F1): self-adjoint, order 2."""

    def stepper(h, u):
        tau = 0.5 * h
        u = prob.forward_euler("x", tau, u)
        u = prob.forward_euler("y", tau, u)
        u = prob.backward_euler("y", tau, u)
        return prob.backward_euler("x", tau, u)

    return Flow(stepper=stepper, declared_order=2, inversion=selfadjoint_inversion(stepper), name="fe-be")


def diverges(flow: Flow, u0: np.ndarray, h: float, t_end: float, threshold: float) -> bool:
    """Divergence predicate: non-finite, norm above threshold or failed Newton before t_end."""
    try:
        _run_guarded(flow, u0, h, max(1, math.ceil(t_end / h - 1e-9)), threshold)
    except (Diverged, ConvergenceError, np.linalg.LinAlgError, ArithmeticError):
        return True
    return False


def loses_contraction(flow: Flow, u0: np.ndarray, h: float, t_end: float, threshold: float, growth_tol: float) -> bool:
    """
    Stability predicate for the stiff base: diverges, or the sup norm grows
    from one step to the next by more than growth_tol (relative) before t_end.
    """
    u = u0
    size = sup_norm(u0)
    try:
        with np.errstate(all="ignore"):
            for _ in range(max(1, math.ceil(t_end / h - 1e-9))):
                u = _check_state(flow.step(h, u), threshold)
                grown = sup_norm(u)
                if grown > size * (1.0 + growth_tol):
                    logger.debug("contraction lost h=%.6g norm=%.6e previous=%.6e", h, grown, size)
                    return True
                size = grown
    except (Diverged, ConvergenceError, np.linalg.LinAlgError, ArithmeticError):
        return True
    return False


def find_stable_step(is_unstable: Callable[[float], bool], bracket: Tuple[float, float], bisections: int = 30) -> float:
    """
    Largest stable step by bisection in log(h) on `bracket`. The lower end must
    be stable and the upper end unstable; anything else raises LadderError.
    """
    lo, hi = bracket
    if not is_unstable(hi):
        raise LadderError(f"no unstable step in bracket [{lo:g}, {hi:g}]; widen the bracket")
    if is_unstable(lo):
        raise LadderError(f"lower end of bracket [{lo:g}, {hi:g}] is already unstable")
    for _ in range(bisections):
        mid = math.sqrt(lo * hi)
        if is_unstable(mid):
            hi = mid
        else:
            lo = mid
    logger.info("stable step h0=%.6g unstable_above=%.6g", lo, hi)
    return lo


def stiff_ladder(h0: float, t_end: float, rungs: int) -> List[float]:
    """Top rung is the largest t_end / 2^j not above 3 h0, then halving."""
    j = max(0, math.ceil(math.log2(t_end / (3.0 * h0)) - 1e-9))
    return ladder_steps(t_end * 0.5**j, rungs)


def stiff_schemes(base: Flow, T) -> Dict[str, Flow]:
    return {
        "base": base,
        "yoshida": yoshida(base, 1),
        "selfadjoint": symmetrize_selfadjoint(base, T, p=1, iterations=1),
    }


def stiff_stable_step(cfg: ExperimentConfig, base: Flow, u0: np.ndarray) -> float:
    return find_stable_step(
        lambda h: loses_contraction(base, u0, h, cfg.t_end, cfg.divergence_threshold, cfg.growth_tol),
        cfg.h0_bracket,
        cfg.h0_bisections,
    )


def stiff_reference(base: Flow, u0: np.ndarray, h_min: float, cfg: ExperimentConfig, refinement: Optional[int] = None) -> np.ndarray:
    """Base method at h_min / refinement (REFERENCE_REFINEMENT by default) up to t_end."""
    h_ref = h_min / (refinement or cfg.reference_refinement)
    return _run_guarded(base, u0, h_ref, steps_for(cfg.t_end, h_ref), cfg.divergence_threshold)


def stiff_rows(
    cfg: ExperimentConfig, base: Flow, u0: np.ndarray, hs: Sequence[float], reference: np.ndarray
) -> List[ResultRow]:
    flows = stiff_schemes(base, transpose_map(cfg.n))
    jobs: List[Job] = []
    for name in cfg.schemes:
        flow = flows[name]
        for h in hs:
            n_macro = steps_for(cfg.t_end, h)
            jobs.append(
                lambda name=name, flow=flow, h=h, n_macro=n_macro: _evaluate(
                    name, 1 if name != "base" else 0, h, flow, u0, n_macro, reference, cfg.n, cfg.divergence_threshold
                )
            )
    return run_jobs(jobs, cfg.workers)


def run_stiff_experiment(cfg: ExperimentConfig) -> List[ResultRow]:
    prob = StiffProblem.build(cfg)
    u0 = prob.initial()
    base = stiff_base_flow(prob)

    h0 = stiff_stable_step(cfg, base, u0)
    hs = stiff_ladder(h0, cfg.t_end, cfg.rungs)
    logger.info("stiff h0=%.6g top=%.6g rungs=%d n=%d", h0, hs[0], len(hs), cfg.n)

    reference = stiff_reference(base, u0, min(hs), cfg)
    return stiff_rows(cfg, base, u0, hs, reference)


def run_experiment(cfg: ExperimentConfig) -> List[ResultRow]:
    if cfg.experiment == "altdir":
        return run_altdir_experiment(cfg)
    return run_stiff_experiment(cfg)


# ----------------------------
# Composition ladders on the linear problems
# ----------------------------

def compose_flow(problem: Problem, scheme: str, level: int) -> Flow:
    if scheme == "scovel":
        return scovel(problem.base, problem.reversing or TimeReversal())
    if scheme == "tm":
        return thue_morse(problem.base, problem.symmetry, level)
    if scheme == "yoshida":
        flow = problem.selfadjoint
        for p in range(1, level + 1):
            flow = yoshida(flow, p)
        return flow
    if scheme == "selfadjoint":
        if level == 0:
            return problem.selfadjoint
        return symmetrize_selfadjoint(problem.selfadjoint, problem.symmetry, p=1, iterations=level)
    raise ConfigError(f"unknown scheme {scheme!r}; known: {COMPOSE_SCHEMES}")


def _compose_row(problem: Problem, scheme: str, level: int, h: float, t_end: float) -> ComposeRow:
    flow = compose_flow(problem, scheme, level)
    n_base = steps_for(t_end, h, flow.period)
    y = flow.advance(problem.y0, h, n_base)
    reversing = None
    if problem.reversing is not None:
        reversing = symmetry_defect(flow, problem.reversing, problem.y0, h, flow.period, mode="reversing")
    return ComposeRow(
        scheme=scheme,
        level=level,
        h=h,
        global_error=sup_norm(y - problem.exact(t_end)),
        symmetry_error=symmetry_defect(flow, problem.symmetry, problem.y0, h, n_base, mode="symmetry"),
        reversing_error=reversing,
        steps=n_base // flow.period,
    )


def run_compose(
    problem: Union[str, Problem],
    scheme: str,
    levels: int = 3,
    hmax: float = 0.125,
    rungs: int = 5,
    t_end: Optional[float] = None,
    workers: int = 4,
) -> List[ComposeRow]:
    prob = get_problem(problem) if isinstance(problem, str) else problem
    if scheme not in COMPOSE_SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}; known: {COMPOSE_SCHEMES}")
    horizon = prob.t_end if t_end is None else t_end
    level_range: Iterable[int] = [0] if scheme == "scovel" else range(levels + 1)

    jobs: List[Job] = []
    for k in level_range:
        for h in ladder_steps(hmax, rungs):
            steps_for(horizon, h, 2**k if scheme == "tm" else 1)
            jobs.append(lambda k=k, h=h: _compose_row(prob, scheme, k, h, horizon))
    return run_jobs(jobs, workers)
