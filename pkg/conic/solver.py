"""Primal-dual path-following interior-point solver

Solves the standard-form pair

    primal:  min c'x   s.t.  A x = b,        x in K
    dual:    max b'y   s.t.  A'y + z = c,    z in K*  (K is self-dual)

with Nesterov-Todd scaling on every block, Mehrotra predictor-corrector and a
common primal/dual step damped by `step_fraction`. Search directions come from
the dense normal equations (A W'W A') dy = rhs factored by Cholesky.

A step is only accepted once every block of the new (x, z) passes the same
interiority test the next scaling needs (Cholesky for PSD blocks, a positive
hyperbolic margin for SOC blocks); otherwise it is shortened by BACKTRACK.
"""
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np
import scipy.sparse as sps
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.linalg.lapack import dpstrf

from conic.cones import InteriorLost, identity_point, make_scaling
from conic.program import ConeKind, ConeProgram, validate
from utils.logger import get_logger

logger = get_logger("conic.solver")

BACKTRACK = 0.9
MIN_STEP = 1e-12


class SolveStatus(str, Enum):
    OPTIMAL = "Optimal"
    MAX_ITERATIONS = "MaxIterations"
    NUMERICAL_FAILURE = "NumericalFailure"
    SUSPECTED_INFEASIBLE = "SuspectedInfeasible"


@dataclass(frozen=True)
class SolverSettings:
    tol_gap: float = 1e-7
    tol_feas: float = 1e-7
    max_iters: int = 100
    step_fraction: float = 0.98
    predictor_corrector: bool = True
    stagnation_window: int = 10

    def errors(self) -> List[str]:
        errors = []
        if not (0.0 < self.step_fraction < 1.0):
            errors.append("step_fraction must lie in (0, 1)")
        if not (self.tol_gap > 0 and self.tol_feas > 0):
            errors.append("tolerances must be > 0")
        if self.max_iters < 1:
            errors.append("max_iters must be >= 1")
        if self.stagnation_window < 2:
            errors.append("stagnation_window must be >= 2")
        return errors

    @classmethod
    def from_config(cls, section: Optional[dict] = None, **overrides) -> "SolverSettings":
        """Build from the [solver] table of config.toml plus explicit overrides"""
        values = {}
        for name in cls.__dataclass_fields__:
            if section and name in section:
                values[name] = section[name]
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(eq=False)
class SolveResult:
    status: SolveStatus
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    gap: float
    res_primal: float
    res_dual: float
    iterations: int
    wall_time: float
    primal_objective: float = math.nan
    dual_objective: float = math.nan
    message: str = ""
    history: List[dict] = field(default_factory=list, repr=False)

    @property
    def ok(self) -> bool:
        return self.status in (SolveStatus.OPTIMAL, SolveStatus.MAX_ITERATIONS)


class _BlockData:
    """Slice of A restricted to the rows touching one block

    PSD blocks keep a dense slice (the normal contribution works on stacked
    matrices); NonNeg and SOC slices stay sparse.
    """

    def __init__(self, block, lo, hi, A_csc):
        self.block = block
        self.lo, self.hi = lo, hi
        sub = A_csc[:, lo:hi]
        self.rows = np.unique(sub.tocoo().row)
        sub = sub.tocsr()[self.rows] if self.rows.size else sps.csr_matrix((0, hi - lo))
        self.A = sub.toarray() if block.kind == ConeKind.PSD else sub


def _merit(gap, rp, rd):
    return max(gap, rp, rd)


def _scalings(blocks, x: np.ndarray, z: np.ndarray):
    """NT scaling of every block; InteriorLost if any block is not strictly interior"""
    return [make_scaling(blk.block, x[blk.lo:blk.hi], z[blk.lo:blk.hi]) for blk in blocks]


def _factor(M: np.ndarray):
    """Cholesky of the normal matrix, retried once with a tiny diagonal shift"""
    try:
        return cho_factor(M, lower=True)
    except (LinAlgError, ValueError):
        bump = 1e-13 * max(1.0, float(np.max(np.abs(np.diag(M)))))
        logger.debug(f"normal matrix regularized by {bump:.2e}")
        return cho_factor(M + bump * np.eye(M.shape[0]), lower=True)


def solve(p: ConeProgram, s: Optional[SolverSettings] = None) -> SolveResult:
    """Run the interior-point method on a validated program"""
    s = s or SolverSettings()
    t0 = time.perf_counter()

    problems = validate(p) + s.errors()
    if problems:
        raise ValueError("; ".join(problems))

    A = p.matrix()
    b = p.rhs()
    c = np.asarray(p.objective, dtype=float)
    m, N = A.shape
    AT = A.T.tocsr()
    A_csc = A.tocsc()
    offsets = p.block_offsets()
    blocks = [
        _BlockData(blk, lo, lo + blk.slots, A_csc) for blk, lo in zip(p.blocks, offsets)
    ]
    theta = float(p.degree())
    e = np.concatenate([identity_point(blk) for blk in p.blocks])

    def empty_result(status, message, x, y, z, it, gap=math.inf, rp=math.inf, rd=math.inf):
        return SolveResult(
            status=status, x=x, y=y, z=z, gap=gap, res_primal=rp, res_dual=rd,
            iterations=it, wall_time=time.perf_counter() - t0,
            primal_objective=float(c @ x), dual_objective=float(b @ y), message=message,
        )

    # Rank check on the equality rows (pivoted Cholesky of A A')
    if m > 0:
        gram = (A @ AT).toarray()
        _, _, rank, info = dpstrf(gram, tol=-1.0)
        if info < 0 or rank < m:
            message = f"equality rows are linearly dependent (rank {rank} < {m})"
            logger.error(message)
            return empty_result(SolveStatus.NUMERICAL_FAILURE, message, np.zeros(N), np.zeros(m), np.zeros(N), 0)

    # Initial point: scaled Jordan identities
    row_norms = np.sqrt(np.asarray(A.multiply(A).sum(axis=1)).ravel()) if m else np.zeros(0)
    sqrt_theta = math.sqrt(theta)
    xi = max(10.0, sqrt_theta, sqrt_theta * float(np.max((1.0 + np.abs(b)) / (1.0 + row_norms))) if m else 0.0)
    eta = max(10.0, sqrt_theta, float(np.max(row_norms)) if m else 0.0, float(np.linalg.norm(c)))
    x = xi * e
    z = eta * e
    y = np.zeros(m)

    nb, nc = 1.0 + float(np.linalg.norm(b)), 1.0 + float(np.linalg.norm(c))
    best = None
    history: List[dict] = []
    status, message = SolveStatus.MAX_ITERATIONS, "iteration limit reached"
    scalings = None
    it = 0

    def parts(vec):
        return [vec[blk.lo:blk.hi] for blk in blocks]

    def apply(scalings, method, vec):
        return np.concatenate([getattr(sc, method)(v) for sc, v in zip(scalings, parts(vec))])

    while True:
        rp_vec = b - A @ x
        rd_vec = c - AT @ y - z
        pobj, dobj = float(c @ x), float(b @ y)
        xz = float(x @ z)
        mu = xz / theta
        gap = abs(xz) / (1.0 + abs(pobj) + abs(dobj))
        res_p = float(np.linalg.norm(rp_vec)) / nb
        res_d = float(np.linalg.norm(rd_vec)) / nc

        history.append({"iter": it, "pobj": pobj, "dobj": dobj, "gap": gap, "res_p": res_p, "res_d": res_d, "mu": mu})
        if best is None or _merit(gap, res_p, res_d) < best["merit"]:
            best = {"merit": _merit(gap, res_p, res_d), "x": x.copy(), "y": y.copy(), "z": z.copy(),
                    "gap": gap, "res_p": res_p, "res_d": res_d, "it": it}

        if gap <= s.tol_gap and res_p <= s.tol_feas and res_d <= s.tol_feas:
            status, message = SolveStatus.OPTIMAL, "converged"
            best = {"merit": 0.0, "x": x, "y": y, "z": z, "gap": gap, "res_p": res_p, "res_d": res_d, "it": it}
            break
        if it >= s.max_iters:
            break

        # Residual stagnation while the gap stays open
        w = s.stagnation_window
        if it >= 2 * w:
            old = max(history[-w - 1]["res_p"], history[-w - 1]["res_d"])
            now = max(res_p, res_d)
            if now > s.tol_feas and now > 0.5 * old and gap > s.tol_gap and mu < 1e-3 * history[0]["mu"]:
                status, message = SolveStatus.SUSPECTED_INFEASIBLE, "residuals stagnate while the gap stays open"
                break

        if scalings is None:
            try:
                scalings = _scalings(blocks, x, z)
            except InteriorLost as exc:
                status, message = SolveStatus.NUMERICAL_FAILURE, f"loss of cone interiority: {exc}"
                break

        # Normal matrix
        M = np.zeros((m, m))
        for blk, sc in zip(blocks, scalings):
            if blk.rows.size:
                M[np.ix_(blk.rows, blk.rows)] += sc.normal(blk.A)
        factor = None
        if m:
            try:
                factor = _factor(M)
            except (LinAlgError, ValueError):
                status, message = SolveStatus.NUMERICAL_FAILURE, "normal-equation factorization broke down"
                break

        lam = np.concatenate([sc.lam for sc in scalings])
        h_rd = apply(scalings, "h", rd_vec)

        def direction(rc):
            t = apply(scalings, "w_t", rc)
            rhs = rp_vec - A @ t + A @ h_rd
            dy = cho_solve(factor, rhs) if m else np.zeros(0)
            dz = rd_vec - AT @ dy
            dx = t - apply(scalings, "h", dz)
            return dx, dy, dz

        def step_limit(dx, dz):
            dxs = apply(scalings, "winv_t", dx)
            dzs = apply(scalings, "w", dz)
            alpha = math.inf
            for sc, u, v in zip(scalings, parts(dxs), parts(dzs)):
                alpha = min(alpha, sc.max_step(u), sc.max_step(v))
            return alpha, dxs, dzs

        # Predictor
        dx, dy, dz = direction(-lam)
        if not np.all(np.isfinite(dx)) or not np.all(np.isfinite(dz)):
            status, message = SolveStatus.NUMERICAL_FAILURE, "non-finite search direction"
            break
        try:
            alpha_aff, dxs, dzs = step_limit(dx, dz)
        except InteriorLost as exc:
            status, message = SolveStatus.NUMERICAL_FAILURE, f"loss of cone interiority: {exc}"
            break

        if s.predictor_corrector:
            a = min(1.0, alpha_aff)
            mu_aff = float((x + a * dx) @ (z + a * dz)) / theta
            sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3 if mu > 0 else 0.0
            target = sigma * mu * e - np.concatenate([
                sc.jordan(u, v) for sc, u, v in zip(scalings, parts(dxs), parts(dzs))
            ])
        else:
            sigma = 0.1
            target = sigma * mu * e
        rc = np.concatenate([sc.lam_solve(r) for sc, r in zip(scalings, parts(target))]) - lam
        dx, dy, dz = direction(rc)
        if not np.all(np.isfinite(dx)) or not np.all(np.isfinite(dz)):
            status, message = SolveStatus.NUMERICAL_FAILURE, "non-finite search direction"
            break

        try:
            alpha_max, _, _ = step_limit(dx, dz)
        except InteriorLost as exc:
            status, message = SolveStatus.NUMERICAL_FAILURE, f"loss of cone interiority: {exc}"
            break
        alpha = min(1.0, s.step_fraction * alpha_max)

        # Complementarity safeguard: never let <x, z> grow by more than 10x
        for _ in range(30):
            xz_new = float((x + alpha * dx) @ (z + alpha * dz))
            if xz_new <= 10.0 * xz or xz <= 0:
                break
            alpha *= 0.5

        # Shorten until the new point is strictly interior in every block
        accepted = None
        while alpha >= MIN_STEP:
            x_new, z_new = x + alpha * dx, z + alpha * dz
            try:
                accepted = _scalings(blocks, x_new, z_new)
                break
            except InteriorLost:
                alpha *= BACKTRACK
        if accepted is None:
            status, message = SolveStatus.NUMERICAL_FAILURE, "step length collapsed"
            break

        x, z = x_new, z_new
        y = y + alpha * dy
        scalings = accepted
        it += 1

        logger.debug(
            f"it {it:3d} pcost {pobj: .8e} dcost {dobj: .8e} gap {gap:.2e} "
            f"pres {res_p:.2e} dres {res_d:.2e} sigma {sigma:.2e} step {alpha:.3f}"
        )

    if status != SolveStatus.OPTIMAL:
        x, y, z = best["x"], best["y"], best["z"]
        gap, res_p, res_d = best["gap"], best["res_p"], best["res_d"]
        logger.warning(f"Solve stopped: {status.value} ({message}) after {it} iterations")

    result = SolveResult(
        status=status, x=x, y=y, z=z, gap=gap, res_primal=res_p, res_dual=res_d,
        iterations=it, wall_time=time.perf_counter() - t0,
        primal_objective=float(c @ x), dual_objective=float(b @ y),
        message=message, history=history,
    )
    logger.info(
        f"Solve finished: {status.value} in {it} iterations, gap {gap:.2e}, "
        f"pres {res_p:.2e}, dres {res_d:.2e}, {result.wall_time:.3f}s"
    )
    return result
