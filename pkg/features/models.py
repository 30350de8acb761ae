"""models: localization cone programs and solution readers

Responsibilities:
- Translate a MeasurementGraph into the Biswas-Ye, least-squares and
  mean/variance (QP) cone programs
- Read estimated positions and per-edge squared-distance errors back out of
  a solve result

Every builder starts from

    Z        PSD(n+2)    svec of [[I2, X], [X', Y]], sensor i at index 2+i

with rows 0..2 pinning the top-left block to I2 and rows 3..3+v-1 the edge
rows

    <q q', Z> - error_e = d_hat_e^2

where error_e is the model squared distance minus the measured one. How
error_e is carried depends on the objective:

    biswas-ye   alpha NonNeg(2v), error = alpha_plus - alpha_minus
    ls          soc SOC(v+1), error = tail of the cone
    qp          soc1 SOC(v+1) with tail u = error + w, w = mean(error)
    qp-gamma    soc1 SOC(v+1) with tail u = error + 1/(2 gamma)

A costless alpha_plus / alpha_minus split leaves the dual without an
interior point, so only the l1 model, which prices both halves, uses it.
The affine map from x to the errors is stored on the model.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sps

from conic.program import ConeBlock, ConeProgram, ProgramBuilder
from conic.solver import SolveResult, SolveStatus
from conic.svec import SQRT2, smat, svec_index
from type_defs import MeasurementGraph, Point2, points_from_array
from utils.errors import BadStatus, ConfigError, EmptyGraph
from utils.logger import get_logger

logger = get_logger("features.models")

BISWAS_YE = "biswas-ye"
LEAST_SQUARES = "ls"
PROPOSED_QP = "qp"
PROPOSED_QP_GAMMA = "qp-gamma"
OBJECTIVE_LABELS = (BISWAS_YE, LEAST_SQUARES, PROPOSED_QP, PROPOSED_QP_GAMMA)
MEAN_SHIFT = "mean"


@dataclass(frozen=True)
class ObjectiveKind:
    """Which localization objective to build; gamma only for qp-gamma"""

    label: str
    gamma: Optional[float] = None

    def __post_init__(self):
        if self.label not in OBJECTIVE_LABELS:
            raise ConfigError(f"unknown objective '{self.label}' (expected one of {list(OBJECTIVE_LABELS)})")
        if self.label == PROPOSED_QP_GAMMA:
            if not isinstance(self.gamma, (int, float)) or not math.isfinite(self.gamma) or self.gamma <= 0:
                raise ConfigError(f"objective qp-gamma needs gamma > 0 (got {self.gamma!r})")
        elif self.gamma is not None:
            raise ConfigError(f"objective '{self.label}' takes no gamma")

    @classmethod
    def parse(cls, label: str, gamma: Optional[float] = None) -> "ObjectiveKind":
        return cls(str(label).strip().lower(), None if gamma is None else float(gamma))

    def __str__(self) -> str:
        return self.label


class EdgeRef(NamedTuple):
    """One measured pair: kind "sensor" (a=i, b=j) or "anchor" (a=j, b=k)"""
    kind: str
    a: int
    b: int
    d_hat: float


def edge_order(g: MeasurementGraph) -> Tuple[EdgeRef, ...]:
    """Canonical edge order: sensor edges as given, then anchor edges"""
    return tuple(
        [EdgeRef("sensor", e.i, e.j, e.d_hat) for e in g.sensor_edges]
        + [EdgeRef("anchor", e.j, e.k, e.d_hat) for e in g.anchor_edges]
    )


@dataclass(frozen=True, eq=False)
class LocalizationModel:
    objective: ObjectiveKind
    graph: MeasurementGraph
    program: ConeProgram
    z_block: Tuple[int, int]
    side: int
    edge_order: Tuple[EdgeRef, ...]
    localization_rows: int
    error_map: sps.csr_matrix
    error_offset: np.ndarray
    alpha_plus: Tuple[int, ...] = ()
    alpha_minus: Tuple[int, ...] = ()
    linking_rows: int = 0
    bound_rows: int = 0
    aux: Dict[str, int] = field(default_factory=dict)

    @property
    def v(self) -> int:
        return len(self.edge_order)


@dataclass(frozen=True, eq=False)
class EstimatedPositions:
    x_hat: Tuple[Point2, ...]
    y_block: np.ndarray

    @property
    def n(self) -> int:
        return len(self.x_hat)

    def array(self) -> np.ndarray:
        return np.array([p.as_tuple() for p in self.x_hat], dtype=float).reshape(-1, 2)


def _quadratic_terms(z0: int, side: int, q: Dict[int, float]) -> Tuple[List[int], List[float]]:
    """Columns and coefficients of <q q', Z> over the svec slots of Z"""
    cols, vals = [], []
    idx = sorted(q)
    for p, a in enumerate(idx):
        for b in idx[p:]:
            coef = q[a] * q[b] * (1.0 if a == b else SQRT2)
            if coef != 0.0:
                cols.append(z0 + svec_index(side, a, b))
                vals.append(coef)
    return cols, vals


def _edge_vector(ref: EdgeRef, anchors: np.ndarray) -> Dict[int, float]:
    if ref.kind == "sensor":
        return {2 + ref.a: 1.0, 2 + ref.b: -1.0}
    ax, ay = anchors[ref.b]
    return {0: float(ax), 1: float(ay), 2 + ref.a: -1.0}


@dataclass
class _ErrorTerms:
    """error_e = vals[e] . x[cols[e]] + offset[e]"""

    cols: List[List[int]]
    vals: List[List[float]]
    offset: np.ndarray
    block: Tuple[int, int]

    def matrix(self, num_vars: int) -> sps.csr_matrix:
        indptr = np.cumsum([0] + [len(c) for c in self.cols])
        return sps.csr_matrix(
            (np.concatenate(self.vals), np.concatenate(self.cols).astype(int), indptr),
            shape=(len(self.cols), num_vars),
        )


@dataclass
class _Skeleton:
    builder: ProgramBuilder
    side: int
    z0: int
    edges: Tuple[EdgeRef, ...]
    terms: _ErrorTerms
    bound_rows: int

    @property
    def v(self) -> int:
        return len(self.edges)


def _non_edges(g: MeasurementGraph) -> List[EdgeRef]:
    """Pairs without a measurement that are known to be farther than r

    Sensor pairs dropped by a degree cap were in range, so they are skipped.
    """
    skip = {(e.i, e.j) for e in g.sensor_edges} | {tuple(sorted(p)) for p in g.pruned_pairs}
    anchor_pairs = {(e.j, e.k) for e in g.anchor_edges}
    out = [
        EdgeRef("sensor", i, j, g.radio_range)
        for i in range(g.n) for j in range(i + 1, g.n) if (i, j) not in skip
    ]
    out += [
        EdgeRef("anchor", j, k, g.radio_range)
        for j in range(g.n) for k in range(g.m) if (j, k) not in anchor_pairs
    ]
    return out


ErrorBlocks = Callable[[ProgramBuilder, int], _ErrorTerms]


def _skeleton(g: MeasurementGraph, include_range_lower_bounds: bool, error_blocks: ErrorBlocks) -> _Skeleton:
    """Z, the error-carrying blocks, the anchoring rows and the edge rows"""
    edges = edge_order(g)
    if not edges:
        raise EmptyGraph("measurement graph has no edges")
    v = len(edges)
    side = g.n + 2
    anchors = g.anchor_array()

    pb = ProgramBuilder()
    z0 = pb.add_block("Z", ConeBlock.psd(side))
    terms = error_blocks(pb, v)

    # Top-left block of Z is I2
    pb.add_row([z0 + svec_index(side, 0, 0)], [1.0], 1.0)
    pb.add_row([z0 + svec_index(side, 1, 1)], [1.0], 1.0)
    pb.add_row([z0 + svec_index(side, 0, 1)], [SQRT2 / 2.0], 0.0)

    for e, ref in enumerate(edges):
        cols, vals = _quadratic_terms(z0, side, _edge_vector(ref, anchors))
        pb.add_row(cols + terms.cols[e], vals + [-c for c in terms.vals[e]],
                   ref.d_hat ** 2 + float(terms.offset[e]))

    bound_rows = 0
    if include_range_lower_bounds:
        far = _non_edges(g)
        if far:
            b0 = pb.add_block("range_slack", ConeBlock.nonneg(len(far)))
            for idx, ref in enumerate(far):
                cols, vals = _quadratic_terms(z0, side, _edge_vector(ref, anchors))
                pb.add_row(cols + [b0 + idx], vals + [-1.0], ref.d_hat ** 2)
            bound_rows = len(far)

    return _Skeleton(pb, side, z0, edges, terms, bound_rows)


def _split_errors(pb: ProgramBuilder, v: int) -> _ErrorTerms:
    a0 = pb.add_block("alpha", ConeBlock.nonneg(2 * v))
    pb.name_range("alpha_plus", a0, a0 + v)
    pb.name_range("alpha_minus", a0 + v, a0 + 2 * v)
    return _ErrorTerms([[a0 + e, a0 + v + e] for e in range(v)], [[1.0, -1.0]] * v, np.zeros(v), (a0, a0 + 2 * v))


def _soc_tail_errors(name: str, shift: Union[None, str, float] = None) -> ErrorBlocks:
    """One SOC(v+1) whose tail u carries the errors

    shift None: u is the error itself. MEAN_SHIFT: u = error + mean(error),
    so error = u - mean(u)/2. A number c: u = error + c.
    """
    def add(pb: ProgramBuilder, v: int) -> _ErrorTerms:
        s = pb.add_block(name, ConeBlock.second_order(v + 1))
        tail = list(range(s + 1, s + 1 + v))
        if shift == MEAN_SHIFT:
            k = 1.0 / (2.0 * v)
            vals = [[(1.0 if l == e else 0.0) - k for l in range(v)] for e in range(v)]
            return _ErrorTerms([tail] * v, vals, np.zeros(v), (s, s + v + 1))
        offset = np.zeros(v) if shift is None else np.full(v, -float(shift))
        return _ErrorTerms([[c] for c in tail], [[1.0]] * v, offset, (s, s + v + 1))
    return add


def _epigraph(pb: ProgramBuilder, name: str, s_col: int) -> int:
    """[[1, s], [s, t]] >= 0 as a PSD(2) block; returns the column of t"""
    off = pb.add_block(name, ConeBlock.psd(2))
    pb.add_row([off], [1.0], 1.0)
    pb.add_row([off + 1, s_col], [1.0 / SQRT2, -1.0], 0.0)
    return off + 2


def _finish(objective: ObjectiveKind, g: MeasurementGraph, sk: _Skeleton,
            linking_rows: int, aux: Dict[str, int]) -> LocalizationModel:
    program = sk.builder.build()
    model = LocalizationModel(
        objective=objective,
        graph=g,
        program=program,
        z_block=program.names["Z"],
        side=sk.side,
        edge_order=sk.edges,
        localization_rows=3 + sk.v,
        error_map=sk.terms.matrix(program.num_vars),
        error_offset=sk.terms.offset.copy(),
        alpha_plus=tuple(range(*program.names["alpha_plus"])) if "alpha_plus" in program.names else (),
        alpha_minus=tuple(range(*program.names["alpha_minus"])) if "alpha_minus" in program.names else (),
        linking_rows=linking_rows,
        bound_rows=sk.bound_rows,
        aux=aux,
    )
    logger.debug(
        f"Built {objective} model: side={sk.side} v={sk.v} vars={program.num_vars} "
        f"rows={program.num_rows} blocks={[str(b) for b in program.blocks]}"
    )
    return model


def build_biswas_ye(g: MeasurementGraph, include_range_lower_bounds: bool = False) -> LocalizationModel:
    """l1 model: minimize sum(alpha_plus + alpha_minus)"""
    sk = _skeleton(g, include_range_lower_bounds, _split_errors)
    for col in range(*sk.terms.block):
        sk.builder.add_objective(col, 1.0)
    return _finish(ObjectiveKind(BISWAS_YE), g, sk, 0, {})


def build_least_squares(g: MeasurementGraph, squared: bool = False,
                        include_range_lower_bounds: bool = False) -> LocalizationModel:
    """Least-squares model: minimize s with ||errors|| <= s

    With squared=True the objective is t >= s^2 through a PSD(2) epigraph,
    which has the same minimizers.
    """
    sk = _skeleton(g, include_range_lower_bounds, _soc_tail_errors("soc"))
    pb = sk.builder
    s = sk.terms.block[0]
    aux = {"s": s}
    linking = 0

    if squared:
        t = _epigraph(pb, "epi", s)
        pb.add_objective(t, 1.0)
        aux["t"] = t
        linking += 2
    else:
        pb.add_objective(s, 1.0)
    return _finish(ObjectiveKind(LEAST_SQUARES), g, sk, linking, aux)


def _proposed(g: MeasurementGraph, objective: ObjectiveKind,
              include_range_lower_bounds: bool) -> LocalizationModel:
    shift = MEAN_SHIFT if objective.gamma is None else 1.0 / (2.0 * objective.gamma)
    sk = _skeleton(g, include_range_lower_bounds, _soc_tail_errors("soc1", shift))
    pb, v, terms = sk.builder, sk.v, sk.terms
    s1 = terms.block[0]
    tail = slice(s1 + 1, s1 + 1 + v)

    # ||error - v w|| <= s2 with v w = sum(error) written in soc1's tail
    E = terms.matrix(pb.num_vars)[:, tail].toarray()
    total, total_offset = E.sum(axis=0), float(terms.offset.sum())
    s2 = pb.add_block("soc2", ConeBlock.second_order(v + 1))
    for e in range(v):
        coef = total - E[e]
        nz = np.flatnonzero(coef)
        pb.add_row([s2 + 1 + e] + [s1 + 1 + int(l) for l in nz], [1.0] + coef[nz].tolist(),
                   float(terms.offset[e]) - total_offset)

    t1 = _epigraph(pb, "epi1", s1)
    t2 = _epigraph(pb, "epi2", s2)
    pb.add_objective(t1, float(v))
    pb.add_objective(t2, 1.0)

    aux = {"s1": s1, "s2": s2, "t1": t1, "t2": t2}
    return _finish(objective, g, sk, v + 4, aux)


def build_proposed_qp(g: MeasurementGraph, include_range_lower_bounds: bool = False) -> LocalizationModel:
    """Mean/variance model: minimize v*||e + w||^2 + ||e - v*w||^2, w = mean(e)"""
    return _proposed(g, ObjectiveKind(PROPOSED_QP), include_range_lower_bounds)


def build_proposed_qp_gamma(g: MeasurementGraph, gamma: float,
                            include_range_lower_bounds: bool = False) -> LocalizationModel:
    """As build_proposed_qp with the first shift fixed at 1/(2 gamma)"""
    return _proposed(g, ObjectiveKind(PROPOSED_QP_GAMMA, gamma), include_range_lower_bounds)


def build_model(g: MeasurementGraph, objective: ObjectiveKind,
                include_range_lower_bounds: bool = False) -> LocalizationModel:
    if objective.label == BISWAS_YE:
        return build_biswas_ye(g, include_range_lower_bounds)
    if objective.label == LEAST_SQUARES:
        return build_least_squares(g, include_range_lower_bounds=include_range_lower_bounds)
    if objective.label == PROPOSED_QP:
        return build_proposed_qp(g, include_range_lower_bounds)
    return build_proposed_qp_gamma(g, objective.gamma, include_range_lower_bounds)


def _check_status(result: SolveResult) -> None:
    if not result.ok:
        raise BadStatus(f"cannot read a solution with status {result.status.value}: {result.message}")


def z_matrix(model: LocalizationModel, result: SolveResult) -> np.ndarray:
    lo, hi = model.z_block
    return smat(result.x[lo:hi])


def extract_positions(model: LocalizationModel, result: SolveResult) -> EstimatedPositions:
    _check_status(result)
    Z = z_matrix(model, result)
    X = Z[0:2, 2:].T
    Y = Z[2:, 2:]
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        raise BadStatus("solution holds non-finite position entries")
    return EstimatedPositions(x_hat=points_from_array(X), y_block=Y.copy())


def errors_from_z(model: LocalizationModel, Z: np.ndarray) -> np.ndarray:
    """Quadratic form minus d_hat^2 per edge, read from Z directly"""
    anchors = model.graph.anchor_array()
    out = np.empty(model.v)
    for e, ref in enumerate(model.edge_order):
        i, j = 2 + ref.a, 2 + ref.b
        if ref.kind == "sensor":
            quad = Z[i, i] + Z[j, j] - 2.0 * Z[i, j]
        else:
            a = anchors[ref.b]
            quad = float(a @ a) - 2.0 * float(a @ Z[0:2, i]) + Z[i, i]
        out[e] = quad - ref.d_hat ** 2
    return out


def _error_vector(model: LocalizationModel, x: np.ndarray) -> np.ndarray:
    return np.asarray(model.error_map @ x).ravel() + model.error_offset


def extract_errors(model: LocalizationModel, result: SolveResult, tol_feas: float = 1e-7) -> np.ndarray:
    """Signed squared-distance errors in edge order, read from the error variables

    The same quantity is recomputed from Z; on an Optimal result both must
    agree to within the feasibility tolerance of the edge rows.
    """
    _check_status(result)
    errors = _error_vector(model, result.x)
    from_z = errors_from_z(model, z_matrix(model, result))

    if result.status == SolveStatus.OPTIMAL:
        bound = 10.0 * tol_feas * (1.0 + float(np.linalg.norm(model.program.rhs())))
        worst = float(np.max(np.abs(errors - from_z))) if errors.size else 0.0
        if worst > bound:
            raise BadStatus(f"error variables and Z disagree by {worst:.3e} (bound {bound:.3e})")
    else:
        logger.debug(f"Reading errors from a {result.status.value} result; agreement not enforced")
    return errors


def mean_shift(model: LocalizationModel, result: SolveResult) -> float:
    """w of a QP solution: soc1's tail is errors + w"""
    if model.objective.label != PROPOSED_QP:
        raise KeyError(f"objective {model.objective} has no mean variable")
    s1 = model.aux["s1"]
    u = result.x[s1 + 1:s1 + 1 + model.v]
    return float(np.mean(u - _error_vector(model, result.x)))
