"""Local-polytope membership and bounded hidden-variable model search.

``local_membership`` is an exact linear program over the 16 deterministic local
strategies. The bounded searches (``bounded_lhv_search``, ``bounded_lhs_search``) are
bilinear problems attacked by a multistart see-saw of linear programs; a failure to
find a model is evidence, never a proof, and every report says so.
"""
from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linprog

from .algebra import BinaryPovm
from .errors import ConfigError
from .scenario import BITS, Box

FEAS_TOL = 1e-8
NOMODEL_TOL = 1e-6
MIN_RESTARTS_FOR_NOMODEL = 64
WEIGHT_EPS = 1e-12


class Verdict(str, enum.Enum):
    MODEL_FOUND = "ModelFound"
    NO_MODEL_FOUND = "NoModelFound"
    INFEASIBLE = "Infeasible"
    INCONCLUSIVE = "Inconclusive"


class Classification(str, enum.Enum):
    NOT_APPLICABLE_NONLOCAL = "NotApplicableNonlocal"
    SUPERLOCAL = "Superlocal*"
    NOT_SUPERLOCAL = "NotSuperlocal*"
    STEERABLE = "Steerable*"
    SUPERUNSTEERABLE = "Superunsteerable*"
    NOT_SUPERUNSTEERABLE = "NotSuperunsteerable*"
    INCONCLUSIVE = "Inconclusive*"


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 64
    seed: int = 0
    max_sweeps: int = 500
    stall_sweeps: int = 5
    stall_tol: float = 1e-12
    feas_tol: float = FEAS_TOL
    nomodel_tol: float = NOMODEL_TOL
    polygon: int = 64
    threads: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ConfigError("restarts must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.max_sweeps < 1 or self.stall_sweeps < 1:
            raise ConfigError("max_sweeps and stall_sweeps must be >= 1")
        if not 0 < self.feas_tol <= self.nomodel_tol:
            raise ConfigError("need 0 < feas_tol <= nomodel_tol")
        if self.polygon < 4:
            raise ConfigError("polygon must have at least 4 vertices")


def _model_box(weights, alice_resp, bob_resp):
    return np.einsum("l,lxa,lyb->xyab", weights, alice_resp, bob_resp)


@dataclass(frozen=True, eq=False)
class LocalModel:
    """p(a,b|x,y) = sum_l weights[l] alice_resp[l,x,a] bob_resp[l,y,b]."""

    weights: np.ndarray
    alice_resp: np.ndarray
    bob_resp: np.ndarray

    @property
    def dlambda(self) -> int:
        return len(self.weights)

    def reconstruct(self) -> np.ndarray:
        return _model_box(self.weights, self.alice_resp, self.bob_resp)

    def padded(self, dlambda: int) -> "LocalModel":
        extra = dlambda - self.dlambda
        if extra < 0:
            raise ValueError("cannot pad to a smaller hidden-variable dimension")
        uniform = np.full((extra, 2, 2), 0.5)
        return LocalModel(np.r_[self.weights, np.zeros(extra)],
                          np.concatenate([self.alice_resp, uniform]),
                          np.concatenate([self.bob_resp, uniform]))

    def to_dict(self):
        return {"type": "lhv", "dlambda": self.dlambda, "weights": self.weights.tolist(),
                "alice_resp": self.alice_resp.tolist(), "bob_resp": self.bob_resp.tolist()}


@dataclass(frozen=True, eq=False)
class LhsModel:
    """p(a,b|x,y) = sum_l weights[l] alice_resp[l,x,a] Tr(M_{b|y} rho(hidden_states[l]))."""

    weights: np.ndarray
    alice_resp: np.ndarray
    hidden_states: np.ndarray
    bob: tuple

    @property
    def dlambda(self) -> int:
        return len(self.weights)

    def bob_resp(self) -> np.ndarray:
        return _hidden_responses(self.hidden_states, self.bob)

    def reconstruct(self) -> np.ndarray:
        return _model_box(self.weights, self.alice_resp, self.bob_resp())

    def to_dict(self):
        return {"type": "lhs", "dlambda": self.dlambda, "weights": self.weights.tolist(),
                "alice_resp": self.alice_resp.tolist(),
                "hidden_states": self.hidden_states.tolist()}


@dataclass(frozen=True, eq=False)
class ModelSearchReport:
    verdict: Verdict
    residual: float
    dlambda: int | None
    model: LocalModel | LhsModel | None = None
    restarts: int = 0
    iterations: int = 0
    seed: int | None = None
    heuristic: bool = False
    method: str = "lp"

    def to_dict(self):
        return {"method": self.method, "verdict": self.verdict.value, "residual": self.residual,
                "dlambda": self.dlambda, "restarts": self.restarts, "iterations": self.iterations,
                "seed": self.seed, "heuristic": self.heuristic,
                "model": None if self.model is None else self.model.to_dict()}


@dataclass(frozen=True, eq=False)
class CertificationReport:
    classification: Classification
    reports: dict = field(default_factory=dict)

    @property
    def heuristic(self) -> bool:
        return any(r.heuristic for r in self.reports.values())

    def to_dict(self):
        return {"verdict": self.classification.value, "heuristic": self.heuristic,
                "reports": {k: r.to_dict() for k, r in self.reports.items()}}


def l1_distance(p, q) -> float:
    return float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def _l1_fit(columns, target, a_eq, b_eq):
    """min ||columns @ z - target||_1 over z >= 0 with a_eq z = b_eq. Returns (z, value)."""
    m, n = columns.shape
    eye = np.eye(m)
    a_ub = np.block([[columns, -eye], [-columns, -eye]])
    b_ub = np.r_[target, -target]
    a_eq_full = np.hstack([a_eq, np.zeros((a_eq.shape[0], m))])
    cost = np.r_[np.zeros(n), np.ones(m)]
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq_full, b_eq=b_eq,
                  bounds=(0, None), method="highs-ds")
    if res.status != 0:
        raise RuntimeError(f"linear program failed: {res.message}")
    return np.clip(res.x[:n], 0, None), float(res.fun)


def deterministic_strategies():
    """The 16 local deterministic boxes as (alice_resp, bob_resp) pairs, each 2x2 one-hot."""
    out = []
    for a0, a1, b0, b1 in itertools.product(BITS, repeat=4):
        alice = np.zeros((2, 2))
        bob = np.zeros((2, 2))
        alice[0, a0] = alice[1, a1] = 1
        bob[0, b0] = bob[1, b1] = 1
        out.append((alice, bob))
    return out


_DET = deterministic_strategies()
_DET_COLUMNS = np.stack([np.einsum("xa,yb->xyab", a, b).ravel() for a, b in _DET], axis=1)


def local_membership(box: Box) -> ModelSearchReport:
    """Exact LP: L1 distance from ``box`` to the local polytope, with a model when it is zero."""
    target = box.p.ravel()
    w, dist = _l1_fit(_DET_COLUMNS, target, np.ones((1, 16)), np.array([1.0]))
    keep = np.flatnonzero(w > WEIGHT_EPS)
    weights = w[keep] / w[keep].sum()
    model = LocalModel(weights, np.stack([_DET[k][0] for k in keep]),
                       np.stack([_DET[k][1] for k in keep]))
    residual = l1_distance(model.reconstruct(), box.p)
    if max(dist, residual) > FEAS_TOL:
        return ModelSearchReport(Verdict.INFEASIBLE, max(dist, residual), None, None)
    return ModelSearchReport(Verdict.MODEL_FOUND, residual, model.dlambda, model)


# --- see-saw -------------------------------------------------------------------------


def _free_alice_columns(bob_resp):
    """Columns for q[l,x,a] (subnormalized Alice) with Bob's responses fixed."""
    d = len(bob_resp)
    cols = np.zeros((2, 2, 2, 2, d, 2, 2))
    for x, a in itertools.product(BITS, BITS):
        cols[x, :, a, :, :, x, a] = np.transpose(bob_resp, (1, 2, 0))
    return cols.reshape(16, d * 4)


def _free_bob_columns(alice_resp):
    d = len(alice_resp)
    cols = np.zeros((2, 2, 2, 2, d, 2, 2))
    for y, b in itertools.product(BITS, BITS):
        cols[:, y, :, b, :, y, b] = np.transpose(alice_resp, (1, 2, 0))
    return cols.reshape(16, d * 4)


def _subnormalized_constraints(d):
    """sum_o q[l,s,o] = w_l for both settings and sum_l w_l = 1, with w appended to q."""
    rows = []
    for lam, s in itertools.product(range(d), BITS):
        row = np.zeros(5 * d)
        row[lam * 4 + s * 2: lam * 4 + s * 2 + 2] = 1
        row[4 * d + lam] = -1
        rows.append(row)
    total = np.zeros(5 * d)
    total[4 * d:] = 1
    rows.append(total)
    b = np.zeros(len(rows))
    b[-1] = 1
    return np.array(rows), b


def _normalize_responses(q, weights, previous):
    resp = previous.copy()
    for lam, w in enumerate(weights):
        if w > WEIGHT_EPS:
            resp[lam] = q[lam] / q[lam].sum(axis=1, keepdims=True)
    return np.clip(resp, 0, 1)


def _solve_side(columns, target, d, previous):
    a_eq, b_eq = _subnormalized_constraints(d)
    cols = np.hstack([columns, np.zeros((16, d))])
    z, _ = _l1_fit(cols, target, a_eq, b_eq)
    q = z[:4 * d].reshape(d, 2, 2)
    weights = z[4 * d:]
    weights = weights / weights.sum()
    return weights, _normalize_responses(q, weights, previous)


def _hidden_responses(hidden, bob):
    """Bob's p(b|y; rho_l) for hidden Bloch vectors ``hidden`` [l, 3]."""
    out = np.empty((len(hidden), 2, 2))
    for y, m in enumerate(bob):
        p0 = m.gamma0 + 0.5 * m.eta * hidden @ m.u
        out[:, y, 0] = p0
        out[:, y, 1] = 1 - p0
    return np.clip(out, 0, 1)


def _measurement_plane(bob):
    """Orthonormal basis of the span of Bob's (nontrivial) measurement directions."""
    vecs = np.array([m.u for m in bob if m.eta > WEIGHT_EPS])
    if len(vecs) == 0:
        return np.zeros((0, 3))
    _, s, vt = np.linalg.svd(vecs)
    rank = int(np.sum(s > 1e-9))
    return vt[:rank]


def hidden_state_polygon(bob, vertices=64) -> np.ndarray:
    """Unit Bloch vectors whose convex hull is an inscribed polygon of the disk that
    matters for Bob's measurements (a segment or the origin in degenerate cases)."""
    basis = _measurement_plane(bob)
    if len(basis) == 0:
        return np.zeros((1, 3))
    if len(basis) == 1:
        return np.stack([basis[0], -basis[0]])
    theta = 2 * np.pi * np.arange(vertices) / vertices
    return np.outer(np.cos(theta), basis[0]) + np.outer(np.sin(theta), basis[1])


def _solve_hidden_states(alice_resp, target, polygon_states, polygon_resp, previous):
    """Bob step of the LHS see-saw: convex weights s[l,k] on polygon hidden states."""
    d, k = len(alice_resp), len(polygon_states)
    cols = np.einsum("lxa,kyb->xyablk", alice_resp, polygon_resp).reshape(16, d * k)
    z, _ = _l1_fit(cols, target, np.ones((1, d * k)), np.array([1.0]))
    s = z.reshape(d, k)
    weights = s.sum(axis=1)
    hidden = previous.copy()
    for lam in range(d):
        if weights[lam] > WEIGHT_EPS:
            hidden[lam] = s[lam] @ polygon_states / weights[lam]
    norms = np.linalg.norm(hidden, axis=1, keepdims=True)
    hidden = np.where(norms > 1, hidden / np.maximum(norms, 1), hidden)
    return weights / weights.sum(), hidden


def _uniform_ball(rng, n):
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * rng.uniform(size=(n, 1)) ** (1 / 3)


def _random_responses(rng, d):
    p0 = rng.uniform(size=(d, 2))
    return np.stack([p0, 1 - p0], axis=-1)


@dataclass
class _RestartResult:
    index: int
    residual: float
    model: object
    sweeps: int


def _seesaw(step, residual_of, state, cfg):
    """Alternate ``step`` until converged; returns (state, residual, sweeps)."""
    best_state, best = state, residual_of(state)
    history = [best]
    sweeps = 0
    while sweeps < cfg.max_sweeps and best > cfg.feas_tol:
        state = step(state)
        sweeps += 1
        r = residual_of(state)
        if r < best:
            best_state, best = state, r
        history.append(best)
        if len(history) > cfg.stall_sweeps and history[-1 - cfg.stall_sweeps] - best < cfg.stall_tol:
            break
    return best_state, best, sweeps


def _lhv_restart(target, d, cfg, index, seed_seq):
    rng = np.random.default_rng(seed_seq)
    weights = rng.dirichlet(np.ones(d))
    state = (weights, _random_responses(rng, d), _random_responses(rng, d))
    flat = target.ravel()

    def step(s):
        w, alice, bob = s
        w, alice = _solve_side(_free_alice_columns(bob), flat, d, alice)
        w, bob = _solve_side(_free_bob_columns(alice), flat, d, bob)
        return w, alice, bob

    def residual_of(s):
        return l1_distance(_model_box(*s), target)

    (w, alice, bob), res, sweeps = _seesaw(step, residual_of, state, cfg)
    return _RestartResult(index, res, LocalModel(w, alice, bob), sweeps)


def _lhs_restart(target, bob_meas, d, cfg, index, seed_seq):
    rng = np.random.default_rng(seed_seq)
    weights = rng.dirichlet(np.ones(d))
    state = (weights, _random_responses(rng, d), _uniform_ball(rng, d))
    flat = target.ravel()
    poly = hidden_state_polygon(bob_meas, cfg.polygon)
    poly_resp = _hidden_responses(poly, bob_meas)

    def step(s):
        w, alice, hidden = s
        w, alice = _solve_side(_free_alice_columns(_hidden_responses(hidden, bob_meas)),
                               flat, d, alice)
        w, hidden = _solve_hidden_states(alice, flat, poly, poly_resp, hidden)
        return w, alice, hidden

    def residual_of(s):
        w, alice, hidden = s
        return l1_distance(_model_box(w, alice, _hidden_responses(hidden, bob_meas)), target)

    (w, alice, hidden), res, sweeps = _seesaw(step, residual_of, state, cfg)
    return _RestartResult(index, res, LhsModel(w, alice, hidden, tuple(bob_meas)), sweeps)


def _check_dlambda(dlambda):
    if isinstance(dlambda, bool) or not isinstance(dlambda, (int, np.integer)) or not 1 <= dlambda <= 4:
        raise ConfigError(f"dlambda must be an integer in 1..4, got {dlambda!r}")
    return int(dlambda)


def _multistart(run_one, dlambda, cfg, method):
    """Run restarts in index order (batched over threads); stop at the first success.

    The returned report depends only on (inputs, cfg.seed, cfg.restarts), never on
    cfg.threads: successes are resolved by lowest restart index, failures by
    (residual, index).
    """
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    results = []
    winner = None
    pool = ThreadPoolExecutor(cfg.threads) if cfg.threads > 1 else None
    try:
        for start in range(0, cfg.restarts, cfg.threads):
            idx = range(start, min(start + cfg.threads, cfg.restarts))
            if pool is None:
                batch = [run_one(i, seeds[i]) for i in idx]
            else:
                batch = list(pool.map(lambda i: run_one(i, seeds[i]), idx))
            results.extend(batch)
            found = [r for r in batch if r.residual <= cfg.feas_tol]
            if found:
                winner = min(found, key=lambda r: r.index)
                break
    finally:
        if pool is not None:
            pool.shutdown()
    if winner is not None:
        return ModelSearchReport(Verdict.MODEL_FOUND, winner.residual, dlambda, winner.model,
                                 restarts=winner.index + 1, iterations=winner.sweeps,
                                 seed=cfg.seed, heuristic=True, method=method)
    best = min(results, key=lambda r: (r.residual, r.index))
    conclusive = len(results) >= MIN_RESTARTS_FOR_NOMODEL and best.residual > cfg.nomodel_tol
    verdict = Verdict.NO_MODEL_FOUND if conclusive else Verdict.INCONCLUSIVE
    return ModelSearchReport(verdict, best.residual, dlambda, best.model, restarts=len(results),
                             iterations=best.sweeps, seed=cfg.seed, heuristic=True, method=method)


def bounded_lhv_search(box: Box, dlambda: int, cfg: SearchConfig | None = None) -> ModelSearchReport:
    """Look for p = sum_l p_l p(a|x,l) p(b|y,l) with at most ``dlambda`` hidden values."""
    cfg = cfg or SearchConfig()
    d = _check_dlambda(dlambda)
    target = np.asarray(box.p)
    return _multistart(lambda i, s: _lhv_restart(target, d, cfg, i, s), d, cfg, "lhv-seesaw")


def bounded_lhs_search(box: Box, bob_meas, dlambda: int,
                       cfg: SearchConfig | None = None) -> ModelSearchReport:
    """Look for p = sum_l p_l p(a|x,l) Tr(M_{b|y} rho_l) with at most ``dlambda`` hidden states."""
    cfg = cfg or SearchConfig()
    d = _check_dlambda(dlambda)
    bob_meas = tuple(bob_meas)
    if len(bob_meas) != 2 or not all(isinstance(m, BinaryPovm) for m in bob_meas):
        raise ConfigError("bounded_lhs_search needs Bob's two BinaryPovm measurements")
    target = np.asarray(box.p)
    return _multistart(lambda i, s: _lhs_restart(target, bob_meas, d, cfg, i, s), d, cfg,
                       "lhs-seesaw")


def _from_search(report, yes, no):
    if report.verdict is Verdict.NO_MODEL_FOUND:
        return yes
    if report.verdict is Verdict.MODEL_FOUND:
        return no
    return Classification.INCONCLUSIVE


def superlocality_verdict(box: Box, d_a: int = 2, cfg: SearchConfig | None = None,
                          d_b: int = 2) -> CertificationReport:
    local = local_membership(box)
    if local.verdict is Verdict.INFEASIBLE:
        return CertificationReport(Classification.NOT_APPLICABLE_NONLOCAL, {"local": local})
    lhv = bounded_lhv_search(box, min(d_a, d_b), cfg)
    return CertificationReport(
        _from_search(lhv, Classification.SUPERLOCAL, Classification.NOT_SUPERLOCAL),
        {"local": local, "lhv": lhv})


def superunsteerability_verdict(box: Box, bob_meas, d_a: int = 2,
                                cfg: SearchConfig | None = None) -> CertificationReport:
    full = bounded_lhs_search(box, bob_meas, 4, cfg)
    reports = {"lhs_4": full}
    if full.verdict is Verdict.NO_MODEL_FOUND:
        return CertificationReport(Classification.STEERABLE, reports)
    if full.verdict is Verdict.INCONCLUSIVE:
        return CertificationReport(Classification.INCONCLUSIVE, reports)
    bounded = bounded_lhs_search(box, bob_meas, d_a, cfg)
    reports[f"lhs_{d_a}"] = bounded
    return CertificationReport(
        _from_search(bounded, Classification.SUPERUNSTEERABLE, Classification.NOT_SUPERUNSTEERABLE),
        reports)
