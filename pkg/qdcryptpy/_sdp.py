# -*- coding: utf-8 -*-
"""
Small dense semidefinite-program solver.

Problems are posed over complex Hermitian (block-diagonal) variables,

    minimize / maximize   Tr(C X)
    subject to            Tr(A_i X) = b_i,  Tr(C_j X) <= d_j,
                          Tr_traced(X) = target        (optional),
                          X >= 0,

and solved with an infeasible-start primal-dual interior-point method
(Mehrotra predictor-corrector, Nesterov-Todd scaling) on the real
symmetric embedding X -> [[Re X, -Im X], [Im X, Re X]].
Inequalities become 1x1 slack blocks; the dual vector certifies the value.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg as sla

from qdcryptpy._numlin import as_hermitian, hermitian_basis

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-8
GAP_TOL = 1e-7
MAX_ITERATIONS = 500
DIVERGENCE = 1e10
STEP_FRACTION = 0.98

SOLVED = "solved"
INFEASIBLE = "infeasible"
MAX_ITER = "max_iterations"


@dataclass
class PartialTraceConstraint:
    """Tr over one factor of ``dims = (d0, d1)`` equals ``target``.

    ``keep`` is the surviving factor (0 or 1); the target lives on it.
    """
    dims: Tuple[int, int]
    keep: int
    target: np.ndarray

    def expand(self) -> List[Tuple[np.ndarray, float]]:
        d0, d1 = self.dims
        dk, dt = (d0, d1) if self.keep == 0 else (d1, d0)
        target = as_hermitian(self.target)
        if target.shape != (dk, dk):
            raise ValueError(f"partial trace target has shape {target.shape}, expected {(dk, dk)}")
        eye = np.eye(dt)
        out = []
        for h in hermitian_basis(dk):
            a = np.kron(h, eye) if self.keep == 0 else np.kron(eye, h)
            out.append((a, float(np.real(np.trace(target @ h)))))
        return out


@dataclass
class SdpProblem:
    objective: np.ndarray
    eq_constraints: List[Tuple[np.ndarray, float]] = field(default_factory=list)
    ineq_constraints: List[Tuple[np.ndarray, float]] = field(default_factory=list)
    partial_trace_eq: Optional[PartialTraceConstraint] = None
    sense: str = "minimize"
    # variable is block diagonal with these Hermitian blocks; None means one block
    block_sizes: Optional[Sequence[int]] = None

    def __post_init__(self):
        self.objective = as_hermitian(self.objective)
        n = self.dim
        if self.sense not in ("minimize", "maximize"):
            raise ValueError(f"sense must be minimize or maximize, got {self.sense!r}")
        for name, cons in (("equality", self.eq_constraints), ("inequality", self.ineq_constraints)):
            for i, (a, _) in enumerate(cons):
                if np.shape(a) != (n, n):
                    raise ValueError(f"{name} constraint {i} has shape {np.shape(a)}, variable is {n}x{n}")
        if self.partial_trace_eq is not None:
            d0, d1 = self.partial_trace_eq.dims
            if d0 * d1 != n:
                raise ValueError(f"partial trace dims {self.partial_trace_eq.dims} do not divide dim {n}")
        if self.block_sizes is not None:
            if sum(self.block_sizes) != n or min(self.block_sizes) < 1:
                raise ValueError(f"block sizes {list(self.block_sizes)} do not add up to {n}")

    @property
    def dim(self) -> int:
        return self.objective.shape[0]


@dataclass
class SdpSolution:
    X: np.ndarray
    primal_value: float
    dual_value: float
    gap: float
    status: str
    iterations: int = 0
    y: Optional[np.ndarray] = None
    primal_residual: float = float("nan")
    dual_residual: float = float("nan")

    @property
    def solved(self) -> bool:
        return self.status == SOLVED


def _embed(a: np.ndarray) -> np.ndarray:
    re, im = a.real, a.imag
    return np.block([[re, -im], [im, re]])


def _unembed(x: np.ndarray) -> np.ndarray:
    k = x.shape[0] // 2
    re = (x[:k, :k] + x[k:, k:]) / 2
    im = (x[k:, :k] - x[:k, k:]) / 2
    return re + 1j * im


def _sym(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2


def _max_step(chol_lower: np.ndarray, d: np.ndarray) -> float:
    """Largest a with chol chol^T + a d still PSD."""
    li = sla.solve_triangular(chol_lower, np.eye(chol_lower.shape[0]), lower=True)
    w = np.linalg.eigvalsh(_sym(li @ d @ li.T))
    return np.inf if w[0] >= 0 else -1.0 / w[0]


def _max_step_lp(x: np.ndarray, dx: np.ndarray) -> float:
    neg = dx < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-x[neg] / dx[neg]))


class _RealForm:
    """The embedded real problem: SDP blocks plus one LP block of slacks."""

    def __init__(self, problem: SdpProblem):
        sizes = list(problem.block_sizes) if problem.block_sizes is not None else [problem.dim]
        offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
        eqs = list(problem.eq_constraints)
        if problem.partial_trace_eq is not None:
            eqs.extend(problem.partial_trace_eq.expand())
        ineqs = list(problem.ineq_constraints)
        sign = 1.0 if problem.sense == "minimize" else -1.0
        rows = [as_hermitian(a) for a, _ in eqs] + [as_hermitian(a) for a, _ in ineqs]
        self.m = len(rows)
        self.n_lp = len(ineqs)
        self.b = np.array([float(v) for _, v in eqs] + [float(v) for _, v in ineqs])
        self.sizes = sizes
        self.offsets = offsets
        self.C = []
        self.A = []
        for k, (lo, hi) in enumerate(zip(offsets[:-1], offsets[1:])):
            self.C.append(sign * 0.5 * _embed(problem.objective[lo:hi, lo:hi]))
            stack = np.empty((self.m, 2 * (hi - lo), 2 * (hi - lo)))
            for i, a in enumerate(rows):
                stack[i] = 0.5 * _embed(a[lo:hi, lo:hi])
            self.A.append(stack)
        self.A_lp = np.zeros((self.m, self.n_lp))
        for j in range(self.n_lp):
            self.A_lp[len(eqs) + j, j] = 1.0
        self.n_total = sum(2 * s for s in sizes) + self.n_lp
        self.sign = sign

    def op(self, xs: List[np.ndarray], x_lp: np.ndarray) -> np.ndarray:
        out = self.A_lp @ x_lp
        for a, x in zip(self.A, xs):
            out = out + np.tensordot(a, x, axes=([1, 2], [0, 1]))
        return out

    def adj(self, y: np.ndarray) -> Tuple[List[np.ndarray], np.ndarray]:
        return [np.tensordot(y, a, axes=1) for a in self.A], self.A_lp.T @ y

    def to_complex(self, xs: List[np.ndarray]) -> np.ndarray:
        n = int(self.offsets[-1])
        out = np.zeros((n, n), dtype=complex)
        for x, lo, hi in zip(xs, self.offsets[:-1], self.offsets[1:]):
            out[lo:hi, lo:hi] = _unembed(x)
        return (out + out.conj().T) / 2


def sdp_solve(problem: SdpProblem, max_iterations: int = MAX_ITERATIONS) -> SdpSolution:
    """
    Solve a Hermitian SDP.

    Args:
        problem: the problem, see :class:`SdpProblem`.
        max_iterations: interior-point iteration budget.

    Returns:
        SdpSolution whose status is ``solved`` only when relative primal and
        dual residuals are <= 1e-8 and |primal - dual| <= 1e-7 (1 + |primal|).
    """
    rf = _RealForm(problem)
    m = rf.m
    nrm_b = float(np.linalg.norm(rf.b))
    nrm_c = float(np.sqrt(sum(np.sum(c * c) for c in rf.C)))
    a_norms = [float(np.sqrt(sum(np.sum(a[i] ** 2) for a in rf.A) + np.sum(rf.A_lp[i] ** 2))) for i in range(m)]
    nt = rf.n_total
    xi = max(10.0, np.sqrt(nt), nt * max([(1 + abs(rf.b[i])) / (1 + a_norms[i]) for i in range(m)] or [1.0]))
    zeta = max(10.0, np.sqrt(nt), max(a_norms or [0.0]), nrm_c)

    xs = [xi * np.eye(2 * s) for s in rf.sizes]
    ss = [zeta * np.eye(2 * s) for s in rf.sizes]
    x_lp = xi * np.ones(rf.n_lp)
    s_lp = zeta * np.ones(rf.n_lp)
    y = np.zeros(m)

    status = MAX_ITER
    stalls = 0
    it = 0
    pobj = dobj = float("nan")
    rel_p = rel_d = float("nan")
    for it in range(1, max_iterations + 1):
        rp = rf.b - rf.op(xs, x_lp)
        aty, aty_lp = rf.adj(y)
        rds = [c - s - a for c, s, a in zip(rf.C, ss, aty)]
        rd_lp = -s_lp - aty_lp
        pobj = float(sum(np.sum(c * x) for c, x in zip(rf.C, xs)))
        dobj = float(rf.b @ y)
        rel_p = float(np.linalg.norm(rp)) / (1 + nrm_b)
        rel_d = float(np.sqrt(sum(np.sum(r * r) for r in rds) + rd_lp @ rd_lp)) / (1 + nrm_c)
        gap = abs(pobj - dobj)
        mu = (sum(np.sum(x * s) for x, s in zip(xs, ss)) + x_lp @ s_lp) / nt
        logger.debug("sdp it=%d pobj=%.10g dobj=%.10g rp=%.2e rd=%.2e mu=%.2e",
                     it, rf.sign * pobj, rf.sign * dobj, rel_p, rel_d, mu)
        if rel_p <= FEASIBILITY_TOL and rel_d <= FEASIBILITY_TOL and gap <= GAP_TOL * (1 + abs(pobj)):
            status = SOLVED
            break
        big = max([np.max(np.abs(x)) for x in xs] + [np.max(np.abs(s)) for s in ss]
                  + [np.max(x_lp, initial=0.0), np.max(s_lp, initial=0.0)])
        if big > DIVERGENCE:
            status = INFEASIBLE
            break

        # Nesterov-Todd scaling per block: W S W = X, scaled X = S = diag(lam)
        gs, ginvs, ws, lams, lx, ls = [], [], [], [], [], []
        try:
            for x, s in zip(xs, ss):
                lxb = np.linalg.cholesky(x)
                lsb = np.linalg.cholesky(s)
                _, lam, vt = np.linalg.svd(lsb.T @ lxb)
                g = (lxb @ vt.T) / np.sqrt(lam)
                lxi = sla.solve_triangular(lxb, np.eye(lxb.shape[0]), lower=True)
                ginv = (np.sqrt(lam)[:, None] * vt) @ lxi
                gs.append(g)
                ginvs.append(ginv)
                ws.append(g @ g.T)
                lams.append(lam)
                lx.append(lxb)
                ls.append(lsb)
        except np.linalg.LinAlgError:
            logger.warning("sdp lost positive definiteness at iteration %d", it)
            break
        w_lp = x_lp / s_lp if rf.n_lp else np.zeros(0)
        g_lp = np.sqrt(w_lp)
        lam_lp = np.sqrt(x_lp * s_lp)

        schur = (rf.A_lp * w_lp) @ rf.A_lp.T
        wa_stacks = []
        for a, w in zip(rf.A, ws):
            waw = w @ a @ w
            wa_stacks.append(waw)
            schur = schur + a.reshape(m, -1) @ waw.reshape(m, -1).T
        schur = (schur + schur.T) / 2
        try:
            factor = sla.cho_factor(schur)
            solve = lambda r: sla.cho_solve(factor, r)
        except (np.linalg.LinAlgError, ValueError):
            solve = lambda r: np.linalg.lstsq(schur, r, rcond=None)[0]

        def direction(zs, z_lp):
            rzs = [g @ z @ g.T for g, z in zip(gs, zs)]
            rz_lp = g_lp * z_lp
            t = [rz - w @ rd @ w for rz, w, rd in zip(rzs, ws, rds)]
            dy = solve(rp - rf.op(t, rz_lp - w_lp * rd_lp))
            ady, ady_lp = rf.adj(dy)
            dss = [_sym(rd - a) for rd, a in zip(rds, ady)]
            ds_lp = rd_lp - ady_lp
            dxs = [_sym(rz - w @ ds @ w) for rz, w, ds in zip(rzs, ws, dss)]
            dx_lp = rz_lp - w_lp * ds_lp
            return dxs, dx_lp, dy, dss, ds_lp

        def steps(dxs, dx_lp, dss, ds_lp):
            ap = min([_max_step(l, d) for l, d in zip(lx, dxs)] + [_max_step_lp(x_lp, dx_lp)])
            ad = min([_max_step(l, d) for l, d in zip(ls, dss)] + [_max_step_lp(s_lp, ds_lp)])
            return ap, ad

        # predictor
        dxa, dxa_lp, _, dsa, dsa_lp = direction([-np.diag(l) for l in lams], -lam_lp)
        ap, ad = steps(dxa, dxa_lp, dsa, dsa_lp)
        ap, ad = min(1.0, ap), min(1.0, ad)
        mu_aff = (sum(np.sum((x + ap * dx) * (s + ad * ds)) for x, dx, s, ds in zip(xs, dxa, ss, dsa))
                  + (x_lp + ap * dxa_lp) @ (s_lp + ad * dsa_lp)) / nt
        sigma = float(np.clip((mu_aff / mu) ** 3, 0.0, 1.0))

        # corrector
        zs = []
        for g, ginv, lam, dx, ds in zip(gs, ginvs, lams, dxa, dsa):
            dxt = ginv @ dx @ ginv.T
            dst = g.T @ ds @ g
            t = sigma * mu * np.eye(lam.size) - np.diag(lam ** 2) - _sym(dxt @ dst)
            zs.append(2 * t / (lam[:, None] + lam[None, :]))
        t_lp = sigma * mu - lam_lp ** 2 - (dxa_lp / g_lp) * (dsa_lp * g_lp) if rf.n_lp else np.zeros(0)
        z_lp = t_lp / lam_lp if rf.n_lp else np.zeros(0)
        dxs, dx_lp, dy, dss, ds_lp = direction(zs, z_lp)
        ap, ad = steps(dxs, dx_lp, dss, ds_lp)
        ap, ad = min(1.0, STEP_FRACTION * ap), min(1.0, STEP_FRACTION * ad)

        xs = [_sym(x + ap * dx) for x, dx in zip(xs, dxs)]
        x_lp = x_lp + ap * dx_lp
        y = y + ad * dy
        ss = [_sym(s + ad * ds) for s, ds in zip(ss, dss)]
        s_lp = s_lp + ad * ds_lp

        stalls = stalls + 1 if max(ap, ad) < 1e-10 else 0
        if stalls >= 5:
            logger.warning("sdp stalled at iteration %d", it)
            break

    if status != SOLVED:
        logger.warning("sdp finished with status %s after %d iterations (rp=%.2e, rd=%.2e)",
                       status, it, rel_p, rel_d)
    primal = rf.sign * pobj
    dual = rf.sign * dobj
    return SdpSolution(X=rf.to_complex(xs), primal_value=primal, dual_value=dual,
                       gap=abs(primal - dual), status=status, iterations=it, y=y,
                       primal_residual=rel_p, dual_residual=rel_d)
