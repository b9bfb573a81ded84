"""Stable manifolds of ``tau u = A u + F(u)`` at the fixed point 0.

For hyperbolic ``A`` (no spectrum on the unit circle) and a causal
nonlinearity with ``F(0) = 0`` that is small in two Lipschitz senses
(below ``1/M_1`` on ell_2 and below ``1/M_rho`` on ell_{2,rho} with
``rho > r(A)``), the orbit through a stable-range vector ``xi`` is the
fixed point ``T(xi)`` of the cut-off map

    u  |->  chi_{Z >= 0} (tau - A)^{-1} (F(u) + delta_{-1} xi),

a contraction with factor ``M_1 * |F|_Lip``.  The stable manifold is the
graph of ``w_s(xi) = Q T(xi)_0`` over range(P); points off the graph
escape along the unstable range.

Infinite sums are truncated at certified lengths; ell_2 membership is
reported as tail-decay evidence, never as exact membership (a finite
window cannot certify an infinite sum).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    AdmissibilityError,
    InputError,
    InternalInconsistency,
    NoConvergence,
    PreconditionViolation,
    RangeViolation,
)
from .operators import (
    GAP_TOL,
    BoundedOperator,
    SpectralSplit,
    circle_sup_resolvent,
    is_hyperbolic,
    riesz_split,
    spectral_radius,
)
from .resolvent import SERIES_TOL, ResolventPlan, apply_resolvent_split
from .sequences import Weight, WindowedSequence, impulse, truncate, weighted_norm
from .solver import StencilMap, _contraction_estimate, solve_ivp


@dataclass
class ManifoldProblem:
    """A stable-manifold computation instance.

    ``A`` must be hyperbolic and ``F`` causal with ``F(0) = 0``; the two
    admissibility bounds are validated at construction.  ``rho`` is the
    weight of the outer solution operator (any value above ``r(A)`` gives
    the same projections, so the default just steps past the radius).
    """

    A: BoundedOperator
    F: StencilMap
    rho: float | None = None
    split: SpectralSplit | None = None
    fp_tol: float = 1e-10
    max_iter: int = 200
    horizon: int | None = None
    tail_cut: int | None = None
    gap_tol: float = GAP_TOL

    def __post_init__(self):
        is_hyperbolic(self.A, self.gap_tol)
        if not self.F.causal:
            raise AdmissibilityError(f"kernel {self.F.kernel!r} is not causal")
        if not self.F.fixes_zero:
            raise AdmissibilityError("the manifold nonlinearity must satisfy F(0) = 0")
        if self.split is None:
            self.split = riesz_split(self.A, 1.0, gap_tol=self.gap_tol)
        else:
            if abs(self.split.gamma - 1.0) > 1e-12:
                raise InputError("the manifold split must sit at gamma = 1")
            n_inside = int(np.count_nonzero(np.abs(self.A.eigenvalues) < 1.0))
            if self.split.rank_stable != n_inside:
                raise InputError(
                    "supplied split rank disagrees with the eigenvalues inside S_1"
                )
        radius = spectral_radius(self.A)
        if self.rho is None:
            self.rho = radius + 0.5
        if self.rho <= radius + self.gap_tol:
            raise AdmissibilityError(
                f"outer weight rho = {self.rho} must exceed r(A) = {radius}"
            )
        self.m_one = circle_sup_resolvent(self.A, 1.0, samples=1024, gap_tol=self.gap_tol)
        self.m_rho = circle_sup_resolvent(self.A, self.rho, samples=1024, gap_tol=self.gap_tol)
        lip_one = self.F.lip_bound(1.0)
        lip_rho = self.F.lip_bound(self.rho)
        if lip_one >= 1.0 / self.m_one:
            raise AdmissibilityError(
                f"lip bound {lip_one:.6g} on ell_2 is not below 1/M_1 = {1.0 / self.m_one:.6g}"
            )
        if lip_rho >= 1.0 / self.m_rho:
            raise AdmissibilityError(
                f"lip bound {lip_rho:.6g} on ell_(2,rho) is not below "
                f"1/M_rho = {1.0 / self.m_rho:.6g}"
            )
        self.contraction_factor = self.m_one * lip_one
        r_in = self.split.r_inside
        if self.horizon is None:
            if r_in > 0.0:
                self.horizon = 2 * math.ceil(math.log(SERIES_TOL) / math.log(r_in))
            else:
                self.horizon = 2 * self.A.dim + 4
            self.horizon = int(min(max(self.horizon, 32), 1024))
        self.plan = ResolventPlan(
            self.A, 1.0, "split", split=self.split, tail_cut=self.tail_cut, gap_tol=self.gap_tol
        )

    def check_stable_range(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=np.complex128).reshape(-1)
        if xi.size != self.A.dim:
            raise InputError(f"xi has dimension {xi.size}, expected {self.A.dim}")
        defect = float(np.linalg.norm(self.split.proj_stable @ xi - xi))
        if defect > 1e-8 * (1.0 + float(np.linalg.norm(xi))):
            raise RangeViolation(f"xi is not in the stable range (defect {defect:.3e})")
        return xi


@dataclass
class ManifoldPoint:
    """Converged orbit data for one stable-range vector."""

    xi: np.ndarray
    eta: np.ndarray
    orbit: WindowedSequence
    decay_rate_estimate: float
    iterations: int
    residual: float
    contraction_estimate: float


def lp_apply(prob: ManifoldProblem, xi, u: WindowedSequence) -> WindowedSequence:
    """One application of the cut-off resolvent map at weight 1.

    Contraction in ``u`` with factor at most ``M_1 * |F|_Lip``; the cutoff
    to nonnegative indices and the horizon truncation are norm-nonexpansive.
    """
    xi = prob.check_stable_range(xi)
    g = prob.F.apply(u) + impulse(-1, xi)
    v = apply_resolvent_split(prob.plan, g)
    return truncate(v, 0, prob.horizon)


def _linear_profile(prob: ManifoldProblem, xi: np.ndarray) -> WindowedSequence:
    vals = np.zeros((prob.horizon + 1, prob.A.dim), dtype=np.complex128)
    vals[0] = xi
    for n in range(prob.horizon):
        vals[n + 1] = prob.A.entries @ vals[n]
    return WindowedSequence(0, vals)


def _characterization_defects(prob: ManifoldProblem, xi, u: WindowedSequence):
    # Stable-range identity: P u_n = (PAP)^n xi + sum_{k<n} (PAP)^{n-1-k} P F(u)_k,
    # where the sum starts at k = 0 because F(u) is supported in Z_{>=0}.
    split = prob.split
    p, q = split.proj_stable, split.proj_unstable
    fu = prob.F.apply(u)
    h = prob.horizon
    pf = fu.apply_matrix(p)
    pap = prob.plan._pap
    conv = np.zeros(prob.A.dim, dtype=np.complex128)
    pw = p @ xi
    defect_p = 0.0
    for n in range(h + 1):
        expected = pw + conv
        defect_p = max(defect_p, float(np.linalg.norm(p @ u.at(n) - expected)))
        conv = pap @ conv + pf.at(n)
        pw = pap @ pw
    # Unstable-range identity: Q u_n = -sum_{k>=n} (QAQ)^{n-1-k} Q F(u)_k,
    # evaluated backward in range(Q) coordinates.
    defect_q = 0.0
    v_basis, binv = prob.plan._vq, prob.plan._binv
    if v_basis.shape[1] > 0:
        qf = fu.apply_matrix(q)
        state = np.zeros(v_basis.shape[1], dtype=np.complex128)
        expected_q = {}
        for n in range(h, -1, -1):
            coeff = v_basis.conj().T @ qf.at(n)
            state = binv @ (state - coeff)
            expected_q[n] = v_basis @ state
        for n in range(h + 1):
            defect_q = max(defect_q, float(np.linalg.norm(q @ u.at(n) - expected_q[n])))
    else:
        for n in range(h + 1):
            defect_q = max(defect_q, float(np.linalg.norm(q @ u.at(n))))
    return defect_p, defect_q


def lp_fixed_point(prob: ManifoldProblem, xi) -> ManifoldPoint:
    """Fixed point ``T(xi)`` of the cut-off map, with identity certification.

    Starts from the linear profile ``A^n xi`` on Z_{>=0} (already exact for
    F = 0) and iterates to ``fp_tol`` in the ell_2 norm.  The converged
    orbit is certified against both characterization sums to
    ``10 * fp_tol``.
    """
    xi = prob.check_stable_range(xi)
    w = Weight(1.0, 2.0)
    u = _linear_profile(prob, xi)
    deltas: list[float] = []
    converged = False
    iterations = 0
    for it in range(1, prob.max_iter + 1):
        v = lp_apply(prob, xi, u)
        delta = weighted_norm(v - u, w)
        deltas.append(delta)
        u = v
        iterations = it
        if delta <= prob.fp_tol:
            converged = True
            break
    if not converged:
        raise NoConvergence(
            f"fixed-point iteration missed {prob.fp_tol} within {prob.max_iter} steps"
        )
    defect_p, defect_q = _characterization_defects(prob, xi, u)
    bound = 10.0 * prob.fp_tol
    if max(defect_p, defect_q) > bound:
        raise InternalInconsistency(
            f"characterization sums defect {max(defect_p, defect_q):.3e} above {bound:.3e}"
        )
    eta = prob.split.proj_unstable @ u.at(0)
    floor = max(10.0 * prob.fp_tol, 1e-13 * (1.0 + weighted_norm(u, w)))
    return ManifoldPoint(
        xi=xi,
        eta=eta,
        orbit=u,
        decay_rate_estimate=_decay_rate(u),
        iterations=iterations,
        residual=deltas[-1],
        contraction_estimate=_contraction_estimate(deltas, floor),
    )


def _decay_rate(u: WindowedSequence) -> float:
    mags = np.linalg.norm(u.values, axis=1)
    top = float(np.max(mags)) if mags.size else 0.0
    if top == 0.0:
        return 0.0
    idx = np.flatnonzero(mags > 1e-13 * top)
    if idx.size < 3:
        return 0.0
    n = np.arange(u.lo, u.hi + 1)[idx]
    slope = np.polyfit(n.astype(float), np.log(mags[idx]), 1)[0]
    return float(np.exp(slope))


def _forward_agreement_window(prob: ManifoldProblem, residual: float) -> int:
    # A forward orbit from xi + eta amplifies the eta error like r(A)^n;
    # only the prefix where that growth stays below the 1e-8 target is
    # comparable against the fixed point.
    growth = spectral_radius(prob.A)
    if growth <= 1.0:
        return prob.horizon
    err0 = max(residual, 10.0 * SERIES_TOL)
    n = int(math.log(1e-8 / (10.0 * err0)) / math.log(growth)) if err0 < 1e-9 else 1
    return max(1, min(prob.horizon, n))


def stable_manifold_point(prob: ManifoldProblem, xi) -> tuple[np.ndarray, ManifoldPoint]:
    """Graph value ``eta = w_s(xi)`` plus the converged orbit.

    Verifies that the forward solution through ``xi + eta`` reproduces the
    fixed-point orbit on the error-safe prefix and that the orbit carries
    ell_2 tail-decay evidence.
    """
    point = lp_fixed_point(prob, xi)
    x = point.xi + point.eta
    fwd = solve_ivp(prob.A, prob.F, x, prob.horizon, method="recursion")
    n_cmp = _forward_agreement_window(prob, point.residual)
    dev = 0.0
    for n in range(n_cmp + 1):
        dev = max(dev, float(np.linalg.norm(fwd.at(n) - point.orbit.at(n))))
    if dev > 1e-8:
        raise InternalInconsistency(
            f"forward orbit deviates by {dev:.3e} from the fixed point on [0, {n_cmp}]"
        )
    mags = np.linalg.norm(point.orbit.dense(0, prob.horizon), axis=1) ** 2
    total = float(np.sum(mags))
    if total > 0.0:
        tail = float(np.sum(mags[prob.horizon // 2 :]))
        if tail > 1e-6 * total:
            raise InternalInconsistency(
                f"orbit tail mass {tail:.3e} exceeds decay evidence threshold"
            )
    return point.eta, point


@dataclass
class SweepRow:
    """One grid entry of a manifold sweep."""

    index: int
    xi: np.ndarray
    eta: np.ndarray | None
    decay_rate: float
    iterations: int
    residual: float
    error: str | None = None


def manifold_sweep(prob: ManifoldProblem, xi_grid, max_workers: int = 1) -> list[SweepRow]:
    """Tabulate ``(xi, eta, decay rate)`` over a grid of stable-range vectors.

    Rows are independent; per-row failures are recorded in the ``error``
    field and the sweep continues.  Output order follows the grid.
    """
    grid = [np.asarray(x, dtype=np.complex128).reshape(-1) for x in xi_grid]

    def run(item):
        i, xi = item
        try:
            eta, point = stable_manifold_point(prob, xi)
            return SweepRow(
                index=i,
                xi=xi,
                eta=eta,
                decay_rate=point.decay_rate_estimate,
                iterations=point.iterations,
                residual=point.residual,
            )
        except Exception as exc:  # per-row isolation
            code = getattr(exc, "code", "error")
            return SweepRow(
                index=i,
                xi=xi,
                eta=None,
                decay_rate=float("nan"),
                iterations=0,
                residual=float("nan"),
                error=f"{code}: {exc}",
            )

    items = list(enumerate(grid))
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(run, items))
    else:
        rows = [run(item) for item in items]
    rows.sort(key=lambda row: row.index)
    return rows


def spectrum_escape_check(
    A: BoundedOperator,
    x,
    horizon: int = 50,
    gap_tol: float = GAP_TOL,
    zero_tol: float = 1e-12,
) -> bool:
    """Numerical rendering of: spectrum outside the closed unit disk forces
    every square-summable orbit to start at 0.

    Requires all eigenvalue moduli above ``1 + gap_tol``.  Returns True
    when ``x`` is (numerically) zero or the partial sums of ``|A^n x|^2``
    show monotone growth; either way the orbit cannot be square-summable
    unless ``x = 0``.
    """
    moduli = np.abs(A.eigenvalues)
    if float(np.min(moduli)) <= 1.0 + gap_tol:
        raise PreconditionViolation(
            "escape check requires all eigenvalue moduli above 1 + gap_tol"
        )
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    if x.size != A.dim:
        raise InputError(f"vector has dimension {x.size}, expected {A.dim}")
    if float(np.linalg.norm(x)) <= zero_tol:
        return True
    norms = [float(np.linalg.norm(x))]
    y = x.copy()
    for _ in range(int(horizon)):
        y = A.entries @ y
        nrm = float(np.linalg.norm(y))
        norms.append(nrm)
        if nrm > 1e100:
            return True
    window = max(3, len(norms) // 4)
    recent = norms[-window:]
    increasing = all(b > a for a, b in zip(recent, recent[1:]))
    return increasing and norms[-1] > norms[0]
