"""Energy-balance diagnostics for the neutral equation.

For the homogeneous problem the squared drift q = (y' + f(y))^2 obeys an
exact balance: integrating the pointwise identity over [0, t] gives

    int_0^t q  +  int_{-1}^{t-1} (f(y)^2 - g(y)^2)  +  H(y(t-1)) - H(y(-1))
        = int_{-1}^{t-1} q,

with H(y) = 2*(F(y) - c*G(y)) built from the antiderivatives F, G of f, g.
Everything here is computed with trapezoidal quadrature on the solver grid
(one-sided derivatives at the breakpoints), so the reported identity defect
isolates the scheme error of the time integration.

The window energy E(t) = int_{t-1}^t q, the potential F(y(t)) and the
cumulative int_0^t f(y)^2 are bounded by the single history constant

    C0 = int_{-1}^0 q0 + 2*(1+gamma)*F(y0(-1)) - (1-gamma^2)*int_{-1}^0 f(y0)^2,

which is what makes the zero solution asymptotically stable whenever
|g| <= gamma*|f| with gamma < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyIntervalError, NotLinearError, SourceNotZeroError
from .nonlinearity import Linear, Nonlinearity
from .stepper import Trajectory


@dataclass(frozen=True)
class EnergyReport:
    """Energy diagnostics at a single node."""

    t: float
    E: float
    F_of_y: float
    cumulative_f_squared: float
    identity_residual: float
    C0: float


@dataclass(frozen=True)
class EnergySeries:
    """Per-node energy diagnostics for t > 0, stored as parallel arrays."""

    times: np.ndarray
    E: np.ndarray
    F_of_y: np.ndarray
    cumulative_f_squared: np.ndarray
    identity_residual: np.ndarray
    C0: float

    def __len__(self):
        return self.times.size

    def __iter__(self):
        for i in range(self.times.size):
            yield EnergyReport(
                float(self.times[i]),
                float(self.E[i]),
                float(self.F_of_y[i]),
                float(self.cumulative_f_squared[i]),
                float(self.identity_residual[i]),
                self.C0,
            )

    def max_identity_residual(self) -> float:
        return float(np.max(self.identity_residual))

    def to_csv(self, path, header_comment: str | None = None) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            fh.write("t,E,F,cumF2,identityResidual,C0\n")
            for i in range(self.times.size):
                row = (
                    self.times[i],
                    self.E[i],
                    self.F_of_y[i],
                    self.cumulative_f_squared[i],
                    self.identity_residual[i],
                    self.C0,
                )
                fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


@dataclass(frozen=True)
class LemmaCheck:
    F: float
    H: float
    lower_ok: bool
    upper_ok: bool
    lower_slack: float
    upper_slack: float


def lemma_fh_check(f: Nonlinearity, g: Nonlinearity, c: int, gamma: float, y: float) -> LemmaCheck:
    """Check 0 <= 2*(1-gamma)*F(y) <= H(y) <= 2*(1+gamma)*F(y) at one point.

    H(y) = 2*(F(y) - c*G(y)).  The bounds follow from |g| <= gamma*|f| and
    hold with equality for proportional linear pairs, so the comparisons
    allow a relative rounding slack.
    """
    F = float(f.antideriv(y))
    G = float(g.antideriv(y))
    H = 2.0 * (F - c * G)
    lower_slack = H - 2.0 * (1.0 - gamma) * F
    upper_slack = 2.0 * (1.0 + gamma) * F - H
    tol = 1e-12 * max(1.0, abs(F), abs(H))
    return LemmaCheck(
        F=F,
        H=H,
        lower_ok=bool(F >= -tol and lower_slack >= -tol),
        upper_ok=bool(upper_slack >= -tol),
        lower_slack=lower_slack,
        upper_slack=upper_slack,
    )


def _segment_cumsum(node_right: np.ndarray, node_left: np.ndarray, h: float) -> np.ndarray:
    """Cumulative trapezoidal integral with one-sided node samples.

    Segment [t_j, t_{j+1}] contributes h/2 * (right_j + left_{j+1}); the
    result has the convention cum[0] = 0 at the first node.
    """
    seg = 0.5 * h * (node_right[:-1] + node_left[1:])
    out = np.empty(node_right.size)
    out[0] = 0.0
    np.cumsum(seg, out=out[1:])
    return out


def energy_series(traj: Trajectory) -> EnergySeries:
    """Energy diagnostics at every node with t > 0 of a homogeneous run.

    Raises SourceNotZeroError for forced problems: the balance identity
    is only exact when s = 0 (use linear_energy_residual for the forced
    linear diagnostics).
    """
    prob = traj.problem
    if not prob.source.is_zero:
        raise SourceNotZeroError("energy balance requires a zero source")
    n = traj.n
    h = traj.grid_step
    m_total = traj.values.size - 1
    if m_total < 2 * n:
        raise ValueError("trajectory too short: need t_end >= 1")

    y = traj.values
    f_of_y = np.asarray(prob.f.eval(y), dtype=float)
    g_of_y = np.asarray(prob.g.eval(y), dtype=float)
    q_right = (traj.deriv_right + f_of_y) ** 2
    q_left = (traj.deriv_left + f_of_y) ** 2
    cum_q = _segment_cumsum(q_right, q_left, h)
    fsq = f_of_y**2
    gsq = g_of_y**2
    cum_f2 = _segment_cumsum(fsq, fsq, h)
    cum_g2 = _segment_cumsum(gsq, gsq, h)

    F_vals = np.asarray(prob.f.antideriv(y), dtype=float)
    G_vals = np.asarray(prob.g.antideriv(y), dtype=float)
    H_vals = 2.0 * (F_vals - prob.c * G_vals)

    gamma = prob.gamma_bound
    C0 = float(
        cum_q[n]
        + 2.0 * (1.0 + gamma) * F_vals[0]
        - (1.0 - gamma**2) * cum_f2[n]
    )

    js = np.arange(n + 1, m_total + 1)
    jd = js - n
    E = cum_q[js] - cum_q[jd]
    cumulative = cum_f2[js] - cum_f2[n]
    lhs = (cum_q[js] - cum_q[n]) + (cum_f2[jd] - cum_g2[jd]) + H_vals[jd] - H_vals[0]
    rhs = cum_q[jd]
    residual = np.abs(lhs - rhs)

    return EnergySeries(
        times=traj.times[js],
        E=E,
        F_of_y=F_vals[js],
        cumulative_f_squared=cumulative,
        identity_residual=residual,
        C0=C0,
    )


def linear_energy_residual(traj: Trajectory, a: float, b: float) -> float:
    """Defect of the exact linear energy balance at the final time.

    For f = a*y, g = b*y the balance reads

        int_{t-1}^t (y'+a*y)^2 + (a - c*b)*y(t-1)^2
            + (a^2-b^2) * int_0^{t-1} y^2
        = int_{-1}^0 (y0'+a*y0)^2 + (a^2-b^2) * int_{-1}^0 y0^2
            + (a - c*b)*y0(-1)^2,

    evaluated by trapezoidal quadrature on the solver grid.  Shrinks at
    the scheme order under grid refinement.
    """
    prob = traj.problem
    if not (isinstance(prob.f, Linear) and isinstance(prob.g, Linear)):
        raise NotLinearError("linear energy balance needs Linear f and g")
    if prob.f.slope != a or prob.g.slope != b:
        raise NotLinearError(
            f"trajectory has slopes ({prob.f.slope}, {prob.g.slope}), not ({a}, {b})"
        )
    n = traj.n
    h = traj.grid_step
    m_total = traj.values.size - 1
    if m_total < 2 * n:
        raise ValueError("need t_end >= 1")
    c = float(prob.c)

    y = traj.values
    q_right = (traj.deriv_right + a * y) ** 2
    q_left = (traj.deriv_left + a * y) ** 2
    cum_q = _segment_cumsum(q_right, q_left, h)
    ysq = y**2
    cum_y2 = _segment_cumsum(ysq, ysq, h)

    j = m_total
    jd = j - n
    lhs = (
        (cum_q[j] - cum_q[jd])
        + (a - c * b) * ysq[jd]
        + (a * a - b * b) * (cum_y2[jd] - cum_y2[n])
    )
    rhs = cum_q[n] + (a * a - b * b) * cum_y2[n] + (a - c * b) * ysq[0]
    return float(abs(lhs - rhs))


def periodic_stability_condition(
    f: Nonlinearity,
    p_values: np.ndarray,
    p_derivs: np.ndarray,
    interval: tuple,
    w_grid: int = 512,
    refine_rounds: int = 2,
):
    """Margin of the slope condition for attraction to a periodic orbit.

    Compares twice the peak slope of the orbit against

        inf_{w in I, d in range(P)}  (f(w)-f(d))^2 / |f(w)-f(d)-(w-d)*f'(d)|,

    the infimum taken over a product grid with local refinement around
    the minimizer.  Grid points with an exactly zero denominator are
    skipped: the quotient tends to +inf there (no quadratic remainder).
    Returns (holds, margin) with margin = rhs - lhs, +inf for linear f.
    """
    lo, hi = interval
    if not lo < hi:
        raise EmptyIntervalError(f"interval [{lo}, {hi}] is empty")
    p_values = np.asarray(p_values, dtype=float)
    p_derivs = np.asarray(p_derivs, dtype=float)
    if p_values.size == 0 or p_values.size != p_derivs.size:
        raise ValueError("need matching non-empty orbit samples")
    if p_values.min() < lo - 1e-12 or p_values.max() > hi + 1e-12:
        raise ValueError("interval must contain the orbit range")

    lhs = 2.0 * float(np.max(np.abs(p_derivs)))

    d_grid = np.unique(p_values)
    f_d = np.asarray(f.eval(d_grid), dtype=float)
    fp_d = np.asarray(f.deriv(d_grid), dtype=float)

    def grid_min(ws):
        f_w = np.asarray(f.eval(ws), dtype=float)
        num = (f_w[:, None] - f_d[None, :]) ** 2
        den = np.abs(f_w[:, None] - f_d[None, :] - (ws[:, None] - d_grid[None, :]) * fp_d[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(den > 0.0, num / den, np.inf)
        flat = int(np.argmin(q))
        iw, idx = np.unravel_index(flat, q.shape)
        return float(q[iw, idx]), float(ws[iw])

    ws = np.linspace(lo, hi, w_grid)
    rhs, w_star = grid_min(ws)
    span = (hi - lo) / (w_grid - 1)
    for _ in range(refine_rounds):
        if not math.isfinite(rhs):
            break
        wlo = max(lo, w_star - 2.0 * span)
        whi = min(hi, w_star + 2.0 * span)
        rhs_fine, w_star = grid_min(np.linspace(wlo, whi, 65))
        rhs = min(rhs, rhs_fine)
        span = (whi - wlo) / 64.0

    margin = rhs - lhs
    return bool(margin > 0.0), float(margin)
