"""Method-of-steps integration of the unit-delay neutral equation.

On each interval [m, m+1] the delayed terms are known from the previous
interval, so the equation reduces to the scalar ODE

    y'(t) + f(y(t)) = r(t),    r(t) = s(t) - c*y'(t-1) - g(y(t-1)),

advanced with the implicit trapezoidal rule.  The step h = 1/N divides
the delay exactly, so every delayed evaluation lands on a stored node and
no interpolation enters the main loop.  Because the neutral term carries
derivative jumps across every integer time forever, the trajectory keeps
separate one-sided derivative samples at the breakpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BlowUpError, NewtonDivergenceError, OutOfRangeError
from .problem import History, NddeProblem

BLOWUP_THRESHOLD = 1e12
_STAGE_TOL = 1e-13
_STAGE_MAX_ITER = 50


@dataclass(frozen=True)
class Trajectory:
    """Grid solution on [-1, t_end] with one-sided derivatives.

    Node j sits at t_j = -1 + j/n.  deriv_left and deriv_right coincide
    away from integer times; at integers they record the persistent
    derivative jump of the neutral equation.
    """

    problem: NddeProblem
    n: int
    values: np.ndarray
    deriv_left: np.ndarray
    deriv_right: np.ndarray

    @property
    def grid_step(self) -> float:
        return 1.0 / self.n

    @property
    def t_end(self) -> float:
        return (self.values.size - 1) / self.n - 1.0

    @property
    def times(self) -> np.ndarray:
        return -1.0 + np.arange(self.values.size) / self.n

    def index_of(self, t: float) -> int:
        j = (t + 1.0) * self.n
        ji = int(round(j))
        if abs(j - ji) > 1e-8 * self.n or not (0 <= ji < self.values.size):
            raise OutOfRangeError(f"time {t} is not a stored node")
        return ji

    def value_at(self, t: float) -> float:
        return float(self.values[self.index_of(t)])

    def to_csv(self, path, header_comment: str | None = None) -> None:
        resid = ndde_residual_profile(self)
        rows = np.column_stack([self.times, self.values, self.deriv_left, self.deriv_right, resid])
        with open(path, "w", encoding="utf-8") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            fh.write("t,y,dy_left,dy_right,residual\n")
            for row in rows:
                fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def integrate(problem: NddeProblem, history: History, t_end: float, n: int) -> Trajectory:
    """Advance the neutral equation to t_end on the delay-aligned grid.

    n is the number of steps per unit delay (n >= 8).  A history on a
    different grid is resampled by cubic Hermite interpolation.  Each
    implicit stage is solved by damped Newton; the stage map is strictly
    increasing because f' > 0, so the stage root is unique.  Raises
    BlowUpError (carrying the partial trajectory) once |y| passes 1e12.
    """
    if n < 8:
        raise ValueError("need at least 8 steps per unit delay")
    if t_end < 1.0:
        raise ValueError("t_end must be at least 1")
    if history.n_intervals != n:
        history = history.resample(n)

    h = 1.0 / n
    total_steps = int(math.ceil(t_end * n - 1e-9))
    m_total = n + total_steps  # final node index
    values = np.empty(m_total + 1)
    dleft = np.empty(m_total + 1)
    dright = np.empty(m_total + 1)
    values[: n + 1] = history.values
    dleft[: n + 1] = history.deriv_values
    dright[: n + 1] = history.deriv_values

    f_eval = problem.f.eval
    f_deriv = problem.f.deriv
    g_eval = problem.g.eval
    src = problem.source.evaluate
    c = float(problem.c)

    def partial(j_last):
        return Trajectory(
            problem, n, values[: j_last + 1].copy(), dleft[: j_last + 1].copy(), dright[: j_last + 1].copy()
        )

    j0 = n  # node index of the current interval start
    m = 0
    while j0 < m_total:
        steps = min(n, m_total - j0)
        tloc = m + np.arange(steps + 1) * h
        ydel = values[j0 - n : j0 - n + steps + 1]
        ddel = dleft[j0 - n : j0 - n + steps + 1].astype(float).copy()
        # entering the interval at t = m uses the right derivative of the
        # delayed breakpoint; leaving at t = m+1 uses the left one
        ddel[0] = dright[j0 - n]
        rvals = np.asarray(src(tloc), dtype=float) - c * ddel - np.asarray(g_eval(ydel), dtype=float)

        y = float(values[j0])
        d = float(rvals[0]) - float(f_eval(y))
        dright[j0] = d
        for i in range(steps):
            j = j0 + i
            r_next = float(rvals[i + 1])
            beta = y + 0.5 * h * d
            u = y + h * d  # explicit predictor
            scale = max(1.0, abs(y))
            resid = u - beta - 0.5 * h * (r_next - float(f_eval(u)))
            converged = abs(resid) <= _STAGE_TOL * scale
            for _ in range(_STAGE_MAX_ITER):
                if converged:
                    break
                slope = 1.0 + 0.5 * h * float(f_deriv(u))
                step = resid / slope
                # damped update: halve until the stage residual shrinks
                factor = 1.0
                for _ in range(60):
                    u_try = u - factor * step
                    r_try = u_try - beta - 0.5 * h * (r_next - float(f_eval(u_try)))
                    if abs(r_try) < abs(resid) or factor < 1e-12:
                        break
                    factor *= 0.5
                u, resid = u_try, r_try
                converged = abs(resid) <= _STAGE_TOL * max(1.0, abs(u))
            if not converged:
                raise NewtonDivergenceError(
                    f"stage solve stalled at t = {tloc[i + 1]:.6g} (residual {resid:.3e})"
                )
            d = r_next - float(f_eval(u))
            y = u
            values[j + 1] = y
            dleft[j + 1] = d
            dright[j + 1] = d
            if abs(y) > BLOWUP_THRESHOLD:
                raise BlowUpError(float(tloc[i + 1]), partial(j + 1))
        j0 += steps
        m += 1
    return Trajectory(problem, n, values, dleft, dright)


# ---------------------------------------------------------------------------
# a-posteriori residual


_FD5 = {
    0: (-25.0, 48.0, -36.0, 16.0, -3.0),
    1: (-3.0, -10.0, 18.0, -6.0, 1.0),
    2: (1.0, -8.0, 0.0, 8.0, -1.0),
    3: (-1.0, 6.0, -18.0, 10.0, 3.0),
    4: (3.0, -16.0, 36.0, -48.0, 25.0),
}


def _piece_derivative(vals: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference derivative on one smooth piece."""
    m = vals.size
    out = np.empty(m)
    if m < 5:
        out[:] = np.nan
        return out
    for i in range(m):
        if i < 2:
            base, pos = 0, i
        elif i > m - 3:
            base, pos = m - 5, i - (m - 5)
        else:
            base, pos = i - 2, 2
        w = _FD5[pos]
        out[i] = (
            w[0] * vals[base]
            + w[1] * vals[base + 1]
            + w[2] * vals[base + 2]
            + w[3] * vals[base + 3]
            + w[4] * vals[base + 4]
        ) / (12.0 * h)
    return out


def _fd_derivatives(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Per-node one-sided derivative estimates from values only.

    Each unit interval is a smooth piece; estimates never cross a
    breakpoint.  Returns (left, right) arrays, nan where no stencil fits.
    """
    n = traj.n
    m_total = traj.values.size - 1
    left = np.full(m_total + 1, np.nan)
    right = np.full(m_total + 1, np.nan)
    start = 0
    while start < m_total:
        stop = min(start + n, m_total)
        dpiece = _piece_derivative(traj.values[start : stop + 1], traj.grid_step)
        right[start] = dpiece[0]
        left[stop] = dpiece[-1]
        left[start + 1 : stop] = dpiece[1:-1]
        right[start + 1 : stop] = dpiece[1:-1]
        start = stop
    return left, right


def ndde_residual_profile(traj: Trajectory) -> np.ndarray:
    """Pointwise defect of the full equation, via independent derivatives.

    The derivative is re-estimated from the stored values by
    fourth-order differences inside each smooth piece, so the stored
    (scheme-consistent) derivatives do not trivially cancel the defect.
    Delayed derivatives inside the history range use the supplied data.
    Entries are nan at nodes where the defect is not defined (t <= 0,
    integer t, or a piece too short for the stencil).
    """
    n = traj.n
    m_total = traj.values.size - 1
    fd_left, fd_right = _fd_derivatives(traj)
    prob = traj.problem
    c = float(prob.c)
    out = np.full(m_total + 1, np.nan)
    times = traj.times
    svals = np.asarray(prob.source.evaluate(times), dtype=float)
    fvals = np.asarray(prob.f.eval(traj.values), dtype=float)
    gvals = np.asarray(prob.g.eval(traj.values), dtype=float)
    for j in range(n + 1, m_total + 1):
        if j % n == 0:
            continue  # integer time: the equation holds one-sided only
        jd = j - n  # delayed node, never at an integer time here
        dj = fd_left[j]
        ddel = traj.deriv_left[jd] if jd < n else fd_left[jd]
        if np.isnan(dj) or np.isnan(ddel):
            continue
        out[j] = abs(dj + c * ddel + fvals[j] + gvals[jd] - svals[j])
    return out


def ndde_residual(traj: Trajectory) -> float:
    """Max-norm of the equation defect over eligible interior nodes."""
    profile = ndde_residual_profile(traj)
    finite = profile[np.isfinite(profile)]
    return float(np.max(finite)) if finite.size else 0.0


def mean_over_period(traj: Trajectory, period: float, t: float) -> float:
    """Trapezoidal average of y over [t - period, t] on the stored grid."""
    h = traj.grid_step
    k = int(round(period / h))
    if k < 1 or abs(k * h - period) > 1e-9:
        raise OutOfRangeError(f"period {period} is not a positive grid multiple")
    j1 = traj.index_of(t)
    j0 = j1 - k
    if j0 < 0:
        raise OutOfRangeError(f"window [{t - period}, {t}] starts before the history")
    window = traj.values[j0 : j1 + 1]
    return float(np.trapezoid(window, dx=h) / period)
