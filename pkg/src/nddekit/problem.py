"""Problem definition for the unit-delay neutral equation

    y'(t) + c*y'(t-1) + f(y(t)) + g(y(t-1)) = s(t),   t > 0,

with |c| = 1, together with hypothesis validation and the solver for
constant-forcing equilibria f(d) + g(d) = D.

The structural hypotheses checked here are: c in {-1, +1}; f strictly
increasing with f(0) = 0; |g| <= gamma*|f| for some gamma < 1; a periodic
(or constant) source; and optionally the stronger pair |g'| <= gamma*|f'|
and coercivity of f.  Validation certifies them by dense sampling on a
declared interval, with exact shortcuts where a family allows one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline
from scipy.optimize import brentq

from .errors import DegenerateIntervalError, NotBracketedError
from .nonlinearity import Linear, Nonlinearity
from .sources import SourceSpec, ZeroSource


@dataclass(frozen=True)
class History:
    """Initial data on [-1, 0]: values and derivatives on a uniform grid.

    The grid has N+1 nodes at t = -1 + j/N.  Derivative samples are part
    of the data (the equation is neutral, so the derivative of the
    history enters the right-hand side directly).
    """

    values: np.ndarray
    deriv_values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        d = np.asarray(self.deriv_values, dtype=float)
        if v.ndim != 1 or v.shape != d.shape or v.size < 3:
            raise ValueError("history needs matching 1-d value/derivative arrays, >= 3 points")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "deriv_values", d)

    @property
    def n_intervals(self) -> int:
        return self.values.size - 1

    @property
    def grid_step(self) -> float:
        return 1.0 / self.n_intervals

    @property
    def times(self) -> np.ndarray:
        return -1.0 + np.arange(self.values.size) / self.n_intervals

    def h1_norm_sq(self) -> float:
        """Discrete squared H1 norm: sum of h*(value^2 + deriv^2)."""
        h = self.grid_step
        return float(h * (np.sum(self.values**2) + np.sum(self.deriv_values**2)))

    @classmethod
    def from_function(cls, fn, n: int, dfn=None) -> "History":
        """Sample a callable on [-1, 0]; derivatives analytic or centered."""
        ts = -1.0 + np.arange(n + 1) / n
        vals = np.array([float(fn(t)) for t in ts])
        if dfn is not None:
            ders = np.array([float(dfn(t)) for t in ts])
        else:
            h = 1.0 / n
            ders = np.gradient(vals, h)
        return cls(vals, ders)

    @classmethod
    def constant(cls, value: float, n: int) -> "History":
        return cls(np.full(n + 1, float(value)), np.zeros(n + 1))

    @classmethod
    def random_spline(cls, n: int, amplitude: float = 0.2, seed: int = 0, knots: int = 6) -> "History":
        """Random C2 history: a natural cubic spline through seeded knots."""
        rng = np.random.default_rng(seed)
        knot_t = np.linspace(-1.0, 0.0, max(4, knots))
        knot_v = amplitude * rng.uniform(-1.0, 1.0, knot_t.size)
        spline = CubicSpline(knot_t, knot_v, bc_type="natural")
        ts = -1.0 + np.arange(n + 1) / n
        return cls(spline(ts), spline(ts, 1))

    def resample(self, n: int) -> "History":
        """Cubic Hermite re-gridding that keeps the derivative data."""
        if n == self.n_intervals:
            return self
        spline = CubicHermiteSpline(self.times, self.values, self.deriv_values)
        ts = -1.0 + np.arange(n + 1) / n
        return History(spline(ts), spline.derivative()(ts))

    def adjusted_for_compatibility(self, problem: "NddeProblem") -> "History":
        """Remove the first-order derivative jump at t = 0.

        Adds alpha * t*(t+1)^2, which vanishes with its derivative at
        t = -1 and vanishes at t = 0, so only the history's end slope
        moves.  alpha is chosen to make the right derivative implied by
        the equation at 0+ match the history slope at 0-.
        """
        alpha = compatibility_defect(problem, self)
        ts = self.times
        bump = ts * (ts + 1.0) ** 2
        dbump = (ts + 1.0) * (3.0 * ts + 1.0)
        return History(self.values + alpha * bump, self.deriv_values + alpha * dbump)


@dataclass(frozen=True)
class NddeProblem:
    """The tuple (c, f, g, source) plus the certification interval."""

    c: int
    f: Nonlinearity
    g: Nonlinearity
    source: SourceSpec = field(default_factory=ZeroSource)
    gamma_bound: float = 0.0
    validity_interval: tuple = (-10.0, 10.0)
    strong_hypotheses: bool = True

    def __post_init__(self):
        if self.c not in (-1, 1):
            raise ValueError("neutral coefficient c must be +1 or -1")
        if not (0.0 <= self.gamma_bound < 1.0):
            raise ValueError("gamma_bound must lie in [0, 1)")


def compatibility_defect(problem: NddeProblem, history: History) -> float:
    """Jump of the solution derivative at t = 0: y'(0+) - y0'(0-).

    A nonzero defect is legitimate for H1 data; the equation then
    propagates the jump across every integer time.
    """
    v = history.values
    d = history.deriv_values
    rhs0 = (
        float(problem.source.evaluate(0.0))
        - problem.c * d[0]
        - float(problem.g.eval(v[0]))
        - float(problem.f.eval(v[-1]))
    )
    return rhs0 - d[-1]


# ---------------------------------------------------------------------------
# hypothesis validation


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    passed: bool
    witness: float | None = None
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple
    gamma_observed: float
    sample_count: int
    interval: tuple

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> HypothesisCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "gamma_observed": self.gamma_observed,
            "sample_count": self.sample_count,
            "interval": list(self.interval),
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "witness": c.witness,
                    "detail": c.detail,
                }
                for c in self.checks
            ],
        }


def _nested_samples(lo: float, hi: float, samples: int) -> np.ndarray:
    # dyadic count 2^m + 1 so denser grids contain coarser ones and a
    # recorded failure can never disappear under refinement
    m = max(2, math.ceil(math.log2(max(2, samples - 1))))
    return np.linspace(lo, hi, (1 << m) + 1)


def validate_problem(problem: NddeProblem, samples: int = 256) -> ValidationReport:
    """Certify the structural hypotheses on the declared interval.

    Each hypothesis is reported pass/fail with a witness point on
    failure.  The observed gamma is the tightest bound seen on the
    sample grid: sup |g|/|f| away from roots of f, with the derivative
    ratio substituted at the removable singularity y = 0.
    """
    lo, hi = problem.validity_interval
    if not lo < hi:
        raise DegenerateIntervalError(f"validity interval [{lo}, {hi}] has no interior")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    ys = _nested_samples(lo, hi, samples)
    f, g = problem.f, problem.g
    checks = []

    checks.append(
        HypothesisCheck("neutral_coefficient", problem.c in (-1, 1), detail=f"c = {problem.c}")
    )

    # strict monotonicity of f and the pinning f(0) = 0
    fd = np.asarray(f.deriv(ys), dtype=float)
    mono_ok = bool(np.all(fd > 0.0))
    witness = None if mono_ok else float(ys[int(np.argmin(fd))])
    zero_ok = True
    if lo <= 0.0 <= hi:
        zero_ok = float(f.eval(0.0)) == 0.0
    checks.append(
        HypothesisCheck(
            "f_increasing_zero_at_origin",
            mono_ok and zero_ok,
            witness=witness if not mono_ok else (0.0 if not zero_ok else None),
            detail="f' > 0 sampled" + ("" if zero_ok else "; f(0) != 0"),
        )
    )

    # smallness of g against f
    if isinstance(f, Linear) and isinstance(g, Linear):
        gamma_ratio = abs(g.slope) / abs(f.slope) if f.slope != 0.0 else math.inf
        ratio_witness = 1.0
        detail = "exact ratio of linear slopes"
    else:
        fv = np.asarray(f.eval(ys), dtype=float)
        gv = np.asarray(g.eval(ys), dtype=float)
        gd = np.asarray(g.deriv(ys), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.abs(gv) / np.abs(fv)
        near_root = np.abs(fv) == 0.0
        # at a root of f (only y = 0 under the monotonicity hypothesis)
        # the value ratio is the derivative ratio in the limit
        ratios[near_root] = np.abs(gd[near_root]) / np.where(fd[near_root] > 0, fd[near_root], np.inf)
        gamma_ratio = float(np.max(ratios))
        ratio_witness = float(ys[int(np.argmax(ratios))])
        detail = f"sup |g|/|f| over {ys.size} samples"
    small_ok = gamma_ratio < 1.0
    checks.append(
        HypothesisCheck(
            "g_dominated_by_f",
            small_ok,
            witness=None if small_ok else ratio_witness,
            detail=detail + f"; observed gamma = {gamma_ratio:.6g}",
        )
    )

    # periodic source: structural, all catalogued variants qualify
    omega = getattr(problem.source, "omega", None)
    source_ok = omega is None or omega > 0.0
    checks.append(
        HypothesisCheck(
            "source_periodic",
            bool(source_ok),
            detail=f"variant = {problem.source.variant}"
            + ("" if omega is None else f", omega = {omega:.6g}"),
        )
    )

    # strong pair: derivative domination and coercivity of f
    gd = np.asarray(g.deriv(ys), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        dratios = np.abs(gd) / np.where(fd > 0, fd, np.inf)
    gamma_deriv = float(np.max(dratios))
    deriv_ok = gamma_deriv < 1.0
    checks.append(
        HypothesisCheck(
            "g_deriv_dominated",
            deriv_ok,
            witness=None if deriv_ok else float(ys[int(np.argmax(dratios))]),
            detail=f"sup |g'|/|f'| = {gamma_deriv:.6g}",
        )
    )

    coercive = f.coercive
    checks.append(
        HypothesisCheck(
            "f_coercive",
            coercive,
            witness=None if coercive else hi,
            detail=f"family {f.kind}: range [{f.range_inf:.6g}, {f.range_sup:.6g}]",
        )
    )

    gamma_observed = gamma_ratio
    if problem.strong_hypotheses:
        gamma_observed = max(gamma_ratio, gamma_deriv)
    return ValidationReport(
        checks=tuple(checks),
        gamma_observed=gamma_observed,
        sample_count=ys.size,
        interval=(lo, hi),
    )


# ---------------------------------------------------------------------------
# constant-forcing equilibria


class EquilibriumClassification(enum.Enum):
    """Outcome when f(d) + g(d) = D has no attainable solution."""

    DIVERGES_PLUS = "diverges_plus"
    DIVERGES_MINUS = "diverges_minus"
    NO_CONVERGENCE = "no_convergence"


_EQ_RTOL = 1e-12


def equilibrium_solve(f: Nonlinearity, g: Nonlinearity, d_target: float):
    """Solve f(d) + g(d) = D for the constant equilibrium d.

    Returns the root (bisection bracket, then Newton polish to relative
    residual 1e-12) when D is attained.  When D lies strictly beyond a
    finite supremum/infimum of f + g on an unbounded domain, returns the
    matching divergence classification; D exactly at the finite bound
    yields the no-convergence classification.
    """
    lo = max(f.domain[0], g.domain[0])
    hi = min(f.domain[1], g.domain[1])
    s_inf = f.range_inf + g.range_inf
    s_sup = f.range_sup + g.range_sup
    tol = _EQ_RTOL * max(1.0, abs(d_target))

    def total(y):
        return float(f.eval(y)) + float(g.eval(y))

    if math.isfinite(s_sup) and abs(d_target - s_sup) <= tol:
        return EquilibriumClassification.NO_CONVERGENCE
    if math.isfinite(s_inf) and abs(d_target - s_inf) <= tol:
        return EquilibriumClassification.NO_CONVERGENCE
    if d_target > s_sup:
        if math.isinf(hi):
            return EquilibriumClassification.DIVERGES_PLUS
        raise NotBracketedError(
            f"target {d_target} above attained range on bounded domain [{lo}, {hi}]"
        )
    if d_target < s_inf:
        if math.isinf(lo):
            return EquilibriumClassification.DIVERGES_MINUS
        raise NotBracketedError(
            f"target {d_target} below attained range on bounded domain [{lo}, {hi}]"
        )

    # bracket by doubling, staying inside the common domain
    left = max(lo, -1.0)
    right = min(hi, 1.0)
    for _ in range(1100):
        if total(left) <= d_target or left <= lo:
            break
        left = max(lo, 2.0 * left if left < 0.0 else -1.0)
    for _ in range(1100):
        if total(right) >= d_target or right >= hi:
            break
        right = min(hi, 2.0 * right if right > 0.0 else 1.0)
    if total(left) > d_target or total(right) < d_target:
        raise NotBracketedError(f"could not bracket target {d_target} on [{left}, {right}]")

    if total(left) == d_target:
        root = left
    elif total(right) == d_target:
        root = right
    else:
        root = brentq(lambda y: total(y) - d_target, left, right, xtol=1e-15, rtol=8.9e-16)
    for _ in range(6):
        resid = total(root) - d_target
        if abs(resid) <= tol:
            break
        slope = float(f.deriv(root)) + float(g.deriv(root))
        if slope <= 0.0:
            break
        root -= resid / slope
    return float(root)
