"""Catalog of scalar nonlinearities with exact calculus.

Every family supplies the function value together with closed-form first
and second derivatives, the antiderivative normalized to vanish at 0, and
an inverse where the function is strictly increasing.  The delay-equation
hypotheses need f(0) = 0 and f' > 0 for the stiffness role, and the
energy diagnostics integrate the antiderivative, so all of these are kept
exact per family instead of being approximated numerically.

Families
--------
Linear(slope)                   a*y
LinearPlusCubic(slope, cubic)   a*y + beta*y**3
ScaledTanh(amplitude, rate)     A*tanh(r*y), saturating with range (-A, A)
Tabulated(xs, ys)               monotone PCHIP spline on [xs[0], xs[-1]]
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import OutOfDomainError, OutOfRangeError

_INVERSE_RTOL = 1e-12


def _as_float_or_array(y):
    if np.ndim(y) == 0:
        return float(y)
    return np.asarray(y, dtype=float)


class Nonlinearity:
    """Shared scaffolding; concrete families implement the calculus."""

    kind = "abstract"

    #: closed domain of validity; unbounded families use +-inf
    domain = (-math.inf, math.inf)

    def __call__(self, y):
        return self.eval(y)

    def eval(self, y):
        raise NotImplementedError

    def deriv(self, y):
        raise NotImplementedError

    def deriv2(self, y):
        raise NotImplementedError

    def antideriv(self, y):
        raise NotImplementedError

    def inverse(self, v):
        raise NotImplementedError

    @property
    def range_inf(self):
        """Infimum of the function over its domain (may be -inf)."""
        raise NotImplementedError

    @property
    def range_sup(self):
        """Supremum of the function over its domain (may be +inf)."""
        raise NotImplementedError

    @property
    def coercive(self):
        """True when the function tends to +-inf at +-inf."""
        return math.isinf(self.range_sup) and math.isinf(self.range_inf)

    def _check_domain(self, y):
        lo, hi = self.domain
        arr = np.asarray(y, dtype=float)
        if np.any(arr < lo) or np.any(arr > hi):
            raise OutOfDomainError(
                f"{self.kind}: argument outside validity interval [{lo}, {hi}]"
            )


@dataclass(frozen=True)
class Linear(Nonlinearity):
    slope: float

    kind = "linear"

    def eval(self, y):
        return self.slope * _as_float_or_array(y)

    def deriv(self, y):
        if np.ndim(y) == 0:
            return self.slope
        return np.full(np.shape(y), self.slope)

    def deriv2(self, y):
        if np.ndim(y) == 0:
            return 0.0
        return np.zeros(np.shape(y))

    def antideriv(self, y):
        y = _as_float_or_array(y)
        return 0.5 * self.slope * y * y

    def inverse(self, v):
        if self.slope == 0.0:
            if np.all(np.asarray(v) == 0.0):
                return _as_float_or_array(v)
            raise OutOfRangeError("linear: slope 0 attains only the value 0")
        return _as_float_or_array(v) / self.slope

    @property
    def range_inf(self):
        return 0.0 if self.slope == 0.0 else -math.inf

    @property
    def range_sup(self):
        return 0.0 if self.slope == 0.0 else math.inf


@dataclass(frozen=True)
class LinearPlusCubic(Nonlinearity):
    slope: float
    cubic: float

    kind = "linear_plus_cubic"

    def eval(self, y):
        y = _as_float_or_array(y)
        return self.slope * y + self.cubic * y * y * y

    def deriv(self, y):
        y = _as_float_or_array(y)
        return self.slope + 3.0 * self.cubic * y * y

    def deriv2(self, y):
        y = _as_float_or_array(y)
        return 6.0 * self.cubic * y

    def antideriv(self, y):
        y = _as_float_or_array(y)
        y2 = y * y
        return 0.5 * self.slope * y2 + 0.25 * self.cubic * y2 * y2

    def inverse(self, v):
        """Invert a*y + beta*y**3 = v; requires a >= 0, beta >= 0, not both 0."""
        if self.slope < 0.0 or self.cubic < 0.0 or (self.slope == 0.0 and self.cubic == 0.0):
            raise OutOfRangeError("linear_plus_cubic: inverse needs a strictly increasing map")
        if np.ndim(v) != 0:
            return np.array([self.inverse(float(vk)) for vk in np.asarray(v).ravel()]).reshape(
                np.shape(v)
            )
        v = float(v)
        if v == 0.0:
            return 0.0
        # bracket then polish; the map is odd and strictly increasing
        hi = 1.0
        while self.eval(math.copysign(hi, v)) * math.copysign(1.0, v) < abs(v):
            hi *= 2.0
        y = brentq(lambda u: self.eval(u) - v, -hi, hi, xtol=1e-15, rtol=8.9e-16)
        for _ in range(4):
            r = self.eval(y) - v
            if abs(r) <= _INVERSE_RTOL * max(1.0, abs(v)):
                break
            y -= r / self.deriv(y)
        return y

    @property
    def range_inf(self):
        return -math.inf

    @property
    def range_sup(self):
        return math.inf


@dataclass(frozen=True)
class ScaledTanh(Nonlinearity):
    amplitude: float
    rate: float

    kind = "scaled_tanh"

    def eval(self, y):
        y = _as_float_or_array(y)
        return self.amplitude * np.tanh(self.rate * y)

    def deriv(self, y):
        y = _as_float_or_array(y)
        th = np.tanh(self.rate * y)
        return self.amplitude * self.rate * (1.0 - th * th)

    def deriv2(self, y):
        y = _as_float_or_array(y)
        th = np.tanh(self.rate * y)
        return -2.0 * self.amplitude * self.rate**2 * th * (1.0 - th * th)

    def antideriv(self, y):
        # (A/r) * log(cosh(r*y)), written overflow-safe for large |r*y|
        y = _as_float_or_array(y)
        x = np.abs(self.rate * y)
        log_cosh = x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)
        return (self.amplitude / self.rate) * log_cosh

    def inverse(self, v):
        v = np.asarray(v, dtype=float)
        if np.any(np.abs(v) >= abs(self.amplitude)):
            raise OutOfRangeError(
                f"scaled_tanh: value outside open range (-{abs(self.amplitude)}, {abs(self.amplitude)})"
            )
        out = np.arctanh(v / self.amplitude) / self.rate
        return float(out) if out.ndim == 0 else out

    @property
    def range_inf(self):
        return -abs(self.amplitude)

    @property
    def range_sup(self):
        return abs(self.amplitude)


class Tabulated(Nonlinearity):
    """Monotone shape-preserving spline through sample points.

    The PCHIP construction keeps the interpolant monotone wherever the
    data are, so a strictly increasing table yields a strictly increasing
    function with a well-defined inverse on [ys[0], ys[-1]].  Integration
    and differentiation use the exact piecewise-cubic forms.
    """

    kind = "tabulated"

    def __init__(self, xs, ys):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 3:
            raise ValueError("tabulated: need matching 1-d arrays with at least 3 points")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("tabulated: abscissae must be strictly increasing")
        if np.any(np.diff(ys) < 0):
            raise ValueError("tabulated: ordinates must be monotone non-decreasing")
        self.xs = xs
        self.ys = ys
        self.domain = (float(xs[0]), float(xs[-1]))
        self._spline = PchipInterpolator(xs, ys, extrapolate=False)
        self._dspline = self._spline.derivative()
        self._d2spline = self._spline.derivative(2)
        anti = self._spline.antiderivative()
        lo, hi = self.domain
        zero_ref = anti(0.0) if lo <= 0.0 <= hi else anti(lo)
        self._anti = anti
        self._anti_ref = float(zero_ref)

    def eval(self, y):
        self._check_domain(y)
        out = self._spline(y)
        return float(out) if np.ndim(y) == 0 else out

    def deriv(self, y):
        self._check_domain(y)
        out = self._dspline(y)
        return float(out) if np.ndim(y) == 0 else out

    def deriv2(self, y):
        self._check_domain(y)
        out = self._d2spline(y)
        return float(out) if np.ndim(y) == 0 else out

    def antideriv(self, y):
        self._check_domain(y)
        out = self._anti(y) - self._anti_ref
        return float(out) if np.ndim(y) == 0 else out

    def inverse(self, v):
        if np.ndim(v) != 0:
            return np.array([self.inverse(float(vk)) for vk in np.asarray(v).ravel()]).reshape(
                np.shape(v)
            )
        v = float(v)
        lo, hi = self.domain
        vlo, vhi = float(self.ys[0]), float(self.ys[-1])
        if not (vlo <= v <= vhi):
            raise OutOfRangeError(f"tabulated: value {v} outside attained range [{vlo}, {vhi}]")
        if v == vlo:
            return lo
        if v == vhi:
            return hi
        return brentq(lambda u: self._spline(u) - v, lo, hi, xtol=1e-15, rtol=8.9e-16)

    @property
    def range_inf(self):
        return float(self.ys[0])

    @property
    def range_sup(self):
        return float(self.ys[-1])

    def __repr__(self):
        return f"Tabulated({self.xs.size} points on [{self.domain[0]}, {self.domain[1]}])"


def potential(n: Nonlinearity, y):
    """Antiderivative of the nonlinearity, normalized to vanish at 0."""
    return n.antideriv(y)


def inverse(n: Nonlinearity, v):
    """Preimage under a strictly increasing nonlinearity."""
    return n.inverse(v)


NONLINEARITY_KINDS = {
    "linear": Linear,
    "linear_plus_cubic": LinearPlusCubic,
    "scaled_tanh": ScaledTanh,
    "tabulated": Tabulated,
}
