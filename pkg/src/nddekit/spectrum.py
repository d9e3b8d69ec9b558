"""Characteristic roots and the stability diagram of the linearized equation.

Exponential solutions e^{lam*t} of

    y'(t) + c*y'(t-1) + a*y(t) + b*y(t-1) = 0

exist exactly at the roots of h(lam) = lam*(e^lam + c) + a*e^lam + b.
The roots form branches lam_n ~ i*Omega(n) with Omega(n) = (2n + (1+c)/2)*pi,
accumulating on the imaginary axis: stability in the critical case |c| = 1
is never exponential.  This module refines the branch roots by damped
Newton from asymptotic seeds, scans for real roots, certifies counts with
the argument principle, and classifies any (a, b) pair against the exact
region boundaries a = +-b.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ContourThroughRootError, NewtonStallWarning, VerificationMismatchError

_RESIDUAL_ACCEPT = 1e-10
_MULTIPLICITY_TOL = 1e-8
_DEDUP_TOL = 1e-8
_ZERO_RE_TOL = 1e-9


@dataclass(frozen=True)
class LinearCoefficients:
    """Slopes (a, b) of the linearized equation and the neutral sign c."""

    a: float
    b: float
    c: int

    def __post_init__(self):
        if self.c not in (-1, 1):
            raise ValueError("c must be +1 or -1")


def char_h(lam: complex, coeffs: LinearCoefficients) -> complex:
    """h(lam) = lam*(e^lam + c) + a*e^lam + b."""
    e = cmath.exp(lam)
    return lam * (e + coeffs.c) + coeffs.a * e + coeffs.b


def char_h_deriv(lam: complex, coeffs: LinearCoefficients) -> complex:
    """h'(lam) = e^lam*(lam + a + 1) + c."""
    return cmath.exp(lam) * (lam + coeffs.a + 1.0) + coeffs.c


def char_h_deriv2(lam: complex, coeffs: LinearCoefficients) -> complex:
    return cmath.exp(lam) * (lam + coeffs.a + 2.0)


def char_calh(lam: complex, coeffs: LinearCoefficients) -> complex:
    """Multiplier form e^{-lam}*h(lam); same modulus as h on the imaginary axis."""
    e = cmath.exp(-lam)
    return lam * (1.0 + coeffs.c * e) + coeffs.a + coeffs.b * e


def omega_asymptotic(n: int, c: int) -> float:
    """Asymptotic imaginary part of branch n: (2n + (1+c)/2)*pi."""
    return (2.0 * n + 0.5 * (1 + c)) * math.pi


@dataclass(frozen=True)
class CharacteristicRoot:
    """A refined root: location, branch label, residual, multiplicity.

    branch is the integer n of the asymptotic seed, or "real"/"zero" for
    roots found by the real-axis scan or the exact origin test.
    """

    lam: complex
    branch: int | str
    residual: float
    multiplicity: int = 1

    @property
    def re(self) -> float:
        return self.lam.real

    @property
    def im(self) -> float:
        return self.lam.imag


def _multiplicity(lam: complex, coeffs: LinearCoefficients) -> int:
    scale = 1.0 + abs(lam)
    if abs(char_h_deriv(lam, coeffs)) > _MULTIPLICITY_TOL * scale:
        return 1
    if abs(char_h_deriv2(lam, coeffs)) > _MULTIPLICITY_TOL * scale:
        return 2
    return 3


def _newton_refine(seed: complex, coeffs: LinearCoefficients, max_iter: int = 100):
    """Damped Newton on h; returns (root, residual) or None on stall."""
    lam = seed
    val = char_h(lam, coeffs)
    for _ in range(max_iter):
        if abs(val) <= 1e-13 * (1.0 + abs(lam)):
            break
        dval = char_h_deriv(lam, coeffs)
        if dval == 0:
            return None
        step = val / dval
        factor = 1.0
        for _ in range(50):
            cand = lam - factor * step
            cval = char_h(cand, coeffs)
            if abs(cval) < abs(val) or factor < 1e-12:
                break
            factor *= 0.5
        lam, val = cand, cval
    resid = abs(char_h(lam, coeffs))
    if resid > _RESIDUAL_ACCEPT * (1.0 + abs(lam)):
        return None
    return lam, resid


def _real_axis_roots(coeffs: LinearCoefficients):
    """Real roots via sign changes on [-R, R], R = |a| + |b| + 2.

    Outside that range |x*(e^x + c)| dominates and h cannot vanish.
    """
    r = abs(coeffs.a) + abs(coeffs.b) + 2.0
    xs = np.linspace(-r, r, 2001)
    hx = xs * (np.exp(xs) + coeffs.c) + coeffs.a * np.exp(xs) + coeffs.b
    roots = []
    sign = np.sign(hx)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        x = brentq(
            lambda u: u * (math.exp(u) + coeffs.c) + coeffs.a * math.exp(u) + coeffs.b,
            xs[i],
            xs[i + 1],
            xtol=1e-15,
            rtol=8.9e-16,
        )
        refined = _newton_refine(complex(x, 0.0), coeffs)
        if refined is not None:
            roots.append(refined)
    return roots


def find_roots(coeffs: LinearCoefficients, n_max: int) -> list[CharacteristicRoot]:
    """All characteristic roots with branch index |n| <= n_max.

    Branch seeds carry the first-order correction i*(Omega + d/Omega),
    d = a - c*b, which matches the expansion of the root near i*Omega(n);
    plain asymptotic seeds converge slowly at small |n|.  The origin is
    tested exactly (h(0) = a + b) and the real axis is scanned for the
    exceptional real roots.  Stalled branches raise NewtonStallWarning
    and are dropped, never fatal.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    d = coeffs.a - coeffs.c * coeffs.b
    candidates = []  # (priority, residual, lam, branch)

    if abs(coeffs.a + coeffs.b) <= 1e-13 * max(1.0, abs(coeffs.a), abs(coeffs.b)):
        candidates.append((0, 0.0, 0.0 + 0.0j, "zero"))

    for n in range(-n_max, n_max + 1):
        omega = omega_asymptotic(n, coeffs.c)
        if omega == 0.0:
            continue
        seed = 1j * (omega + d / omega)
        refined = _newton_refine(seed, coeffs)
        if refined is None:
            warnings.warn(
                f"branch n = {n} stalled from seed {seed:.6g}",
                NewtonStallWarning,
                stacklevel=2,
            )
            continue
        candidates.append((1, refined[1], refined[0], n))

    for lam, resid in _real_axis_roots(coeffs):
        candidates.append((2, resid, lam, "real"))

    candidates.sort(key=lambda item: (item[0], item[1]))
    accepted: list[CharacteristicRoot] = []
    for _, resid, lam, branch in candidates:
        if any(abs(lam - r.lam) <= _DEDUP_TOL for r in accepted):
            continue
        accepted.append(
            CharacteristicRoot(
                lam=lam,
                branch=branch,
                residual=resid,
                multiplicity=_multiplicity(lam, coeffs),
            )
        )
    accepted.sort(key=lambda r: (r.im, r.re))
    return accepted


# ---------------------------------------------------------------------------
# argument-principle certification


def _edge_winding(z0: complex, z1: complex, coeffs: LinearCoefficients):
    """Accumulated phase of h along a segment by adaptive bisection.

    Returns None when the contour runs too close to a root for the phase
    to be tracked reliably.
    """
    stack = [(z0, char_h(z0, coeffs), z1, char_h(z1, coeffs), 0)]
    total = 0.0
    while stack:
        a, ha, b, hb, depth = stack.pop()
        if abs(ha) < 1e-12 * (1.0 + abs(a)) or abs(hb) < 1e-12 * (1.0 + abs(b)):
            return None
        dphi = cmath.phase(hb / ha)
        if abs(dphi) <= 0.5 * math.pi and depth > 0:
            total += dphi
            continue
        if depth > 48:
            return None
        mid = 0.5 * (a + b)
        hmid = char_h(mid, coeffs)
        stack.append((a, ha, mid, hmid, depth + 1))
        stack.append((mid, hmid, b, hb, depth + 1))
    return total


def count_roots_rectangle(coeffs: LinearCoefficients, re_range: tuple, im_range: tuple) -> int:
    """Number of roots (with multiplicity) inside a rectangle.

    Computed as the winding number of h along the boundary.  If the
    contour passes within about 1e-6 of a root, the rectangle is nudged
    outward by up to 1e-3 and retried before giving up.
    """
    re_lo, re_hi = re_range
    im_lo, im_hi = im_range
    for attempt in range(4):
        eps = attempt * 0.25e-3
        corners = [
            complex(re_lo - eps, im_lo - eps),
            complex(re_hi + eps, im_lo - eps),
            complex(re_hi + eps, im_hi + eps),
            complex(re_lo - eps, im_hi + eps),
        ]
        total = 0.0
        failed = False
        for i in range(4):
            part = _edge_winding(corners[i], corners[(i + 1) % 4], coeffs)
            if part is None:
                failed = True
                break
            total += part
        if failed:
            continue
        count = total / (2.0 * math.pi)
        nearest = round(count)
        if abs(count - nearest) < 0.05:
            return int(nearest)
    raise ContourThroughRootError(
        f"contour {re_range} x {im_range} stays too close to a root after nudging"
    )


# ---------------------------------------------------------------------------
# stability classification


class StabilityRegion(enum.Enum):
    QUADRANT_STABLE = "quadrant_stable"
    QUADRANT_ALL_UNSTABLE = "quadrant_all_unstable"
    QUADRANT_ONE_STABLE_ROOT = "quadrant_one_stable_root"
    QUADRANT_ONE_UNSTABLE_ROOT = "quadrant_one_unstable_root"
    EDGE_STABLE = "edge_stable"
    EDGE_UNSTABLE = "edge_unstable"
    ORIGIN_STABLE = "origin_stable"
    ORIGIN_WEAKLY_UNSTABLE = "origin_weakly_unstable"
    DOUBLE_ROOT_EDGE_CASE = "double_root_edge_case"


@dataclass(frozen=True)
class StabilityVerdict:
    region: StabilityRegion
    witnesses: tuple
    real_part_signs: dict

    @property
    def max_re(self) -> float:
        return max((r.re for r in self.witnesses), default=math.nan)


def _analytic_region(coeffs: LinearCoefficients):
    """Exact case split on (a, b); returns (region, expected (pos, neg)).

    Expected counts are exact where the spectrum is known in closed form
    (the lines a = +-b factor the characteristic function); None means
    "at least one", used for the generic quadrants where only the
    pattern, not the count, is pinned down.
    """
    a, b, c = coeffs.a, coeffs.b, coeffs.c
    tol = 1e-12 * max(1.0, abs(a), abs(b))
    on_diag = abs(a - b) <= tol
    on_anti = abs(a + b) <= tol

    if on_diag and on_anti:
        if c == 1:
            return StabilityRegion.ORIGIN_STABLE, (0, 0)
        return StabilityRegion.ORIGIN_WEAKLY_UNSTABLE, (0, 0)

    if on_diag:
        if c == 1:
            # h factors as (lam + a)(e^lam + 1): one real root -a
            if a > 0:
                return StabilityRegion.EDGE_STABLE, (0, 1)
            return StabilityRegion.EDGE_UNSTABLE, (1, 0)
        # c = -1: purely imaginary spectrum on the whole line a = b
        return StabilityRegion.EDGE_STABLE, (0, 0)

    if on_anti:
        if c == 1:
            if a == -2.0:
                return StabilityRegion.DOUBLE_ROOT_EDGE_CASE, (0, 0)
            return StabilityRegion.EDGE_STABLE, (0, 0)
        # c = -1: h factors as (lam + a)(e^lam - 1): one real root -a
        if a > 0:
            return StabilityRegion.EDGE_STABLE, (0, 1)
        return StabilityRegion.EDGE_UNSTABLE, (1, 0)

    if a > abs(b):
        return StabilityRegion.QUADRANT_STABLE, (0, None)
    if a < -abs(b):
        return StabilityRegion.QUADRANT_ONE_UNSTABLE_ROOT, (1, None)
    # remaining: |b| > |a|, split by the sign of b and the neutral sign
    if (c == 1 and b > abs(a)) or (c == -1 and b < -abs(a)):
        return StabilityRegion.QUADRANT_ONE_STABLE_ROOT, (None, 1)
    return StabilityRegion.QUADRANT_ALL_UNSTABLE, (None, 0)


def classify(coeffs: LinearCoefficients, n_max: int = 8) -> StabilityVerdict:
    """Stability label for (a, b, c): exact case analysis, then verified.

    The analytic label comes first (the region boundaries a = +-b are
    exact); the computed roots must then reproduce the label's sign
    pattern, else VerificationMismatchError reports both answers.  Points
    within 1e-12 of a boundary are routed to the edge cases.
    """
    if n_max < 8:
        raise ValueError("n_max must be >= 8 for a meaningful verification")
    region, expected = _analytic_region(coeffs)
    roots = find_roots(coeffs, n_max)

    pos = neg = zero = 0
    for r in roots:
        tol = _ZERO_RE_TOL * (1.0 + abs(r.lam))
        if r.re > tol:
            pos += 1
        elif r.re < -tol:
            neg += 1
        else:
            zero += 1
    signs = {"pos": pos, "neg": neg, "zero": zero}

    exp_pos, exp_neg = expected
    ok = True
    if exp_pos is None:
        ok &= pos >= 1
    else:
        ok &= pos == exp_pos
    if exp_neg is None:
        ok &= neg >= 1
    else:
        ok &= neg == exp_neg
    if region is StabilityRegion.ORIGIN_WEAKLY_UNSTABLE:
        ok &= any(abs(r.lam) <= 1e-10 and r.multiplicity == 2 for r in roots)
    if region is StabilityRegion.DOUBLE_ROOT_EDGE_CASE:
        ok &= any(abs(r.lam) <= 1e-10 and r.multiplicity >= 2 for r in roots)
    if not ok:
        raise VerificationMismatchError(region.value, signs)
    return StabilityVerdict(region=region, witnesses=tuple(roots), real_part_signs=signs)


def quadrant3_expansion(b: float, m: float = math.pi) -> complex:
    """Second-order root expansion near i*m for a = 0, c = +1, small b.

    lam(b) = i*m - (i/m)*b + (1/(2*m^2) - i/m^3)*b^2 + O(b^3), with m an
    odd multiple of pi.  Its real part b^2/(2*m^2) is positive for b != 0,
    which is what pushes the whole branch family unstable in the b > |a|
    quadrant.
    """
    return 1j * m - (1j / m) * b + (0.5 / m**2 - 1j / m**3) * b * b


def diagram_row(a: float, b: float, c: int, n_max: int = 8) -> tuple:
    """One stability-diagram sweep entry: (a, b, c, region, nPos, nNeg, maxRe).

    Top-level function so sweep workers can pickle it.
    """
    verdict = classify(LinearCoefficients(a, b, c), n_max)
    return (
        a,
        b,
        c,
        verdict.region.value,
        verdict.real_part_signs["pos"],
        verdict.real_part_signs["neg"],
        verdict.max_re,
    )


def roots_to_csv(roots, path, header_comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        fh.write("n,re,im,residual,multiplicity\n")
        for r in roots:
            fh.write(
                f"{r.branch},{r.re:.17g},{r.im:.17g},{r.residual:.17g},{r.multiplicity}\n"
            )
