"""Forcing-term descriptions: zero, constant, single-tone and Fourier sources.

A source is a real-valued function of time.  Periodic variants carry
their fundamental pulsation omega (period T = 2*pi/omega).  Fourier
sources store complex coefficients indexed by the mode number k and must
satisfy s[-k] == conj(s[k]) so the reconstruction is real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_TWO_PI = 2.0 * math.pi
_SYMMETRY_TOL = 1e-13


class SourceSpec:
    """Base class; subclasses implement evaluate(t)."""

    variant = "abstract"

    def evaluate(self, t):
        raise NotImplementedError

    def __call__(self, t):
        return self.evaluate(t)

    @property
    def is_zero(self):
        return False

    @property
    def period(self):
        """Fundamental period, or None for non-oscillatory sources."""
        omega = getattr(self, "omega", None)
        return None if omega is None else _TWO_PI / omega

    def fourier_coefficients(self, kmax: int) -> np.ndarray:
        """Complex modes s_k for k = -kmax..kmax (index k + kmax)."""
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroSource(SourceSpec):
    variant = "zero"

    def evaluate(self, t):
        if np.ndim(t) == 0:
            return 0.0
        return np.zeros(np.shape(t))

    @property
    def is_zero(self):
        return True

    def fourier_coefficients(self, kmax):
        return np.zeros(2 * kmax + 1, dtype=complex)


@dataclass(frozen=True)
class ConstantSource(SourceSpec):
    value: float

    variant = "constant"

    def evaluate(self, t):
        if np.ndim(t) == 0:
            return self.value
        return np.full(np.shape(t), self.value)

    @property
    def is_zero(self):
        return self.value == 0.0

    def fourier_coefficients(self, kmax):
        coeffs = np.zeros(2 * kmax + 1, dtype=complex)
        coeffs[kmax] = self.value
        return coeffs


@dataclass(frozen=True)
class MonochromaticSource(SourceSpec):
    """amplitude * cos(omega*t + phase)."""

    amplitude: float
    omega: float
    phase: float = 0.0

    variant = "monochromatic"

    def __post_init__(self):
        if not self.omega > 0.0:
            raise ValueError("monochromatic source needs omega > 0")

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        out = self.amplitude * np.cos(self.omega * t + self.phase)
        return float(out) if out.ndim == 0 else out

    def fourier_coefficients(self, kmax):
        coeffs = np.zeros(2 * kmax + 1, dtype=complex)
        if kmax >= 1:
            half = 0.5 * self.amplitude * np.exp(1j * self.phase)
            coeffs[kmax + 1] = half
            coeffs[kmax - 1] = np.conj(half)
        return coeffs


@dataclass(frozen=True)
class FourierSource(SourceSpec):
    """Real periodic source given by complex modes {k: s_k}.

    Missing conjugate partners are filled in automatically; explicitly
    supplied pairs are checked for conjugate symmetry.
    """

    omega: float
    coefficients: dict = field(default_factory=dict)

    variant = "fourier"

    def __post_init__(self):
        if not self.omega > 0.0:
            raise ValueError("fourier source needs omega > 0")
        full = {}
        for k, v in self.coefficients.items():
            k = int(k)
            v = complex(v)
            full[k] = v
        for k, v in list(full.items()):
            if -k in full:
                mism = abs(full[-k] - np.conj(v))
                if mism > _SYMMETRY_TOL * max(1.0, abs(v)):
                    raise ValueError(
                        f"fourier source: coefficients at +-{abs(k)} are not conjugate "
                        f"(mismatch {mism:.2e})"
                    )
            else:
                full[-k] = complex(np.conj(v))
        if 0 in full and abs(full[0].imag) > _SYMMETRY_TOL * max(1.0, abs(full[0])):
            raise ValueError("fourier source: mode 0 must be real")
        object.__setattr__(self, "coefficients", full)

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        acc = np.zeros(t.shape, dtype=complex)
        for k, v in self.coefficients.items():
            acc += v * np.exp(1j * k * self.omega * t)
        out = acc.real
        return float(out) if out.ndim == 0 else out

    def fourier_coefficients(self, kmax):
        coeffs = np.zeros(2 * kmax + 1, dtype=complex)
        for k, v in self.coefficients.items():
            if abs(k) <= kmax:
                coeffs[k + kmax] = v
        return coeffs


def as_fourier_modes(source: SourceSpec, kmax: int) -> np.ndarray:
    """Truncated mode vector of any source, index k + kmax for k in [-kmax, kmax]."""
    return source.fourier_coefficients(kmax)
