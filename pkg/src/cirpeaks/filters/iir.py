"""Lowpass IIR design from analog prototypes, and zero-phase application.

Butterworth poles come from the closed form on the unit circle; Bessel
(Thomson) prototypes are reversed Bessel polynomials whose roots are found
via companion-matrix eigenvalues and rescaled so the MAGNITUDE response is
-3.0103 dB at the cutoff.  Both designs go through a prewarped bilinear
transform and are realized as a cascade of second-order sections (a direct
high-order narrowband lowpass is numerically hopeless), each normalized to
unit DC gain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from .._util import atomic_write_text
from ..errors import NumericalError, ValidationError

_DC_TOL = 1e-9
_REAL_POLE_TOL = 1e-8


@dataclass(frozen=True)
class Biquad:
    """One second-order section; transfer function

        (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)

    First-order sections are embedded with b2 = a2 = 0.
    """

    b0: float
    b1: float
    b2: float
    a1: float
    a2: float

    def poles(self) -> np.ndarray:
        return np.roots([1.0, self.a1, self.a2])

    def dc_gain(self) -> float:
        return (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)


@dataclass(frozen=True)
class IirCoefficients:
    """A stable, unity-DC-gain biquad cascade."""

    sections: tuple[Biquad, ...]
    overall_gain: float = 1.0

    def __post_init__(self):
        if not self.sections:
            raise ValidationError("cascade needs at least one section")
        dc = self.overall_gain
        for pos, s in enumerate(self.sections):
            radii = np.abs(s.poles())
            if not np.all(radii < 1.0):
                raise NumericalError(
                    f"section {pos} is unstable (pole radius {radii.max():.6f})"
                )
            dc *= s.dc_gain()
        if abs(dc - 1.0) > _DC_TOL:
            raise NumericalError(f"cascade DC gain {dc!r} is not 1 within {_DC_TOL}")

    def as_array(self) -> np.ndarray:
        return np.array([[s.b0, s.b1, s.b2, s.a1, s.a2] for s in self.sections])


def _validate_cutoff(order: int, cutoff_fraction_fs: float) -> None:
    if order < 1:
        raise ValidationError(f"filter order must be >= 1, got {order}")
    if not (0.0 < cutoff_fraction_fs < 0.5):
        raise ValidationError(
            f"cutoff must be a fraction of Fs in (0, 0.5), got {cutoff_fraction_fs}"
        )


def _bilinear_sections(analog_poles) -> tuple[Biquad, ...]:
    """Map analog poles through s = 2 (1 - z^-1)/(1 + z^-1) and pair them.

    Every analog pole contributes a digital zero at z = -1; conjugate pole
    pairs become biquads, leftover real poles become first-order sections.
    Each section's numerator is scaled for unit DC gain.
    """
    digital = [(2.0 + p) / (2.0 - p) for p in analog_poles]
    pairs = [z for z in digital if z.imag > _REAL_POLE_TOL * (1.0 + abs(z))]
    n_neg = sum(1 for z in digital if z.imag < -_REAL_POLE_TOL * (1.0 + abs(z)))
    reals = [z.real for z in digital if abs(z.imag) <= _REAL_POLE_TOL * (1.0 + abs(z))]
    if len(pairs) != n_neg or 2 * len(pairs) + len(reals) != len(digital):
        raise NumericalError("conjugate pole pairing failed")

    sections = []
    for z in sorted(pairs, key=lambda z: (abs(z), z.real)):
        a1 = -2.0 * z.real
        a2 = abs(z) ** 2
        g = (1.0 + a1 + a2) / 4.0  # two zeros at z = -1: numerator (1 + z^-1)^2
        sections.append(Biquad(g, 2.0 * g, g, a1, a2))
    for r in sorted(reals):
        a1 = -r
        g = (1.0 + a1) / 2.0
        sections.append(Biquad(g, g, 0.0, a1, 0.0))
    return tuple(sections)


def design_butterworth(order: int, cutoff_fraction_fs: float) -> IirCoefficients:
    """Maximally-flat lowpass; -3.0103 dB at the cutoff by construction.

    Prototype poles exp(j pi (2m + n - 1) / (2n)), m = 1..n, scaled by the
    prewarped cutoff 2 tan(pi fc) before the bilinear transform.
    """
    _validate_cutoff(order, cutoff_fraction_fs)
    warped = 2.0 * np.tan(np.pi * cutoff_fraction_fs)
    m = np.arange(1, order + 1)
    prototype = np.exp(1j * np.pi * (2 * m + order - 1) / (2 * order))
    return IirCoefficients(_bilinear_sections(warped * prototype))


def reverse_bessel_poly(order: int) -> list[int]:
    """Coefficients (highest power first) of the reversed Bessel polynomial.

    theta_0 = 1, theta_1 = s + 1, theta_n = (2n-1) theta_{n-1} + s^2 theta_{n-2}.
    Exact integer arithmetic; e.g. order 4 gives s^4 + 10s^3 + 45s^2 + 105s + 105.
    """
    if order < 0:
        raise ValidationError("order must be >= 0")
    prev2 = [1]  # theta_0
    if order == 0:
        return prev2
    prev1 = [1, 1]  # theta_1
    for n in range(2, order + 1):
        scaled = [0] + [(2 * n - 1) * c for c in prev1]  # degree n, leading 0
        shifted = prev2 + [0, 0]  # s^2 * theta_{n-2}, degree n
        prev2, prev1 = prev1, [a + b for a, b in zip(shifted, scaled)]
    return prev1


def _bessel_magnitude_cutoff(coeffs: np.ndarray) -> float:
    """Frequency where the all-pole prototype magnitude falls to 1/sqrt(2)."""
    dc2 = float(coeffs[-1]) ** 2

    def excess(w):
        return abs(np.polyval(coeffs, 1j * w)) ** 2 - 2.0 * dc2

    hi = 1.0
    while excess(hi) < 0.0:
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


def design_bessel(order: int, cutoff_fraction_fs: float) -> IirCoefficients:
    """Bessel/Thomson lowpass: maximally flat group delay.

    The prototype is magnitude-normalized (-3.0103 dB at the cutoff) rather
    than delay-normalized, so attenuation is comparable across filter kinds.
    """
    _validate_cutoff(order, cutoff_fraction_fs)
    if order > 25:
        raise ValidationError("bessel design is limited to order 25 (root conditioning)")
    coeffs = np.array(reverse_bessel_poly(order), dtype=np.float64)
    roots = np.roots(coeffs)
    if not np.all(roots.real < 0.0):
        raise NumericalError("bessel prototype roots are not all in the left half-plane")
    w3 = _bessel_magnitude_cutoff(coeffs)
    warped = 2.0 * np.tan(np.pi * cutoff_fraction_fs)
    return IirCoefficients(_bilinear_sections(roots / w3 * warped))


def frequency_response(coeffs: IirCoefficients, freqs_fraction_fs) -> np.ndarray:
    """Complex response at the given frequencies (fractions of Fs)."""
    f = np.asarray(freqs_fraction_fs, dtype=np.float64)
    zinv = np.exp(-2j * np.pi * f)
    h = np.full(f.shape, coeffs.overall_gain, dtype=np.complex128)
    for s in coeffs.sections:
        h *= (s.b0 + s.b1 * zinv + s.b2 * zinv**2) / (1.0 + s.a1 * zinv + s.a2 * zinv**2)
    return h


def group_delay(coeffs: IirCoefficients, freqs_fraction_fs) -> np.ndarray:
    """Numeric group delay -d(phase)/d(omega) in samples."""
    f = np.asarray(freqs_fraction_fs, dtype=np.float64)
    phase = np.unwrap(np.angle(frequency_response(coeffs, f)))
    return -np.gradient(phase, 2.0 * np.pi * f)


def _steady_state_zi(sections: np.ndarray, x0: float) -> np.ndarray:
    """DF2T state that starts each section settled at the constant x0."""
    zi = np.empty((sections.shape[0], 2))
    u = x0
    for s in range(sections.shape[0]):
        b0, b1, b2, a1, a2 = sections[s]
        y0 = u * (b0 + b1 + b2) / (1.0 + a1 + a2)
        zi[s, 1] = b2 * u - a2 * y0
        zi[s, 0] = b1 * u - a1 * y0 + zi[s, 1]
        u = y0
    return zi


def _single_pass(coeffs: IirCoefficients, x: np.ndarray) -> np.ndarray:
    sections = coeffs.as_array()
    zi = _steady_state_zi(sections, float(x[0]))
    y = kernels.biquad_pass(sections, np.ascontiguousarray(x), zi)
    if coeffs.overall_gain != 1.0:
        y = y * coeffs.overall_gain
    return y


def apply_iir_zero_phase(coeffs: IirCoefficients, series) -> np.ndarray:
    """Forward-backward filtering with odd edge extension.

    The input is extended by 3 * (2 * n_sections + 1) samples on each side,
    reflected and negated about the endpoints, filtered once per direction
    (steady-state initial conditions), and trimmed.  The passband comes out
    phase-free and the magnitude response is squared.
    """
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise ValidationError("series must be 1-D")
    pad = 3 * (2 * len(coeffs.sections) + 1)
    if x.size <= pad:
        raise ValidationError(f"series of {x.size} samples is too short for padding {pad}")
    left = 2.0 * x[0] - x[pad:0:-1]
    right = 2.0 * x[-1] - x[-2 : -pad - 2 : -1]
    ext = np.concatenate([left, x, right])
    y = _single_pass(coeffs, ext)
    y = _single_pass(coeffs, y[::-1])[::-1]
    return y[pad : pad + x.size].copy()


def coefficients_csv(coeffs: IirCoefficients) -> str:
    """Debug dump: ``section,b0,b1,b2,a1,a2`` rows."""
    lines = ["section,b0,b1,b2,a1,a2"]
    for pos, s in enumerate(coeffs.sections):
        lines.append(f"{pos},{s.b0!r},{s.b1!r},{s.b2!r},{s.a1!r},{s.a2!r}")
    return "\n".join(lines) + "\n"


def save_coefficients_csv(coeffs: IirCoefficients, path) -> None:
    atomic_write_text(path, coefficients_csv(coeffs))
