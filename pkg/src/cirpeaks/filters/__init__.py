"""Classical trend extractors and their named presets.

Any of the four kinds can stand in for the neural prediction: the trend it
produces feeds detect.residual with warmup 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core.trace import CirTrace
from ..errors import ValidationError
from .iir import (
    Biquad,
    IirCoefficients,
    apply_iir_zero_phase,
    coefficients_csv,
    design_bessel,
    design_butterworth,
    frequency_response,
    group_delay,
    reverse_bessel_poly,
    save_coefficients_csv,
)
from .smoothing import apply_median, apply_savgol, savgol_coefficients

KINDS = ("butterworth", "bessel", "savgol", "median")


@dataclass(frozen=True)
class FilterSpec:
    """Configuration for one classical filter.

    kind                "butterworth" | "bessel" | "savgol" | "median"
    order               IIR kinds only
    cutoff_fraction_fs  IIR kinds only; cutoff = fraction * sampling rate
    window              savgol/median only; odd
    polyorder           savgol only; < window
    """

    kind: str
    order: int | None = None
    cutoff_fraction_fs: float | None = None
    window: int | None = None
    polyorder: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown filter kind {self.kind!r}")
        if self.kind in ("butterworth", "bessel"):
            if self.order is None or self.cutoff_fraction_fs is None:
                raise ValidationError(f"{self.kind} needs order and cutoff_fraction_fs")
            if self.window is not None or self.polyorder is not None:
                raise ValidationError(f"{self.kind} does not take window/polyorder")
            if self.order < 1:
                raise ValidationError(f"order must be >= 1, got {self.order}")
            if not (0.0 < self.cutoff_fraction_fs < 0.5):
                raise ValidationError("cutoff_fraction_fs must be in (0, 0.5), below Nyquist")
        else:
            if self.order is not None or self.cutoff_fraction_fs is not None:
                raise ValidationError(f"{self.kind} does not take order/cutoff")
            if self.window is None or self.window < 1 or self.window % 2 == 0:
                raise ValidationError(f"{self.kind} needs an odd positive window")
            if self.kind == "savgol":
                if self.polyorder is None or not (0 <= self.polyorder < self.window):
                    raise ValidationError("savgol needs 0 <= polyorder < window")
            elif self.polyorder is not None:
                raise ValidationError("median does not take polyorder")


@dataclass(frozen=True)
class FilterPreset:
    name: str
    spec: FilterSpec
    note: str = ""


# The reference configurations this package benchmarks against.  The two
# window-based entries were specified as length 100, which a symmetric
# kernel/median cannot realize; the presets carry the repaired odd value.
PRESETS = {
    "butter-table5": FilterPreset(
        "butter-table5", FilterSpec("butterworth", order=10, cutoff_fraction_fs=0.04)
    ),
    "bessel-table5": FilterPreset(
        "bessel-table5", FilterSpec("bessel", order=4, cutoff_fraction_fs=0.1)
    ),
    "savgol-table5": FilterPreset(
        "savgol-table5",
        FilterSpec("savgol", window=101, polyorder=5),
        note="window repaired 100 -> 101 (symmetric kernel needs an odd length)",
    ),
    "median-table5": FilterPreset(
        "median-table5",
        FilterSpec("median", window=101),
        note="window repaired 100 -> 101 (sliding median needs an odd length)",
    ),
}

PRESET_NAMES = tuple(PRESETS)


def filter_preset(name: str) -> FilterSpec:
    try:
        return PRESETS[name].spec
    except KeyError:
        raise ValidationError(
            f"unknown filter preset {name!r}; choose from {PRESET_NAMES}"
        ) from None


def design(spec: FilterSpec) -> IirCoefficients:
    """Design the biquad cascade for an IIR spec."""
    if spec.kind == "butterworth":
        return design_butterworth(spec.order, spec.cutoff_fraction_fs)
    if spec.kind == "bessel":
        return design_bessel(spec.order, spec.cutoff_fraction_fs)
    raise ValidationError(f"{spec.kind} is not an IIR filter")


def filter_trend(spec: FilterSpec, trace: CirTrace) -> np.ndarray:
    """Extract the smoothed trend of a trace (same length as the input)."""
    x = trace.samples
    if spec.kind == "savgol":
        return apply_savgol(x, savgol_coefficients(spec.window, spec.polyorder))
    if spec.kind == "median":
        return apply_median(x, spec.window)
    return apply_iir_zero_phase(design(spec), x)


def spec_to_dict(spec: FilterSpec) -> dict:
    doc = {"kind": spec.kind}
    for name in ("order", "cutoff_fraction_fs", "window", "polyorder"):
        value = getattr(spec, name)
        if value is not None:
            doc[name] = value
    return doc


def spec_from_dict(doc: dict) -> FilterSpec:
    return FilterSpec(**doc)


__all__ = [
    "Biquad",
    "FilterPreset",
    "FilterSpec",
    "IirCoefficients",
    "KINDS",
    "PRESETS",
    "PRESET_NAMES",
    "apply_iir_zero_phase",
    "apply_median",
    "apply_savgol",
    "coefficients_csv",
    "design",
    "design_bessel",
    "design_butterworth",
    "filter_preset",
    "filter_trend",
    "frequency_response",
    "group_delay",
    "reverse_bessel_poly",
    "savgol_coefficients",
    "save_coefficients_csv",
    "spec_from_dict",
    "spec_to_dict",
]
