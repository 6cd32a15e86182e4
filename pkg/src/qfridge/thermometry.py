"""Reduced single-qubit states and effective-temperature assignment.

A qubit with gap E whose reduced state has ground population p carries the
effective temperature

    T = E / ln(p / (1 - p)),

positive for p > 1/2, negative (population inverted) for p < 1/2. The two
singular cases, p = 1/2 and p in {0, 1}, are reported as named sentinels so
that downstream CSV emission never sees an infinity or a NaN.

The perfect-insulation limit (cooled qubit detached from its own bath) admits
a closed form for its temperature, implemented in insulated_limit_temperature.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import TOL, max_abs
from .liouvillian import DensityMatrix


class TemperatureSentinel(Enum):
    INFINITE = "inf_temp"          # p_ground = 1/2: no finite temperature
    ZERO_FROM_ABOVE = "zero_temp+"  # p_ground = 1: T -> 0+
    ZERO_FROM_BELOW = "zero_temp-"  # p_ground = 0: fully inverted, T -> 0-


class ThermometryError(ValueError):
    pass


class OutOfRegimeError(ThermometryError):
    """Insulated-limit formula evaluated where its denominator is <= 0."""


def reduced_qubit_state(state: DensityMatrix, qubit_index: int) -> np.ndarray:
    """Partial trace down to one qubit (2x2), qubit 1 being the MSB factor."""
    if qubit_index not in (1, 2, 3):
        raise ThermometryError(f"qubit index must be 1..3, got {qubit_index}")
    if state.dim != 8:
        raise ThermometryError(f"expected a three-qubit state, got dim {state.dim}")
    tensor = state.matrix.reshape(2, 2, 2, 2, 2, 2)
    axes = [0, 1, 2]
    axes.remove(qubit_index - 1)
    # Trace the two unwanted qubits; row/column axes are offset by 3.
    reduced = np.trace(tensor, axis1=axes[1], axis2=axes[1] + 3)
    reduced = np.trace(reduced, axis1=axes[0], axis2=axes[0] + 2)
    return reduced


def effective_temperature(p_ground: float, gap: float):
    """Invert the Gibbs populations; returns a float or a TemperatureSentinel."""
    if not 0.0 <= p_ground <= 1.0:
        raise ThermometryError(f"p_ground must lie in [0, 1], got {p_ground}")
    return temperature_from_population_ratio(p_ground, 1.0 - p_ground, gap)


def temperature_from_population_ratio(p_ground: float, p_excited: float, gap: float):
    """T = E / ln(p_ground / p_excited), with the singular cases as sentinels.

    Taking both populations keeps full precision in the deeply cooled regime,
    where p_ground rounds to 1 but p_excited still carries ~16 digits.
    """
    if gap <= 0.0 or not math.isfinite(gap):
        raise ThermometryError(f"gap must be positive, got {gap}")
    if p_excited <= 0.0:
        return TemperatureSentinel.ZERO_FROM_ABOVE
    if p_ground <= 0.0:
        return TemperatureSentinel.ZERO_FROM_BELOW
    if abs(p_ground / (p_ground + p_excited) - 0.5) < TOL.infinite_temperature_band:
        return TemperatureSentinel.INFINITE
    return gap / math.log(p_ground / p_excited)


def temperature_as_float(temperature):
    """Collapse sentinels onto their limiting values for arithmetic use.

    Zero-from-above maps to 0.0 (arbitrarily cold), infinite and
    zero-from-below (inverted) map to +inf on the hotness scale.
    """
    if isinstance(temperature, TemperatureSentinel):
        if temperature is TemperatureSentinel.ZERO_FROM_ABOVE:
            return 0.0
        return math.inf
    return float(temperature)


@dataclass(frozen=True)
class QubitReadout:
    """Populations, residual coherence and effective temperature of one qubit."""

    qubit_index: int
    p_ground: float
    p_excited: float
    coherence_magnitude: float
    effective_temperature: object   # float or TemperatureSentinel

    def __post_init__(self):
        if abs(self.p_ground + self.p_excited - 1.0) > 1e-10:
            raise ThermometryError(
                f"populations do not sum to 1: {self.p_ground} + {self.p_excited}"
            )


def read_qubit(state: DensityMatrix, qubit_index: int, gap: float) -> QubitReadout:
    reduced = reduced_qubit_state(state, qubit_index)
    p_ground = max(float(reduced[0, 0].real), 0.0)
    p_excited = max(float(reduced[1, 1].real), 0.0)
    return QubitReadout(
        qubit_index=qubit_index,
        p_ground=p_ground,
        p_excited=p_excited,
        coherence_magnitude=float(abs(reduced[0, 1])),
        effective_temperature=temperature_from_population_ratio(p_ground, p_excited, gap),
    )


def coherence_is_negligible(state: DensityMatrix, qubit_index: int) -> bool:
    """Whether the reduced state is diagonal enough for Gibbs thermometry.

    Cooling steady states are expected to satisfy this; the readout reports
    the coherence magnitude rather than silently discarding it, and callers
    assert smallness through here.
    """
    reduced = reduced_qubit_state(state, qubit_index)
    return max_abs(reduced - np.diag(np.diagonal(reduced))) <= TOL.steady_coherence


def insulated_limit_temperature(t_c: float, t_h: float, e1: float, e3: float) -> float:
    """Cooled-qubit temperature in the perfect-insulation limit (gamma_1 -> 0):

        T1 = T_c / (1 + (E3/E1) (1 - T_c/T_h)).

    The same expression covers hot baths at negative temperature, where
    1 - T_c/T_h = 1 + T_c/|T_h| makes the denominator strictly larger and the
    cooling strictly stronger. Here t_c plays the role of the coldest bath
    still attached to the machine once qubit 1 is insulated.
    """
    if t_c <= 0.0:
        raise ThermometryError(f"t_c must be positive, got {t_c}")
    if t_h == 0.0 or math.isnan(t_h):
        raise ThermometryError(f"t_h must be nonzero, got {t_h}")
    if e1 <= 0.0 or e3 <= 0.0:
        raise ThermometryError(f"gaps must be positive, got e1={e1}, e3={e3}")
    denominator = 1.0 + (e3 / e1) * (1.0 - t_c / t_h)
    if denominator <= 0.0:
        raise OutOfRegimeError(
            f"insulated limit undefined: denominator {denominator:.3e} <= 0 "
            f"(t_c={t_c}, t_h={t_h}, e3/e1={e3 / e1})"
        )
    return t_c / denominator
