"""Reservoir statistics and the Lindblad rates they induce.

Natural units throughout: k_B = 1, hbar = 1. A reservoir is characterized by
its statistics and temperature. The mean excitation at a qubit gap E is

    bosonic:    n = 1 / (exp(E/T) - 1),   T > 0
    fermionic:  n = 1 / (exp(E/T) + 1),   any T != 0

A fermionic reservoir with n > 1/2 is population inverted, which is exactly
the regime described by a negative temperature. Bosonic occupations cannot
invert, so negative T is rejected for them. The induced Lindblad rates are

    down = gamma * (1 + n)   bosonic      up = gamma * n
    down = gamma * (1 - n)   fermionic
"""

import math
from dataclasses import dataclass
from enum import Enum


class Statistics(str, Enum):
    BOSONIC = "bosonic"
    FERMIONIC = "fermionic"


class Role(str, Enum):
    COLD = "cold"
    ROOM = "room"
    HOT = "hot"


class ReservoirError(ValueError):
    """Invalid reservoir specification or occupation request."""


class InfiniteTemperatureError(ReservoirError):
    """Occupation sits exactly at the fermionic inversion point n = 1/2."""


# Beyond this, exp(E/T) is evaluated through its limit instead of directly.
_EXP_ARG_LIMIT = 700.0


@dataclass(frozen=True)
class ReservoirSpec:
    """Bath statistics plus temperature (and optionally a pinned occupation).

    occupation_override bypasses the temperature when evaluating occupations;
    it exists so that saturated limits (n -> 0 or n -> 1) can be represented
    exactly instead of through an extreme temperature.
    """

    statistics: Statistics
    temperature: float
    role: Role = Role.COLD
    occupation_override: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "statistics", Statistics(self.statistics))
        object.__setattr__(self, "role", Role(self.role))
        t = float(self.temperature)
        if not math.isfinite(t) or t == 0.0:
            raise ReservoirError(f"temperature must be finite and nonzero, got {t}")
        if self.statistics is Statistics.BOSONIC and t < 0.0:
            raise ReservoirError(
                "bosonic reservoirs cannot be population inverted: negative "
                f"temperature {t} is invalid"
            )
        object.__setattr__(self, "temperature", t)
        if self.occupation_override is not None:
            n = float(self.occupation_override)
            if self.statistics is Statistics.FERMIONIC and not 0.0 <= n <= 1.0:
                raise ReservoirError(f"fermionic occupation must lie in [0, 1], got {n}")
            if self.statistics is Statistics.BOSONIC and n < 0.0:
                raise ReservoirError(f"bosonic occupation must be >= 0, got {n}")
            object.__setattr__(self, "occupation_override", n)

    @classmethod
    def saturated(cls, statistics, occupation, role=Role.HOT):
        """Reservoir pinned at a fixed occupation (the hot-limit construct).

        The nominal temperature is back-computed where possible so the spec
        still reads sensibly; it is not used for rate evaluation.
        """
        statistics = Statistics(statistics)
        try:
            nominal = temperature_from_occupation(statistics, 1.0, occupation)
        except ReservoirError:
            nominal = 1.0
        return cls(statistics, nominal, role, occupation_override=occupation)

    def to_dict(self):
        d = {
            "statistics": self.statistics.value,
            "temperature": self.temperature,
            "role": self.role.value,
        }
        if self.occupation_override is not None:
            d["occupation_override"] = self.occupation_override
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(
            statistics=d["statistics"],
            temperature=d["temperature"],
            role=d.get("role", Role.COLD),
            occupation_override=d.get("occupation_override"),
        )


@dataclass(frozen=True)
class LindbladRates:
    """Downward (decay) and upward (excitation) rates for one qubit."""

    gamma_down: float
    gamma_up: float

    def __post_init__(self):
        for name, value in (("gamma_down", self.gamma_down), ("gamma_up", self.gamma_up)):
            if not math.isfinite(value) or value < 0.0:
                raise ReservoirError(f"{name} must be finite and >= 0, got {value}")


def occupation(spec: ReservoirSpec, gap: float) -> float:
    """Mean reservoir excitation at the given energy gap.

    Uses exp-of-negative forms so that sweeps probing T -> 0 on either side
    never overflow: large |E/T| collapses smoothly onto the physical limit.
    """
    if gap <= 0.0 or not math.isfinite(gap):
        raise ReservoirError(f"gap must be positive and finite, got {gap}")
    if spec.occupation_override is not None:
        return spec.occupation_override
    x = gap / spec.temperature
    if spec.statistics is Statistics.BOSONIC:
        if x > _EXP_ARG_LIMIT:
            return math.exp(-x)               # n -> exp(-E/T) as T -> 0+
        return 1.0 / math.expm1(x)
    # Fermionic: logistic evaluated through the decaying exponential on both
    # signs of T; underflow lands exactly on the physical limit (0 or 1).
    if x >= 0.0:
        e = math.exp(-x)
        return e / (1.0 + e)
    e = math.exp(x)
    return 1.0 / (1.0 + e)


def lindblad_rates(spec: ReservoirSpec, gap: float, gamma: float) -> LindbladRates:
    """Rates induced on a qubit: down = gamma (1 +/- n), up = gamma n."""
    if gamma < 0.0 or not math.isfinite(gamma):
        raise ReservoirError(f"dissipation rate must be finite and >= 0, got {gamma}")
    n = occupation(spec, gap)
    if spec.statistics is Statistics.BOSONIC:
        return LindbladRates(gamma_down=gamma * (1.0 + n), gamma_up=gamma * n)
    return LindbladRates(gamma_down=gamma * (1.0 - n), gamma_up=gamma * n)


def temperature_from_occupation(statistics, gap: float, n: float) -> float:
    """Invert the occupation formulas; diagnostic and test oracle.

    Fermionic n > 1/2 maps to a negative temperature (population inversion);
    n = 1/2 has no finite-temperature description.
    """
    statistics = Statistics(statistics)
    if gap <= 0.0 or not math.isfinite(gap):
        raise ReservoirError(f"gap must be positive and finite, got {gap}")
    if statistics is Statistics.FERMIONIC:
        if not 0.0 < n < 1.0:
            raise ReservoirError(f"fermionic occupation must lie in (0, 1), got {n}")
        if n == 0.5:
            raise InfiniteTemperatureError("n = 1/2 corresponds to infinite temperature")
        return gap / math.log((1.0 - n) / n)
    if n <= 0.0:
        raise ReservoirError(f"bosonic occupation must be positive, got {n}")
    return gap / math.log1p(1.0 / n)
