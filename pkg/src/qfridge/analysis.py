"""Sweeps, plateau detection, cooling thresholds, insulation limits, calibration.

The hot-bath temperature axis behaves differently on the two sides:

  * negative side (fermionic bath): as T_h -> 0- the occupation saturates at
    n3 -> 1, the induced rates stay bounded, and the cooled-qubit temperature
    converges to a true asymptote. "Infinitely hot" is represented exactly by
    pinning n3 = 1 - FERMIONIC_SATURATION_DEFICIT.

  * positive side (bosonic bath): the occupation, and with it both induced
    rates, grow without bound as T_h increases. The diverging rates quench the
    cooling channel, so the curve T1(T_h) reaches a minimum and then creeps
    back up to T_c. The "plateau" is therefore the lowest value reached, found
    by scanning a geometric grid and polishing the minimum, not by waiting for
    successive samples to stop moving (they never do on this side).

Thresholds come in two modes because the bundled reference numbers mix two
readings: the best case over the whole axis (plateau) and the sweep-window
edge. Both are implemented; see cooling_threshold.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .linalg import TOL
from .liouvillian import FridgeConfig, build_liouvillian
from .reservoirs import ReservoirSpec, Role, Statistics
from .steady_state import SteadyStateError, solve_direct
from .thermometry import (
    TemperatureSentinel,
    insulated_limit_temperature,
    read_qubit,
    temperature_as_float,
)


class Direction(str, Enum):
    POSITIVE = "positive"    # bosonic hot bath, T_h > 0
    NEGATIVE = "negative"    # fermionic hot bath, T_h < 0


class ThresholdMode(str, Enum):
    PLATEAU = "plateau"      # best case over the whole hot-temperature axis
    GRID_EDGE = "grid-edge"  # value at the reference sweep-window edge


class AnalysisError(RuntimeError):
    pass


class BracketError(AnalysisError):
    """Threshold bisection could not bracket a sign change."""


# Deepest fermionic inversion kept distinguishable from n = 1 in float64
# (1 - 1e-15 is ~4.5 ulp away from 1). Walking closer would round the
# occupation to exactly 1 and silently switch off the decay channel.
FERMIONIC_SATURATION_DEFICIT = 1e-15
# Bosonic stand-in for "infinitely hot"; reported as a diagnostic only,
# since on this side the limit re-thermalizes the target qubit (see module
# docstring) and is NOT the plateau.
BOSONIC_SATURATION_TEMPERATURE = 1e6

POSITIVE_WINDOW_EDGE = 10.0     # reference sweep window is T_h in [1, 10]
NEGATIVE_WINDOW_EDGE = -0.1
PLATEAU_GRID_START = 1.0
PLATEAU_GRID_CAP = 1e4
PLATEAU_GRID_RATIO = 1.12
NEGATIVE_WALK_START = -5.0
NEGATIVE_WALK_SHRINK = 0.75

THRESHOLD_BRACKET = (1e-3, 5.0)

# Targets for the bundled reproduction scenarios: lowest cooled-qubit
# temperatures at the reference operating point (gaps (1, 5, 4), unit rates,
# room bath at 2) for cold-bath temperatures 1, 1.5 and 2.
REFERENCE_PLATEAUS = {
    (1.0, Direction.POSITIVE): 0.9486,
    (1.5, Direction.POSITIVE): 1.4054,
    (2.0, Direction.POSITIVE): 1.867,
    (1.0, Direction.NEGATIVE): 0.7805,
    (1.5, Direction.NEGATIVE): 1.1615,
    (2.0, Direction.NEGATIVE): 1.5568,
}
REFERENCE_THRESHOLDS = {Direction.POSITIVE: 0.48, Direction.NEGATIVE: 0.0275}
# Coupling recovered by calibrate_coupling against REFERENCE_PLATEAUS
# (a single value fits all six targets to ~1e-4 relative).
CALIBRATED_COUPLING = 1.0

DEFAULT_COUPLING_GRID = (0.05, 0.1, 0.2, 0.5, 1.0)
DEFAULT_GAMMA1_SEQUENCE = (1e-1, 1e-2, 1e-3, 1e-4)


@dataclass(frozen=True)
class SweepRecord:
    """One sweep point; t1 fields may hold a TemperatureSentinel."""

    swept_value: float
    t1: object
    t1_minus_tc: object
    residual: float
    coherence_magnitude: float
    status: str = "ok"


@dataclass(frozen=True)
class PlateauResult:
    plateau_t1: float
    plateau_detected_at: float
    tolerance_used: float
    saturation_t1: float      # diagnostic: T1 with the hot occupation pinned
    walk_flattened: bool = True   # False in the deep-cooling regime, where T1
    # keeps tracking the occupation all the way to the representable floor


@dataclass(frozen=True)
class InsulationResult:
    gamma1_values: tuple
    t1_values: tuple
    analytic_t1: float
    final_relative_gap: float
    smallest_usable_gamma1: float


@dataclass(frozen=True)
class CalibrationResult:
    coupling: float
    max_relative_error: float
    achieved: dict
    landscape: tuple          # ((g, max relative error), ...) over the search
    within_tolerance: bool    # best error <= 5%

    def report_lines(self):
        lines = [
            f"calibrated coupling g = {self.coupling:.6g} "
            f"(max relative error {self.max_relative_error:.3e}, "
            f"{'within' if self.within_tolerance else 'EXCEEDS'} 5% tolerance)"
        ]
        for (tc, direction), (value, target, err) in sorted(
                self.achieved.items(), key=lambda kv: (kv[0][1].value, kv[0][0])):
            lines.append(
                f"  tc={tc:<4} {direction.value:<8} plateau={value:.6f} "
                f"target={target:.4f} rel.err={err:.2e}"
            )
        lines.append("  landscape: " + ", ".join(
            f"g={g:.4g}:{err:.2e}" for g, err in self.landscape))
        return lines


def solve_for_readout(config: FridgeConfig):
    """Steady state plus the cooled-qubit readout, the unit of every sweep."""
    result = solve_direct(build_liouvillian(config))
    readout = read_qubit(result.state, 1, config.gaps[0])
    return result, readout


def _t1_value(config: FridgeConfig) -> float:
    """Cooled-qubit temperature as a float (sentinels collapsed to limits)."""
    _, readout = solve_for_readout(config)
    return temperature_as_float(readout.effective_temperature)


def _record_for(config, th):
    tc = config.cold_temperature
    try:
        result, readout = solve_for_readout(config.with_hot_temperature(th))
    except (SteadyStateError, ValueError) as exc:
        return SweepRecord(
            swept_value=float(th), t1=math.nan, t1_minus_tc=math.nan,
            residual=math.nan, coherence_magnitude=math.nan,
            status=f"{type(exc).__name__}: {exc}",
        )
    t1 = readout.effective_temperature
    if isinstance(t1, TemperatureSentinel):
        t1_minus_tc = t1
    else:
        t1_minus_tc = t1 - tc
    return SweepRecord(
        swept_value=float(th),
        t1=t1,
        t1_minus_tc=t1_minus_tc,
        residual=result.residual,
        coherence_magnitude=readout.coherence_magnitude,
        status="ok",
    )


def sweep_hot_temperature(config: FridgeConfig, th_values, max_workers=1):
    """One steady-state solve per hot-bath temperature, ordered as given.

    Points are independent; max_workers > 1 fans them out over threads.
    Per-point solver failures are recorded in the row status, not raised.
    """
    th_values = [float(v) for v in th_values]
    if not th_values:
        raise AnalysisError("empty sweep list")
    hot = config.reservoirs[2]
    for v in th_values:
        if v == 0.0 or (hot.statistics is Statistics.BOSONIC and v < 0.0):
            raise AnalysisError(
                f"T_h = {v} invalid for a {hot.statistics.value} hot reservoir"
            )
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(lambda th: _record_for(config, th), th_values))
    return [_record_for(config, th) for th in th_values]


def _saturated_hot_config(config: FridgeConfig, direction: Direction) -> FridgeConfig:
    if direction is Direction.POSITIVE:
        hot = ReservoirSpec(Statistics.BOSONIC, BOSONIC_SATURATION_TEMPERATURE, Role.HOT)
    else:
        hot = ReservoirSpec.saturated(
            Statistics.FERMIONIC, 1.0 - FERMIONIC_SATURATION_DEFICIT, Role.HOT)
    return config.with_hot_reservoir(hot)


def _negative_walk_floor(config: FridgeConfig) -> float:
    """|T_h| below which the fermionic occupation would round to exactly 1."""
    e3 = config.gaps[2]
    return e3 / math.log((1.0 - FERMIONIC_SATURATION_DEFICIT)
                         / FERMIONIC_SATURATION_DEFICIT)


def _polish_minimum(t1_at, bracket_lo, bracket_hi, tolerance, budget=40):
    """Golden-section minimization of T1 over T_h until samples stop moving."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = math.log(bracket_lo), math.log(bracket_hi)
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = t1_at(math.exp(c)), t1_at(math.exp(d))
    for _ in range(budget):
        if abs(fc - fd) < tolerance:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = t1_at(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = t1_at(math.exp(d))
    if fc <= fd:
        return math.exp(c), fc
    return math.exp(d), fd


def find_plateau(config: FridgeConfig, direction: Direction,
                 tolerance: float = TOL.plateau_step) -> PlateauResult:
    """Lowest cooled-qubit temperature as the hot bath saturates its limit.

    Negative side: geometric walk of T_h toward 0- until successive samples
    differ by less than the tolerance, cross-checked against the exactly
    saturated occupation (which is returned as the plateau, being the limit).

    Positive side: scan of a geometric T_h grid followed by a golden-section
    polish of the minimum, so the reported value is the lowest temperature
    the machine actually reaches before the bosonic rate growth quenches it.
    """
    direction = Direction(direction)
    if direction is Direction.POSITIVE:
        return _find_plateau_positive(config, tolerance)
    return _find_plateau_negative(config, tolerance)


def _find_plateau_positive(config, tolerance):
    hot = config.reservoirs[2]
    if hot.statistics is not Statistics.BOSONIC:
        config = config.with_hot_reservoir(
            ReservoirSpec(Statistics.BOSONIC, POSITIVE_WINDOW_EDGE, Role.HOT))

    def t1_at(th):
        return _t1_value(config.with_hot_temperature(th))

    grid = np.geomspace(PLATEAU_GRID_START, PLATEAU_GRID_CAP,
                        int(math.log(PLATEAU_GRID_CAP / PLATEAU_GRID_START)
                            / math.log(PLATEAU_GRID_RATIO)) + 1)
    values = [t1_at(th) for th in grid]
    k = int(np.argmin(values))
    saturation = _t1_value(_saturated_hot_config(config, Direction.POSITIVE))
    if k == len(grid) - 1 and values[-2] - values[-1] >= tolerance:
        # Still descending at the cap: no interior minimum; T1 creeps down
        # toward an infimum it only attains in the hot limit, so the pinned
        # saturation point is the best representable value.
        return PlateauResult(
            plateau_t1=min(values[-1], saturation),
            plateau_detected_at=float(BOSONIC_SATURATION_TEMPERATURE),
            tolerance_used=tolerance,
            saturation_t1=saturation,
            walk_flattened=False,
        )
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    th_best, t1_best = _polish_minimum(t1_at, lo, hi, tolerance)
    if values[k] < t1_best:
        th_best, t1_best = float(grid[k]), values[k]
    return PlateauResult(
        plateau_t1=t1_best,
        plateau_detected_at=float(th_best),
        tolerance_used=tolerance,
        saturation_t1=saturation,
    )


def _find_plateau_negative(config, tolerance):
    def t1_at(th):
        hot = ReservoirSpec(Statistics.FERMIONIC, th, Role.HOT)
        return _t1_value(config.with_hot_reservoir(hot))

    floor = _negative_walk_floor(config)
    th = NEGATIVE_WALK_START
    previous = t1_at(th)
    detected_at = th
    flattened = False
    while abs(th) * NEGATIVE_WALK_SHRINK >= floor:
        th = -abs(th) * NEGATIVE_WALK_SHRINK
        current = t1_at(th)
        if abs(current - previous) < tolerance:
            detected_at = th
            flattened = True
            break
        previous = current
        detected_at = th
    # The saturated occupation is the representable limit of T_h -> 0-, so it
    # is the plateau value whether or not the walk flattened before the floor
    # (in the deep-cooling regime T1 keeps tracking n3 all the way down).
    saturation = _t1_value(_saturated_hot_config(config, Direction.NEGATIVE))
    return PlateauResult(
        plateau_t1=saturation,
        plateau_detected_at=float(detected_at),
        tolerance_used=tolerance,
        saturation_t1=saturation,
        walk_flattened=flattened,
    )


def _window_edge_t1(config: FridgeConfig, direction: Direction) -> float:
    if direction is Direction.POSITIVE:
        hot = ReservoirSpec(Statistics.BOSONIC, POSITIVE_WINDOW_EDGE, Role.HOT)
    else:
        hot = ReservoirSpec(Statistics.FERMIONIC, NEGATIVE_WINDOW_EDGE, Role.HOT)
    return _t1_value(config.with_hot_reservoir(hot))


def cooling_threshold(config_template: FridgeConfig, direction: Direction,
                      mode: ThresholdMode = ThresholdMode.PLATEAU,
                      resolution: float = TOL.threshold_resolution,
                      bracket=THRESHOLD_BRACKET) -> float:
    """Smallest cold-bath temperature at which the machine still cools.

    Bisection on the sign of (best-case T1) - T_c. In PLATEAU mode the best
    case is the plateau value (hot bath saturated); in GRID_EDGE mode it is
    T1 at the reference window edge (T_h = 10, or -0.1 on the negative side).
    """
    direction = Direction(direction)
    mode = ThresholdMode(mode)

    def objective(tc):
        config = config_template.with_cold_temperature(tc)
        if mode is ThresholdMode.PLATEAU:
            value = find_plateau(config, direction).plateau_t1
        else:
            value = _window_edge_t1(config, direction)
        return value - tc

    lo, hi = bracket
    f_lo, f_hi = objective(lo), objective(hi)
    if not (f_lo > 0.0 and f_hi < 0.0):
        raise BracketError(
            f"no sign change on T_c bracket {bracket}: "
            f"objective({lo}) = {f_lo:.3e}, objective({hi}) = {f_hi:.3e}"
        )
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if objective(mid) < 0.0:
            hi = mid
        else:
            lo = mid
    return hi


def insulation_limit(config: FridgeConfig,
                     gamma1_sequence=DEFAULT_GAMMA1_SEQUENCE) -> InsulationResult:
    """Decouple the cooled qubit from its own bath and watch T1 approach the
    closed-form insulated limit.

    The analytic value is evaluated with the room-bath temperature, because
    once gamma_1 -> 0 the cold bath drops out of the generator entirely and
    the qubit equilibrates against the (room, hot) pair alone.
    """
    sequence = tuple(float(g) for g in gamma1_sequence)
    if not sequence or any(g <= 0.0 for g in sequence):
        raise AnalysisError("gamma1 sequence must be positive")
    if any(b >= a for a, b in zip(sequence, sequence[1:])):
        raise AnalysisError("gamma1 sequence must be strictly decreasing")
    analytic = insulated_limit_temperature(
        t_c=config.reservoirs[1].temperature,
        t_h=config.reservoirs[2].temperature,
        e1=config.gaps[0],
        e3=config.gaps[2],
    )
    used, values = [], []
    for gamma1 in sequence:
        try:
            values.append(_t1_value(config.with_gamma1(gamma1)))
            used.append(gamma1)
        except SteadyStateError:
            break
    if not used:
        raise AnalysisError("no usable gamma1 in the sequence")
    gap = abs(values[-1] - analytic) / abs(analytic)
    return InsulationResult(
        gamma1_values=tuple(used),
        t1_values=tuple(values),
        analytic_t1=analytic,
        final_relative_gap=gap,
        smallest_usable_gamma1=used[-1],
    )


def _plateau_errors(base_config, coupling, targets):
    achieved = {}
    worst = 0.0
    for (tc, direction), target in targets.items():
        config = replace(base_config.with_cold_temperature(tc), coupling=coupling)
        value = find_plateau(config, Direction(direction)).plateau_t1
        err = abs(value - target) / abs(target)
        achieved[(tc, Direction(direction))] = (value, target, err)
        worst = max(worst, err)
    return worst, achieved


def calibrate_coupling(base_config: FridgeConfig,
                       targets=None,
                       search_grid=DEFAULT_COUPLING_GRID,
                       refine: bool = True) -> CalibrationResult:
    """Search the coupling that best reproduces the reference plateaus.

    Grid search minimizing the maximum relative error over all targets,
    followed by a golden-section refinement around the best grid point.
    Always returns a result; within_tolerance reports whether the best error
    clears 5%, so a failed calibration still carries its error landscape.
    """
    targets = dict(targets) if targets is not None else dict(REFERENCE_PLATEAUS)
    if not targets:
        raise AnalysisError("no calibration targets")
    grid = sorted(float(g) for g in search_grid)
    if not grid or any(g <= 0.0 for g in grid):
        raise AnalysisError("search grid must be positive")
    landscape = []
    for g in grid:
        err, _ = _plateau_errors(base_config, g, targets)
        landscape.append((g, err))
    best_g, best_err = min(landscape, key=lambda p: p[1])

    if refine and len(grid) > 1:
        k = grid.index(best_g)
        lo = grid[max(k - 1, 0)] if k > 0 else best_g / 2.0
        hi = grid[min(k + 1, len(grid) - 1)] if k < len(grid) - 1 else best_g * 2.0
        inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = math.log(lo), math.log(hi)
        cache = {}

        def err_at(g):
            if g not in cache:
                cache[g] = _plateau_errors(base_config, g, targets)[0]
            return cache[g]

        c = b - inv_phi * (b - a)
        d = a + inv_phi * (b - a)
        for _ in range(12):
            gc, gd = math.exp(c), math.exp(d)
            if err_at(gc) < err_at(gd):
                b, d = d, c
                c = b - inv_phi * (b - a)
            else:
                a, c = c, d
                d = a + inv_phi * (b - a)
            landscape.append((gc, err_at(gc)))
            landscape.append((gd, err_at(gd)))
        refined = min(cache.items(), key=lambda kv: kv[1])
        if refined[1] < best_err:
            best_g, best_err = refined

    final_err, achieved = _plateau_errors(base_config, best_g, targets)
    return CalibrationResult(
        coupling=best_g,
        max_relative_error=final_err,
        achieved=achieved,
        landscape=tuple(sorted(set(landscape))),
        within_tolerance=final_err <= 0.05,
    )
