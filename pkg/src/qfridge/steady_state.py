"""Steady states of the vectorized generator.

Two independent routes to the same object:

  * solve_direct replaces one row of L with the trace functional and solves
    the resulting nonsingular linear system L~ x = e_r exactly;
  * propagate integrates d vec(rho)/dt = L vec(rho) with classic fixed-step
    RK4 until the state stops moving.

The second exists purely as a cross-check oracle for the first, so it shares
nothing with it beyond the generator matrix itself.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import TOL, SingularMatrixError, dagger, eig_hermitian, max_abs, solve_linear
from .liouvillian import DensityMatrix, DensityMatrixError, Liouvillian, _trace_row


class SteadyStateError(RuntimeError):
    """Direct solve failed to produce a valid state."""


class MultiplicityError(SteadyStateError):
    """The steady-state manifold has dimension > 1 (constrained system singular).

    Possible when the machine decouples, e.g. g = 0 with some gamma_k = 0.
    """


class PropagationError(RuntimeError):
    """Time integration violated its accuracy or stability contract."""


class Solver(Enum):
    DIRECT = "direct"
    PROPAGATION = "propagation"


@dataclass(frozen=True)
class SteadyStateResult:
    state: DensityMatrix
    residual: float
    solver: Solver

    def __post_init__(self):
        limit = (TOL.steady_residual_direct if self.solver is Solver.DIRECT
                 else TOL.steady_residual_propagation)
        if self.residual > limit:
            raise SteadyStateError(
                f"steady-state residual {self.residual:.3e} exceeds {limit:.0e} "
                f"for solver {self.solver.value}"
            )


def _vec(rho):
    return rho.reshape(-1, order="F")


def _unvec(x, dim):
    return x.reshape((dim, dim), order="F")


def solve_direct(liouvillian: Liouvillian,
                 constraint_row: int | None = None) -> SteadyStateResult:
    """Steady state by constrained linear solve.

    The null-space equation L x = 0 with tr(rho) = 1 is made square by
    overwriting one population row of L (the one with the smallest diagonal
    magnitude, i.e. the least informative equation) with vec(I)^T and setting
    that entry of the right-hand side to 1. Only population rows qualify:
    they are the support of the trace functional, and sacrificing a coherence
    equation instead would leave that coherence undetermined. At generic
    parameters the result is independent of which population row is replaced;
    constraint_row exists to test exactly that.
    """
    dim = liouvillian.dim
    generator = liouvillian.matrix
    scale = max(1.0, max_abs(generator))
    constrained = np.array(generator / scale)
    population_rows = np.arange(0, dim * dim, dim + 1)
    if constraint_row is None:
        diagonal = np.abs(np.diagonal(generator)[population_rows])
        row = int(population_rows[np.argmin(diagonal)])
    else:
        row = int(constraint_row)
        if row not in population_rows:
            raise SteadyStateError(
                f"constraint row {row} is not a population position"
            )
    constrained[row, :] = _trace_row(dim)
    rhs = np.zeros(dim * dim, dtype=complex)
    rhs[row] = 1.0
    try:
        x = solve_linear(constrained, rhs)
    except SingularMatrixError as exc:
        raise MultiplicityError(
            "constrained steady-state system is singular; the generator has a "
            f"degenerate stationary manifold (pivot {exc.pivot:.3e})"
        ) from exc

    rho_raw = _unvec(x, dim)
    asymmetry = max_abs(rho_raw - dagger(rho_raw))
    if asymmetry > 1e-9:
        raise SteadyStateError(
            f"solution asymmetry {asymmetry:.3e} before symmetrization"
        )
    rho = (rho_raw + dagger(rho_raw)) / 2.0
    residual = max_abs(generator @ _vec(rho))
    try:
        state = DensityMatrix(rho)
    except DensityMatrixError as exc:
        raise SteadyStateError(f"direct solve produced an invalid state: {exc}") from exc
    return SteadyStateResult(state=state, residual=residual, solver=Solver.DIRECT)


def _norm_inf_rows(matrix):
    """Matrix infinity norm (max absolute row sum), the RK4 stability scale."""
    return float(np.max(np.sum(np.abs(matrix), axis=1)))


def default_time_step(liouvillian: Liouvillian) -> float:
    """dt = min(1e-3, 0.1 / ||L||_inf), a comfortable RK4 stability margin."""
    return min(1e-3, 0.1 / max(_norm_inf_rows(liouvillian.matrix), 1e-30))


def propagate(liouvillian: Liouvillian, rho0: DensityMatrix, t_final: float,
              dt: float | None = None, stop_when_stationary: bool = True) -> DensityMatrix:
    """Classic one-step 4th-order integration of d vec(rho)/dt = L vec(rho).

    Stops early once the state moves by less than TOL.propagation_convergence
    per unit time. The trace is monitored throughout (drift beyond
    TOL.propagation_trace_drift aborts) and renormalized only at output.
    """
    if t_final < 0.0:
        raise PropagationError(f"t_final must be >= 0, got {t_final}")
    generator = liouvillian.matrix
    stability_limit = 0.1 / max(_norm_inf_rows(generator), 1e-30)
    if dt is None:
        dt = default_time_step(liouvillian)
    elif dt <= 0.0 or dt > stability_limit:
        raise PropagationError(
            f"dt = {dt} outside the stable range (0, {stability_limit:.3e}]"
        )
    if t_final == 0.0:
        return rho0

    x = _vec(np.array(rho0.matrix))
    steps = max(1, int(math.ceil(t_final / dt)))
    dt = t_final / steps
    check_interval = max(1, min(200, steps // 50 or 1))
    previous = x.copy()
    for step in range(steps):
        k1 = generator @ x
        k2 = generator @ (x + 0.5 * dt * k1)
        k3 = generator @ (x + 0.5 * dt * k2)
        k4 = generator @ (x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (step + 1) % check_interval == 0 or step == steps - 1:
            if not np.all(np.isfinite(x.view(float))):
                raise PropagationError("state became non-finite during propagation")
            trace = _trace_row(liouvillian.dim) @ x
            if abs(trace - 1.0) > TOL.propagation_trace_drift:
                raise PropagationError(
                    f"trace drifted by {abs(trace - 1.0):.3e}; reduce dt"
                )
            if stop_when_stationary:
                rate = max_abs(x - previous) / (check_interval * dt)
                if rate <= TOL.propagation_convergence:
                    break
                previous = x.copy()

    # No symmetrization here: the generator preserves Hermiticity and the
    # DensityMatrix invariants must hold on the raw integrated state.
    rho = _unvec(x, liouvillian.dim)
    rho = rho / np.trace(rho).real
    return DensityMatrix(rho)


def steady_state_by_propagation(liouvillian: Liouvillian,
                                rho0: DensityMatrix | None = None,
                                t_final: float = 400.0) -> SteadyStateResult:
    """Oracle route: integrate from rho0 (ground state by default) to rest."""
    if rho0 is None:
        rho0 = DensityMatrix.ground_state(liouvillian.dim)
    state = propagate(liouvillian, rho0, t_final)
    residual = max_abs(liouvillian.matrix @ _vec(state.matrix))
    return SteadyStateResult(state=state, residual=residual, solver=Solver.PROPAGATION)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """(1/2) sum |eigenvalues| of a - b."""
    eigenvalues, _ = eig_hermitian(a.matrix - b.matrix)
    return 0.5 * float(np.sum(np.abs(eigenvalues)))
