"""Dense complex linear algebra for small operator problems.

Everything in the simulator lives in tiny fixed-size spaces: 2x2 and 8x8
operators, and the 64x64 generator acting on vectorized states. Matrices are
plain numpy arrays (row-major, complex128). The linear solver is a hand-rolled
LU factorization with partial pivoting so that near-singularity is detected
explicitly (with the offending pivot magnitude) instead of surfacing as a
garbage solution.
"""

from dataclasses import dataclass

import numpy as np

# Keeps kron results comfortably inside what a dense solve can handle.
MAX_MATRIX_ENTRIES = 1 << 24


@dataclass(frozen=True)
class Tolerances:
    """Single source of truth for the numerical tolerances used everywhere."""

    singular_pivot: float = 1e-14        # relative to max |entry| of the matrix
    solve_residual: float = 1e-10        # relative, for ||a x - b||_inf
    hermitian_input: float = 1e-10       # max |a - a^dag| accepted by eig_hermitian
    eig_residual: float = 1e-9           # ||a v - lambda v||_inf
    trace_preservation: float = 1e-12    # |vec(I)^dag L|
    density_hermiticity: float = 1e-10
    density_trace: float = 1e-10
    density_min_eigenvalue: float = -1e-9
    steady_residual_direct: float = 1e-10
    steady_residual_propagation: float = 1e-8
    propagation_trace_drift: float = 1e-8
    propagation_convergence: float = 1e-12   # ||drho/dt||_inf treated as stationary
    steady_coherence: float = 1e-6       # expected residual coherence of cooled qubit
    plateau_step: float = 1e-6           # successive-sample flatness for plateaus
    threshold_resolution: float = 1e-4   # bisection width on T_c
    infinite_temperature_band: float = 1e-12   # |p_ground - 1/2| treated as T = inf
    resonance: float = 1e-12             # |E3 - (E2 - E1)| treated as resonant


TOL = Tolerances()


class LinalgError(ValueError):
    """Base class for contract violations in this module."""


class MatrixSizeError(LinalgError):
    """Requested operation would produce an unreasonably large matrix."""


class SingularMatrixError(LinalgError):
    """Matrix is singular to working precision.

    Carries the magnitude of the best available pivot so callers can report
    how degenerate the system actually was.
    """

    def __init__(self, pivot, scale):
        self.pivot = pivot
        self.scale = scale
        super().__init__(
            f"matrix singular to working precision: pivot {pivot:.3e} "
            f"below {TOL.singular_pivot:.0e} * {scale:.3e}"
        )


class NonHermitianError(LinalgError):
    """Input promised to be Hermitian is not, beyond tolerance."""


def as_matrix(a, shape=None):
    """Coerce to a 2-D complex array and reject non-finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise LinalgError(f"expected a matrix, got ndim={m.ndim}")
    if m.size == 0:
        raise LinalgError("empty matrix")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise LinalgError("matrix has non-finite entries")
    if shape is not None and m.shape != shape:
        raise LinalgError(f"expected shape {shape}, got {m.shape}")
    return m


def max_abs(a):
    """Largest entry magnitude; the infinity-scale used by the tolerances."""
    return float(np.max(np.abs(a)))


def dagger(a):
    return a.conj().T


def kron(a, b):
    """Kronecker product, entry ((i*rb + k), (j*cb + l)) = a[i, j] * b[k, l]."""
    a = as_matrix(a)
    b = as_matrix(b)
    entries = a.size * b.size
    if entries > MAX_MATRIX_ENTRIES:
        raise MatrixSizeError(f"kron result would hold {entries} entries")
    return np.kron(a, b)


def lu_factor(a):
    """LU with partial pivoting: returns (lu, perm) with L and U packed in lu.

    Raises SingularMatrixError when the best pivot in a column falls below
    TOL.singular_pivot relative to the largest entry of the input.
    """
    lu = np.array(a, dtype=complex)
    n = lu.shape[0]
    if lu.shape != (n, n):
        raise LinalgError(f"lu_factor needs a square matrix, got {lu.shape}")
    scale = max_abs(lu)
    if scale == 0.0:
        raise SingularMatrixError(0.0, 0.0)
    perm = np.arange(n)
    for k in range(n):
        piv = k + int(np.argmax(np.abs(lu[k:, k])))
        pivot_mag = abs(lu[piv, k])
        if pivot_mag < TOL.singular_pivot * scale:
            raise SingularMatrixError(pivot_mag, scale)
        if piv != k:
            lu[[k, piv]] = lu[[piv, k]]
            perm[[k, piv]] = perm[[piv, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, perm


def lu_solve(lu, perm, b):
    n = lu.shape[0]
    x = np.asarray(b, dtype=complex)[perm].copy()
    for k in range(1, n):            # forward substitution, unit lower triangle
        x[k] -= lu[k, :k] @ x[:k]
    for k in range(n - 1, -1, -1):   # back substitution
        x[k] = (x[k] - lu[k, k + 1:] @ x[k + 1:]) / lu[k, k]
    return x


def solve_linear(a, b):
    """Solve a x = b by LU with partial pivoting plus one refinement pass.

    Guarantees ||a x - b||_inf <= TOL.solve_residual * (1 + ||b||_inf) for
    systems that are not ill-conditioned beyond ~1e8.
    """
    a = as_matrix(a)
    b = np.asarray(b, dtype=complex)
    if b.shape != (a.shape[0],):
        raise LinalgError(f"rhs shape {b.shape} does not match matrix {a.shape}")
    lu, perm = lu_factor(a)
    x = lu_solve(lu, perm, b)
    # One step of iterative refinement keeps the residual near machine level
    # even when the generator carries very large rates.
    x += lu_solve(lu, perm, b - a @ x)
    residual = max_abs(a @ x - b) if x.size else 0.0
    if not np.all(np.isfinite(x.view(float))):
        raise SingularMatrixError(min(abs(lu[k, k]) for k in range(a.shape[0])), max_abs(a))
    if residual > TOL.solve_residual * (1.0 + max_abs(b)):
        raise LinalgError(f"solve residual {residual:.3e} exceeds tolerance")
    return x


def eig_hermitian(a):
    """Eigendecomposition of a Hermitian matrix (eigenvalues ascending)."""
    a = as_matrix(a)
    deviation = max_abs(a - dagger(a))
    if deviation > TOL.hermitian_input:
        raise NonHermitianError(
            f"input deviates from Hermiticity by {deviation:.3e}"
        )
    eigenvalues, eigenvectors = np.linalg.eigh((a + dagger(a)) / 2.0)
    return eigenvalues, eigenvectors
