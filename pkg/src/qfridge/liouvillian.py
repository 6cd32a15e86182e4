"""Three-qubit refrigerator model and its vectorized Lindblad generator.

Basis conventions (fixed here once, used everywhere):

  * single qubit: |g> = index 0, |e> = index 1, sigma_z |e> = +|e>;
  * three qubits: qubit 1 is the most significant tensor factor, so the
    computational index of |q1 q2 q3> is 4 q1 + 2 q2 + q3 with g = 0, e = 1;
  * vectorization is column-stacking, vec(A rho B) = (B^T kron A) vec(rho).

The machine: qubit 1 (gap E1, cold bath) is the target of the cooling, qubit 2
(gap E2, room bath) dumps the absorbed energy, qubit 3 (gap E3, hot bath)
drives the cycle. The three-body interaction g(s-_1 s+_2 s-_3 + h.c.) couples
|e1 g2 e3> with |g1 e2 g3>, which is resonant when E3 = E2 - E1. Each qubit
carries one decay and one excitation dissipator with rates induced by its
reservoir.
"""

import hashlib
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .linalg import TOL, as_matrix, dagger, eig_hermitian, kron, max_abs
from .reservoirs import ReservoirSpec, Role, Statistics, lindblad_rates, occupation

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)   # |g><e|
SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)    # |e><g|

NUM_QUBITS = 3
DIM = 2 ** NUM_QUBITS


class ConfigError(ValueError):
    """Invalid refrigerator configuration."""


class DensityMatrixError(ValueError):
    """Matrix fails the density-matrix invariants."""


def embed(op, qubit_index):
    """Lift a single-qubit operator onto the 3-qubit space (qubit 1 = MSB)."""
    if qubit_index not in (1, 2, 3):
        raise ConfigError(f"qubit index must be 1..3, got {qubit_index}")
    factors = [IDENTITY_2, IDENTITY_2, IDENTITY_2]
    factors[qubit_index - 1] = op
    return kron(kron(factors[0], factors[1]), factors[2])


@dataclass(frozen=True)
class FridgeConfig:
    """Full parameter set: gaps, dissipation rates, reservoirs, coupling."""

    gaps: tuple
    gammas: tuple
    reservoirs: tuple
    coupling: float

    def __post_init__(self):
        gaps = tuple(float(e) for e in self.gaps)
        gammas = tuple(float(g) for g in self.gammas)
        if len(gaps) != 3 or len(gammas) != 3 or len(self.reservoirs) != 3:
            raise ConfigError("need exactly three gaps, gammas and reservoirs")
        if any(not math.isfinite(e) or e <= 0.0 for e in gaps):
            raise ConfigError(f"energy gaps must be positive, got {gaps}")
        if any(not math.isfinite(g) or g < 0.0 for g in gammas):
            raise ConfigError(f"dissipation rates must be >= 0, got {gammas}")
        if not all(isinstance(r, ReservoirSpec) for r in self.reservoirs):
            raise ConfigError("reservoirs must be ReservoirSpec instances")
        # g = 0 is allowed deliberately: the decoupled machine is the
        # reference point for the thermal fixed-point checks.
        if not math.isfinite(self.coupling) or self.coupling < 0.0:
            raise ConfigError(f"coupling must be >= 0, got {self.coupling}")
        object.__setattr__(self, "gaps", gaps)
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "reservoirs", tuple(self.reservoirs))
        object.__setattr__(self, "coupling", float(self.coupling))

    @property
    def resonant(self):
        """Whether E3 = E2 - E1 holds, the positive-temperature working point."""
        e1, e2, e3 = self.gaps
        return abs(e3 - (e2 - e1)) <= TOL.resonance

    @property
    def cold_temperature(self):
        return self.reservoirs[0].temperature

    def with_hot_temperature(self, temperature):
        hot = replace(self.reservoirs[2], temperature=temperature,
                      occupation_override=None)
        return replace(self, reservoirs=(self.reservoirs[0], self.reservoirs[1], hot))

    def with_cold_temperature(self, temperature):
        cold = replace(self.reservoirs[0], temperature=temperature,
                       occupation_override=None)
        return replace(self, reservoirs=(cold, self.reservoirs[1], self.reservoirs[2]))

    def with_hot_reservoir(self, reservoir):
        return replace(self, reservoirs=(self.reservoirs[0], self.reservoirs[1], reservoir))

    def with_gamma1(self, gamma1):
        return replace(self, gammas=(gamma1, self.gammas[1], self.gammas[2]))

    def to_dict(self):
        return {
            "gaps": list(self.gaps),
            "gammas": list(self.gammas),
            "coupling": self.coupling,
            "reservoirs": [r.to_dict() for r in self.reservoirs],
        }

    @classmethod
    def from_dict(cls, d):
        try:
            reservoirs = tuple(ReservoirSpec.from_dict(r) for r in d["reservoirs"])
            return cls(
                gaps=tuple(d["gaps"]),
                gammas=tuple(d["gammas"]),
                reservoirs=reservoirs,
                coupling=d["coupling"],
            )
        except KeyError as exc:
            raise ConfigError(f"missing config field: {exc}") from exc

    def config_hash(self):
        payload = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha1(payload.encode()).hexdigest()[:12]


def default_config(tc=1.0, tr=2.0, th=10.0, coupling=1.0,
                   gaps=(1.0, 5.0, 4.0), gammas=(1.0, 1.0, 1.0),
                   hot_statistics="bosonic"):
    """Reference operating point: resonant gaps (1, 5, 4), unit rates."""
    return FridgeConfig(
        gaps=gaps,
        gammas=gammas,
        reservoirs=(
            ReservoirSpec("bosonic", tc, Role.COLD),
            ReservoirSpec("bosonic", tr, Role.ROOM),
            ReservoirSpec(hot_statistics, th, Role.HOT),
        ),
        coupling=coupling,
    )


def free_hamiltonian(config: FridgeConfig):
    """H0 = sum_k (E_k / 2) sigma_z,k. Diagonal in the computational basis."""
    h = np.zeros((DIM, DIM), dtype=complex)
    for k, gap in enumerate(config.gaps, start=1):
        h += 0.5 * gap * embed(SIGMA_Z, k)
    return h


def interaction_hamiltonian(config: FridgeConfig):
    """H_int = g (s-_1 s+_2 s-_3 + s+_1 s-_2 s+_3).

    Exactly two nonzero entries: the |e1 g2 e3> <-> |g1 e2 g3> exchange.
    """
    lower = embed(SIGMA_MINUS, 1) @ embed(SIGMA_PLUS, 2) @ embed(SIGMA_MINUS, 3)
    return config.coupling * (lower + dagger(lower))


@dataclass(frozen=True)
class Liouvillian:
    """Vectorized generator: d vec(rho)/dt = matrix @ vec(rho)."""

    matrix: np.ndarray
    dim: int
    config_hash: str

    def __post_init__(self):
        m = as_matrix(self.matrix, shape=(self.dim ** 2, self.dim ** 2))
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        defect = max_abs(_trace_row(self.dim) @ m)
        scale = max(1.0, max_abs(m))
        if defect > TOL.trace_preservation * scale:
            raise ConfigError(
                f"generator is not trace preserving: defect {defect:.3e}"
            )


def _trace_row(dim):
    """vec(I)^T for column stacking: ones at positions j*dim + j."""
    row = np.zeros(dim * dim, dtype=complex)
    row[:: dim + 1] = 1.0
    return row


def _dissipator(collapse, rate):
    """Vectorized (rate/2) (2 c rho c^dag - {c^dag c, rho})."""
    dim = collapse.shape[0]
    eye = np.eye(dim, dtype=complex)
    cdc = dagger(collapse) @ collapse
    return 0.5 * rate * (
        2.0 * kron(collapse.conj(), collapse)
        - kron(eye, cdc)
        - kron(cdc.T, eye)
    )


def _unitary_part(hamiltonian):
    dim = hamiltonian.shape[0]
    eye = np.eye(dim, dtype=complex)
    return -1j * (kron(eye, hamiltonian) - kron(hamiltonian.T, eye))


def build_liouvillian(config: FridgeConfig) -> Liouvillian:
    """Assemble the 64x64 generator from the Hamiltonians and six dissipators."""
    h = free_hamiltonian(config) + interaction_hamiltonian(config)
    generator = _unitary_part(h)
    for k in range(1, NUM_QUBITS + 1):
        gap = config.gaps[k - 1]
        gamma = config.gammas[k - 1]
        if gamma == 0.0:
            continue
        rates = lindblad_rates(config.reservoirs[k - 1], gap, gamma)
        generator += _dissipator(embed(SIGMA_MINUS, k), rates.gamma_down)
        generator += _dissipator(embed(SIGMA_PLUS, k), rates.gamma_up)
    return Liouvillian(matrix=generator, dim=DIM, config_hash=config.config_hash())


def qubit_liouvillian(gap, gamma_down, gamma_up):
    """Single-qubit generator (4x4), the small sanity case for the dissipators."""
    h = 0.5 * gap * SIGMA_Z
    generator = _unitary_part(h)
    generator += _dissipator(SIGMA_MINUS, gamma_down)
    generator += _dissipator(SIGMA_PLUS, gamma_up)
    return Liouvillian(matrix=generator, dim=2, config_hash="single-qubit")


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise DensityMatrixError(f"state must be square, got {m.shape}")
        hermiticity = max_abs(m - dagger(m))
        if hermiticity > TOL.density_hermiticity:
            raise DensityMatrixError(
                f"state deviates from Hermiticity by {hermiticity:.3e}"
            )
        trace_error = abs(np.trace(m) - 1.0)
        if trace_error > TOL.density_trace:
            raise DensityMatrixError(f"trace deviates from 1 by {trace_error:.3e}")
        eigenvalues, _ = eig_hermitian(m)
        if eigenvalues[0] < TOL.density_min_eigenvalue:
            raise DensityMatrixError(
                f"state is not positive semidefinite: min eigenvalue {eigenvalues[0]:.3e}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, amplitudes):
        v = np.asarray(amplitudes, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def ground_state(cls, dim=DIM):
        m = np.zeros((dim, dim), dtype=complex)
        m[0, 0] = 1.0
        return cls(m)

    @classmethod
    def maximally_mixed(cls, dim=DIM):
        return cls(np.eye(dim, dtype=complex) / dim)


def thermal_qubit(spec: ReservoirSpec, gap: float) -> DensityMatrix:
    """Fixed point of a single qubit damped by the given reservoir.

    Detailed balance p_e / p_g = up / down = exp(-E/T) holds for both
    statistics, so this is the Gibbs state at the reservoir temperature
    (population inverted when T < 0). Both populations are evaluated through
    decaying exponentials so neither loses precision near saturation.
    """
    n = occupation(spec, gap)
    if spec.statistics is Statistics.FERMIONIC:
        p_excited = n
        if spec.occupation_override is None:
            # mirror symmetry: p_ground = 1 - n(T) = n(-T), cancellation free
            p_ground = occupation(replace(spec, temperature=-spec.temperature), gap)
        else:
            p_ground = 1.0 - n
    else:
        p_excited = n / (1.0 + 2.0 * n)
        p_ground = (1.0 + n) / (1.0 + 2.0 * n)
    return DensityMatrix(np.diag([p_ground, p_excited]).astype(complex))


def thermal_product(config: FridgeConfig) -> DensityMatrix:
    """Product of the three per-qubit thermal states (the g = 0 steady state)."""
    m = np.eye(1, dtype=complex)
    for spec, gap in zip(config.reservoirs, config.gaps):
        m = kron(m, thermal_qubit(spec, gap).matrix)
    return DensityMatrix(m)
