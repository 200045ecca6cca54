"""
Impurity Model
==============

Discretized single- and two-bath resonant level Hamiltonians in the star
geometry, together with the product initial states used for quenches.

Units: hbar = k_B = 1. Energies are in units of k_BT unless stated otherwise.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .gaussian import CorrelationMatrix, fermi

logger = logging.getLogger(__name__)

SYSTEM_LABEL = "S"


@dataclass(frozen=True)
class BathSpec:
    """A discretized boxcar bath."""

    bandwidth: float
    level_count: int
    gamma: float
    beta: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth W must be > 0, got {self.bandwidth}")
        if int(self.level_count) != self.level_count or self.level_count < 2:
            raise ValueError(
                f"level_count K must be an integer >= 2 (level spacing W/(K-1)), got {self.level_count}"
            )
        if not self.gamma >= 0:
            raise ValueError(f"coupling gamma must be >= 0, got {self.gamma}")
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        object.__setattr__(self, "level_count", int(self.level_count))

    @property
    def spacing(self) -> float:
        return self.bandwidth / (self.level_count - 1)

    @property
    def energies(self) -> np.ndarray:
        """Level energies on [-W/2, W/2], both endpoints included."""
        half = 0.5 * self.bandwidth
        return np.linspace(-half, half, self.level_count)

    @property
    def coupling(self) -> float:
        """Tunnel amplitude t_k, identical for every level."""
        return coupling_amplitude(self.gamma, self.bandwidth, self.level_count)

    def occupations(self) -> np.ndarray:
        return fermi(self.energies, self.beta, self.mu)


@dataclass(frozen=True)
class ImpuritySpec:
    """Single fermionic level and its initial occupation."""

    epsilon0: float = 0.0
    n0_initial: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.n0_initial <= 1.0:
            raise ValueError(f"n0_initial must lie in [0, 1], got {self.n0_initial}")


@dataclass(frozen=True)
class JunctionSpec:
    """Impurity between a left and a right bath sharing one level grid."""

    impurity: ImpuritySpec
    mu_bar: float
    voltage: float
    asymmetry: float
    gamma: float
    bandwidth: float
    level_count_per_bath: int
    beta: float = 1.0

    def __post_init__(self):
        if abs(self.asymmetry) > 1:
            raise ValueError(f"asymmetry |a| must be <= 1, got {self.asymmetry}")
        if not self.gamma >= 0:
            raise ValueError(f"coupling gamma must be >= 0, got {self.gamma}")
        # Bath-level constraints (W, K, beta) are checked by the per-side specs.
        self.left_bath()
        self.right_bath()

    @property
    def mu_left(self) -> float:
        return self.mu_bar + 0.5 * self.voltage

    @property
    def mu_right(self) -> float:
        return self.mu_bar - 0.5 * self.voltage

    @property
    def gamma_left(self) -> float:
        return max((1.0 + self.asymmetry) * self.gamma, 0.0)

    @property
    def gamma_right(self) -> float:
        return max((1.0 - self.asymmetry) * self.gamma, 0.0)

    def left_bath(self) -> BathSpec:
        return BathSpec(self.bandwidth, self.level_count_per_bath, self.gamma_left, self.beta, self.mu_left)

    def right_bath(self) -> BathSpec:
        return BathSpec(self.bandwidth, self.level_count_per_bath, self.gamma_right, self.beta, self.mu_right)


@dataclass(frozen=True)
class SingleParticleHamiltonian:
    """Hermitian star-geometry matrix; mode 0 is the system."""

    matrix: np.ndarray
    mode_labels: tuple

    def __post_init__(self):
        h = np.array(self.matrix)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError(f"Hamiltonian must be square, got shape {h.shape}")
        if len(self.mode_labels) != h.shape[0]:
            raise ValueError("mode_labels must name every mode")
        scale = max(float(np.max(np.abs(h))), 1.0)
        if np.max(np.abs(h - h.conj().T)) > 1e-14 * scale:
            raise ValueError("single-particle Hamiltonian is not Hermitian")
        h.setflags(write=False)
        object.__setattr__(self, "matrix", h)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def coupling_amplitude(gamma, bandwidth, level_count):
    """t_k from the boxcar normalization Gamma = 2 pi t_k^2 (K-1) / W."""
    return float(np.sqrt(gamma * bandwidth / (2.0 * np.pi * (level_count - 1))))


def _star_matrix(epsilon0, energies, couplings):
    dim = 1 + len(energies)
    h = np.zeros((dim, dim))
    h[0, 0] = epsilon0
    idx = np.arange(1, dim)
    h[idx, idx] = energies
    h[0, 1:] = couplings
    h[1:, 0] = couplings
    return h


def build_single_bath(impurity: ImpuritySpec, bath: BathSpec) -> SingleParticleHamiltonian:
    """Star Hamiltonian of one level coupled to one bath, dimension 1+K."""
    energies = bath.energies
    couplings = np.full(bath.level_count, bath.coupling)
    labels = (SYSTEM_LABEL,) + tuple(f"B{k}" for k in range(1, bath.level_count + 1))
    logger.debug(f"Single-bath Hamiltonian: K={bath.level_count}, t_k={bath.coupling:.6g}")
    return SingleParticleHamiltonian(_star_matrix(impurity.epsilon0, energies, couplings), labels)


def build_junction(spec: JunctionSpec) -> SingleParticleHamiltonian:
    """Star Hamiltonian of one level between two baths, dimension 1+2K."""
    left, right = spec.left_bath(), spec.right_bath()
    k = spec.level_count_per_bath
    energies = np.concatenate([left.energies, right.energies])
    couplings = np.concatenate([np.full(k, left.coupling), np.full(k, right.coupling)])
    labels = (
        (SYSTEM_LABEL,)
        + tuple(f"L{i}" for i in range(1, k + 1))
        + tuple(f"R{i}" for i in range(1, k + 1))
    )
    logger.debug(
        f"Junction Hamiltonian: K={k} per bath, t_L={left.coupling:.6g}, t_R={right.coupling:.6g}"
    )
    return SingleParticleHamiltonian(_star_matrix(spec.impurity.epsilon0, energies, couplings), labels)


def initial_correlation_matrix_single(impurity: ImpuritySpec, bath: BathSpec) -> CorrelationMatrix:
    """diag[n0(0), f(eps_1), ..., f(eps_K)]."""
    diagonal = np.concatenate([[impurity.n0_initial], bath.occupations()])
    labels = (SYSTEM_LABEL,) + tuple(f"B{k}" for k in range(1, bath.level_count + 1))
    return CorrelationMatrix(np.diag(diagonal).astype(complex), labels)


def initial_correlation_matrix_junction(spec: JunctionSpec) -> CorrelationMatrix:
    """diag[n0(0), f_L(eps_1..K), f_R(eps_1..K)]."""
    diagonal = np.concatenate(
        [[spec.impurity.n0_initial], spec.left_bath().occupations(), spec.right_bath().occupations()]
    )
    k = spec.level_count_per_bath
    labels = (
        (SYSTEM_LABEL,)
        + tuple(f"L{i}" for i in range(1, k + 1))
        + tuple(f"R{i}" for i in range(1, k + 1))
    )
    return CorrelationMatrix(np.diag(diagonal).astype(complex), labels)
