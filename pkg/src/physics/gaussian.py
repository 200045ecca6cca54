"""
Gaussian Layer
==============

Correlation-matrix description of free-fermion states: exact unitary
dynamics, grand-canonical equilibrium, and mode reductions.

The correlation matrix is C_ij = Tr(rho c_i^dagger c_j). Evolution and
equilibrium are computed from one eigendecomposition of the single-particle
Hamiltonian, so any time can be evaluated without integrator error.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.linalg import eigh
from scipy.special import expit

logger = logging.getLogger(__name__)

# Tolerance band around [0, 1] accepted for correlation eigenvalues.
SPECTRUM_TOLERANCE = 1e-10


def fermi(energy, beta, mu=0.0):
    """Fermi function 1/(1+exp[beta(energy-mu)]), overflow-safe for any argument."""
    return expit(-beta * (np.asarray(energy, dtype=float) - mu))


def _hermitize(matrix):
    return 0.5 * (matrix + matrix.conj().T)


@dataclass(frozen=True)
class CorrelationMatrix:
    """Two-point function matrix of a particle-conserving Gaussian state."""

    matrix: np.ndarray
    mode_labels: tuple = None

    def __post_init__(self):
        c = np.array(self.matrix, dtype=complex)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError(f"correlation matrix must be square, got shape {c.shape}")
        labels = self.mode_labels
        if labels is None:
            labels = tuple(str(i) for i in range(c.shape[0]))
        if len(labels) != c.shape[0]:
            raise ValueError(
                f"mode_labels has {len(labels)} entries for a {c.shape[0]}-mode matrix"
            )
        c.setflags(write=False)
        object.__setattr__(self, "matrix", c)
        object.__setattr__(self, "mode_labels", tuple(labels))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def particle_number(self) -> float:
        """Mean total particle number <N> = Tr C."""
        return float(np.trace(self.matrix).real)

    def eigenvalues(self) -> np.ndarray:
        return eigh(self.matrix, eigvals_only=True)

    def checked_eigenvalues(self, tolerance=SPECTRUM_TOLERANCE) -> np.ndarray:
        """Eigenvalues, raising if any leaves the [0, 1] tolerance band."""
        values = self.eigenvalues()
        if values[0] < -tolerance or values[-1] > 1.0 + tolerance:
            raise ValueError(
                f"correlation eigenvalues outside [0, 1]: min={values[0]:.3e}, max={values[-1]:.3e}"
            )
        return values


@dataclass(frozen=True)
class SpectralDecomposition:
    """H = P diag(h) P^dagger with ascending h."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def of(cls, hamiltonian) -> "SpectralDecomposition":
        matrix = getattr(hamiltonian, "matrix", hamiltonian)
        values, vectors = eigh(np.asarray(matrix))
        return cls(values, vectors)

    @property
    def dimension(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        p = self.eigenvectors
        return (p * self.eigenvalues) @ p.conj().T


def _decomposition(hamiltonian) -> SpectralDecomposition:
    if isinstance(hamiltonian, SpectralDecomposition):
        return hamiltonian
    return SpectralDecomposition.of(hamiltonian)


class CorrelationEvolution:
    """
    C(t) = exp(iHt) C(0) exp(-iHt) on a fixed eigenbasis of H.

    C(0) is projected onto the eigenbasis once; each time point then costs
    two matrix products. Instances are read-only after construction and can
    be shared by concurrent time-grid workers.
    """

    def __init__(self, initial: CorrelationMatrix, hamiltonian):
        self.initial = initial
        self.decomposition = _decomposition(hamiltonian)
        if self.decomposition.dimension != initial.dimension:
            raise ValueError(
                f"dimension mismatch: C0 has {initial.dimension} modes, H has {self.decomposition.dimension}"
            )
        p = self.decomposition.eigenvectors
        self._projected = p.conj().T @ initial.matrix @ p

    def at(self, t: float) -> CorrelationMatrix:
        if t == 0:
            return self.initial
        p = self.decomposition.eigenvectors
        phase = np.exp(1j * self.decomposition.eigenvalues * t)
        rotated = phase[:, None] * self._projected * phase.conj()[None, :]
        return CorrelationMatrix(_hermitize(p @ rotated @ p.conj().T), self.initial.mode_labels)


def evolve(initial: CorrelationMatrix, hamiltonian, t: float) -> CorrelationMatrix:
    """Correlation matrix at time t after a quench into `hamiltonian`."""
    return CorrelationEvolution(initial, hamiltonian).at(t)


def evolve_many(initial: CorrelationMatrix, hamiltonian, times: Iterable[float]) -> Iterator[CorrelationMatrix]:
    evolution = CorrelationEvolution(initial, hamiltonian)
    for t in times:
        yield evolution.at(t)


def gibbs_correlation_matrix(hamiltonian, beta: float, mu: float = 0.0) -> CorrelationMatrix:
    """
    Correlation matrix of the grand-canonical Gibbs state exp[-beta(H - mu N)]/Z.

    Computed as P diag[f(h_1), ..., f(h_m)] P^dagger. beta = 0 gives the
    infinite-temperature state C = 1/2.
    """
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    decomposition = _decomposition(hamiltonian)
    p = decomposition.eigenvectors
    occupations = fermi(decomposition.eigenvalues, beta, mu)
    matrix = _hermitize((p * occupations) @ p.conj().T)
    labels = getattr(hamiltonian, "mode_labels", None)
    return CorrelationMatrix(matrix, labels)


def reduce_modes(correlations: CorrelationMatrix, indices: Sequence[int]) -> CorrelationMatrix:
    """Reduced state on a subset of modes: the principal submatrix."""
    idx = [int(i) for i in indices]
    if not idx:
        raise ValueError("reduce_modes needs at least one mode index")
    if len(set(idx)) != len(idx):
        raise ValueError(f"mode indices must be distinct, got {idx}")
    m = correlations.dimension
    bad = [i for i in idx if not 0 <= i < m]
    if bad:
        raise ValueError(f"mode indices {bad} out of range for {m} modes")
    matrix = correlations.matrix[np.ix_(idx, idx)]
    labels = tuple(correlations.mode_labels[i] for i in idx)
    return CorrelationMatrix(matrix, labels)


def mean_occupation(correlations: CorrelationMatrix, index: int = 0) -> float:
    """Occupation <c_i^dagger c_i>, clamped to [0, 1] for reporting."""
    return float(np.clip(correlations.matrix[index, index].real, 0.0, 1.0))
