"""
Fock Space Layer
================

Many-body density matrices of spinless fermions on m modes, partial
transposition with respect to the system mode, and the entanglement
negativity.

Basis convention: occupation bitstrings with mode 0 (the system) as the most
significant bit, i.e. the leftmost tensor factor. Fermionic operators are
realized by the Jordan-Wigner construction in that ordering:

    c_j = Z x ... x Z x a x 1 x ... x 1     (j factors of Z)

with a = |0><1|. The system therefore forms the outer 2 x 2 block structure
of every density matrix, and the partial transpose is the ordinary
block-wise transpose in this product basis.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.special import logsumexp

from .gaussian import CorrelationMatrix, reduce_modes
from .tridiag import householder_tridiagonalize

logger = logging.getLogger(__name__)

MAX_FOCK_MODES = 14
MAX_CUTOFF = 12
EIGENVALUE_CLAMP = 1e-12
NEGATIVITY_THRESHOLD = 1e-12
TRACE_TOLERANCE = 1e-10


def _check_mode_count(m):
    if m < 1:
        raise ValueError(f"Fock operations need at least one mode, got {m}")
    if m > MAX_FOCK_MODES:
        raise ValueError(
            f"Fock operations are limited to m <= {MAX_FOCK_MODES} modes (dimension 2^m), got m={m}"
        )


@lru_cache(maxsize=None)
def annihilation_operators(m: int) -> tuple:
    """Jordan-Wigner annihilators c_0 ... c_{m-1} as sparse CSR matrices."""
    _check_mode_count(m)
    a = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    z = sp.diags([1.0, -1.0])
    eye = sp.identity(2)
    operators = []
    for j in range(m):
        factors = [z] * j + [a] + [eye] * (m - j - 1)
        op = factors[0]
        for factor in factors[1:]:
            op = sp.kron(op, factor)
        operators.append(sp.csr_matrix(op))
    return tuple(operators)


@lru_cache(maxsize=None)
def hopping_operators(m: int) -> tuple:
    """Nested tuple with entry [i][j] = c_i^dagger c_j."""
    c = annihilation_operators(m)
    return tuple(tuple(sp.csr_matrix(c[i].T @ c[j]) for j in range(m)) for i in range(m))


@lru_cache(maxsize=None)
def particle_numbers(m: int) -> np.ndarray:
    """Total occupation of every Fock basis state."""
    index = np.arange(2 ** m)
    bits = (index[:, None] >> (m - 1 - np.arange(m))[None, :]) & 1
    return bits.sum(axis=1)


def quadratic_operator(matrix: np.ndarray) -> sp.csr_matrix:
    """Sum_ij A_ij c_i^dagger c_j in the Fock representation."""
    a = np.asarray(matrix)
    m = a.shape[0]
    ops = hopping_operators(m)
    total = sp.csr_matrix((2 ** m, 2 ** m), dtype=complex)
    for i in range(m):
        for j in range(m):
            if a[i, j] != 0:
                total = total + a[i, j] * ops[i][j]
    return total


@dataclass(frozen=True)
class FockDensityMatrix:
    """Dense many-body density matrix on 2^m occupation states."""

    matrix: np.ndarray
    mode_count: int
    mode_ordering: tuple = None

    def __post_init__(self):
        rho = np.array(self.matrix, dtype=complex)
        dim = 2 ** self.mode_count
        if rho.shape != (dim, dim):
            raise ValueError(f"density matrix for {self.mode_count} modes must be {dim}x{dim}, got {rho.shape}")
        trace = np.trace(rho).real
        if abs(trace - 1.0) > TRACE_TOLERANCE:
            raise ValueError(f"density matrix trace is {trace!r}, expected 1")
        ordering = self.mode_ordering or tuple(str(i) for i in range(self.mode_count))
        if len(ordering) != self.mode_count:
            raise ValueError("mode_ordering must name every mode")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)
        object.__setattr__(self, "mode_ordering", tuple(ordering))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def min_eigenvalue(self) -> float:
        return float(eigh(self.matrix, eigvals_only=True)[0])


@dataclass(frozen=True)
class SectorStates:
    """Eigenstates with one particle number, expanded in that sector's basis."""

    particle_number: int
    basis: np.ndarray  # Fock indices spanning the sector
    energies: np.ndarray
    vectors: np.ndarray  # one normalized column per eigenstate


@dataclass(frozen=True)
class ManyBodySpectrum:
    """Slater-determinant eigenstates of a quadratic Hamiltonian, grouped by particle number."""

    mode_count: int
    sectors: tuple

    @property
    def energies(self) -> np.ndarray:
        return np.concatenate([s.energies for s in self.sectors])

    @property
    def particle_numbers(self) -> np.ndarray:
        return np.concatenate([np.full(s.energies.size, s.particle_number) for s in self.sectors])

    @property
    def states(self) -> np.ndarray:
        """Eigenstates as dense Fock-space columns."""
        columns = []
        for sector in self.sectors:
            full = np.zeros((2 ** self.mode_count, sector.vectors.shape[1]), dtype=complex)
            full[sector.basis] = sector.vectors
            columns.append(full)
        return np.hstack(columns)


def _sector_bases(m):
    numbers = particle_numbers(m)
    return [np.flatnonzero(numbers == n) for n in range(m + 1)]


def density_matrix_from_correlations(correlations: CorrelationMatrix) -> FockDensityMatrix:
    """
    Gaussian density matrix exp(-sum B_ij c_i^dagger c_j)/Z reproducing C.

    For rho built from the form sum_ij B_ij c_i^dagger c_j one finds
    Tr(rho c_i^dagger c_j) = [(1 + e^B)^-1]_ji, so B is assembled from C^T.
    Eigenvalues of C are clamped into [1e-12, 1 - 1e-12] before the
    logarithm; the stored correlation matrix is never modified.
    """
    c = correlations.matrix
    m = c.shape[0]
    _check_mode_count(m)
    correlations.checked_eigenvalues()
    values, vectors = eigh(c)
    if values[0] < -EIGENVALUE_CLAMP or values[-1] > 1.0 + EIGENVALUE_CLAMP:
        logger.warning(
            f"Correlation eigenvalues slightly outside [0, 1] (min={values[0]:.3e}, max={values[-1]:.3e}); clamping"
        )
    clamped = np.clip(values, EIGENVALUE_CLAMP, 1.0 - EIGENVALUE_CLAMP)
    changed = np.count_nonzero(clamped != values)
    if changed:
        logger.debug(f"Clamped {changed} of {m} correlation eigenvalues into [{EIGENVALUE_CLAMP:g}, 1 - {EIGENVALUE_CLAMP:g}]")
    mode_energies = np.log((1.0 - clamped) / clamped)
    u = vectors.conj()
    b = (u * mode_energies) @ u.conj().T
    q = quadratic_operator(b)

    dim = 2 ** m
    blocks = []
    for idx in _sector_bases(m):
        block = q[idx][:, idx].toarray()
        block = 0.5 * (block + block.conj().T)
        energies, states = eigh(block)
        blocks.append((idx, energies, states))

    rho = np.zeros((dim, dim), dtype=complex)
    log_weights = np.concatenate([-e for _, e, _ in blocks])
    log_z = logsumexp(log_weights)
    for idx, energies, states in blocks:
        weights = np.exp(-energies - log_z)
        rho[np.ix_(idx, idx)] = (states * weights) @ states.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return FockDensityMatrix(rho, m, correlations.mode_labels)


def correlations_from_density_matrix(rho: FockDensityMatrix) -> CorrelationMatrix:
    """C_ij = Tr(rho c_i^dagger c_j)."""
    m = rho.mode_count
    ops = hopping_operators(m)
    transposed = rho.matrix.T
    c = np.empty((m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            c[i, j] = ops[i][j].multiply(transposed).sum()
    return CorrelationMatrix(c, rho.mode_ordering)


def slater_spectrum(hamiltonian, sectors: Optional[Iterable[int]] = None) -> ManyBodySpectrum:
    """
    Many-body eigenstates obtained by filling single-particle eigenmodes.

    Energies are sums of the filled single-particle eigenvalues; each state
    is d_{k_n}^dagger ... d_{k_1}^dagger |vac> with d_k^dagger = sum_i P_ik c_i^dagger.

    States are built sector by sector: the N-particle eigenvectors are
    stored on the C(m, N) basis states of that sector only, so the full
    spectrum costs sum_N C(m, N)^2 amplitudes instead of 4^m.
    """
    h = np.asarray(getattr(hamiltonian, "matrix", hamiltonian))
    m = h.shape[0]
    _check_mode_count(m)
    wanted = set(range(m + 1)) if sectors is None else {int(n) for n in sectors}
    bad = [n for n in wanted if not 0 <= n <= m]
    if bad:
        raise ValueError(f"particle numbers {sorted(bad)} out of range 0..{m}")

    values, vectors = eigh(h)
    c = annihilation_operators(m)
    creators = []
    for k in range(m):
        op = sp.csr_matrix((2 ** m, 2 ** m), dtype=complex)
        for i in range(m):
            op = op + vectors[i, k] * c[i].T
        creators.append(sp.csr_matrix(op))

    bases = _sector_bases(m)
    subsets = [()]
    states = np.ones((1, 1), dtype=complex)  # vacuum, the only N=0 basis state
    found = []
    if 0 in wanted:
        found.append(SectorStates(0, bases[0], np.zeros(1), states))
    for n in range(1, max(wanted) + 1):
        next_subsets, columns = [], []
        for k in range(m):
            extend = [i for i, s in enumerate(subsets) if not s or s[-1] < k]
            if not extend:
                continue
            block = creators[k][bases[n]][:, bases[n - 1]]
            columns.append(block @ states[:, extend])
            next_subsets.extend(subsets[i] + (k,) for i in extend)
        subsets, states = next_subsets, np.hstack(columns)
        if n in wanted:
            energies = np.array([values[list(s)].sum() for s in subsets])
            found.append(SectorStates(n, bases[n], energies, states))
    return ManyBodySpectrum(m, tuple(found))


def _mixture(spectrum, log_weight, labels):
    logs = [log_weight(sector) for sector in spectrum.sectors]
    log_z = logsumexp(np.concatenate(logs))
    dim = 2 ** spectrum.mode_count
    rho = np.zeros((dim, dim), dtype=complex)
    for sector, logs_n in zip(spectrum.sectors, logs):
        weights = np.exp(logs_n - log_z)
        rho[np.ix_(sector.basis, sector.basis)] = (sector.vectors * weights) @ sector.vectors.conj().T
    return FockDensityMatrix(0.5 * (rho + rho.conj().T), spectrum.mode_count, labels)


def default_particle_number(level_count: int) -> int:
    """Half filling of 1+K modes, (K+1)/2 rounded half-up."""
    return (int(level_count) + 2) // 2


def canonical_gibbs(hamiltonian, beta: float, particle_number: int) -> FockDensityMatrix:
    """Canonical state Z^-1 sum_i delta(N_i, N) exp(-beta E_i) |psi_i><psi_i|."""
    h = np.asarray(getattr(hamiltonian, "matrix", hamiltonian))
    m = h.shape[0]
    _check_mode_count(m)
    if not 0 <= particle_number <= m:
        raise ValueError(f"particle number N must lie in 0..{m}, got {particle_number}")
    spectrum = slater_spectrum(h, [particle_number])
    count = spectrum.energies.size
    assert count > 0, f"empty N={particle_number} sector"
    logger.debug(f"Canonical state: m={m}, N={particle_number}, {count} Slater states")
    return _mixture(spectrum, lambda sector: -beta * sector.energies, getattr(hamiltonian, "mode_labels", None))


def grand_canonical_gibbs_fock(hamiltonian, beta: float, mu: float = 0.0) -> FockDensityMatrix:
    """
    exp[-beta(H - mu N)]/Z in Fock space, from the full Slater spectrum.

    The result is a dense 2^m x 2^m matrix (about 4.3 GB at m = 14); only
    the intermediate eigenstates are kept sector-sized.
    """
    h = np.asarray(getattr(hamiltonian, "matrix", hamiltonian))
    m = h.shape[0]
    _check_mode_count(m)
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    spectrum = slater_spectrum(h)

    def log_weight(sector):
        return -beta * (sector.energies - mu * sector.particle_number)

    return _mixture(spectrum, log_weight, getattr(hamiltonian, "mode_labels", None))



def _matrix_and_modes(rho):
    if isinstance(rho, FockDensityMatrix):
        return rho.matrix, rho.mode_count
    matrix = np.asarray(rho)
    m = int(round(np.log2(matrix.shape[0])))
    if 2 ** m != matrix.shape[0]:
        raise ValueError(f"matrix dimension {matrix.shape[0]} is not a power of two")
    return matrix, m


def mode_occupation(rho, index: int = 0) -> float:
    """<n_index> read off the diagonal of a Fock density matrix."""
    matrix, m = _matrix_and_modes(rho)
    if not 0 <= index < m:
        raise ValueError(f"mode index {index} out of range for {m} modes")
    occupied = (np.arange(2 ** m) >> (m - 1 - index)) & 1
    return float(np.real(np.diagonal(matrix)[occupied == 1].sum()))


def partial_transpose(rho, bath_modes: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    Transpose of the bath factor with the system (mode 0) as subsystem A.

    Written as 2 x 2 blocks gamma_ij of size 2^(m-1), the result has blocks
    gamma_ij^T.
    """
    matrix, m = _matrix_and_modes(rho)
    if m < 2:
        raise ValueError("partial transpose needs a system mode and at least one bath mode")
    expected = tuple(range(1, m))
    if bath_modes is not None and tuple(sorted(int(i) for i in bath_modes)) != expected:
        raise ValueError(f"bath_modes must be all modes except the system, i.e. {list(expected)}")
    r = 2 ** (m - 1)
    return matrix.reshape(2, r, 2, r).transpose(0, 3, 2, 1).reshape(2 * r, 2 * r)


def negativity(rho) -> float:
    """Sum of |lambda| over eigenvalues lambda < -1e-12 of the partial transpose."""
    transposed = partial_transpose(rho)
    values = eigh(0.5 * (transposed + transposed.conj().T), eigvals_only=True)
    negative = values[values < -NEGATIVITY_THRESHOLD]
    return float(-negative.sum()) if negative.size else 0.0


def full_negativity(correlations: CorrelationMatrix) -> float:
    """Negativity of the untruncated Gaussian state."""
    return negativity(density_matrix_from_correlations(correlations))


def _check_cutoff(cutoff, dimension):
    if cutoff < 1:
        raise ValueError(f"cutoff M must be >= 1, got {cutoff}")
    if cutoff > MAX_CUTOFF:
        raise ValueError(f"cutoff M is limited to M <= {MAX_CUTOFF} by the Fock resource guard, got {cutoff}")
    if dimension < cutoff + 1:
        raise ValueError(f"cutoff M={cutoff} needs at least {cutoff + 1} modes, got {dimension}")


def partial_negativities(correlations: CorrelationMatrix, cutoff: int) -> list:
    """[N_1, ..., N_M] from one tridiagonalization of C."""
    _check_cutoff(cutoff, correlations.dimension)
    chain = householder_tridiagonalize(correlations, steps=cutoff, accumulate=False).correlation_matrix()
    return [
        negativity(density_matrix_from_correlations(reduce_modes(chain, range(j + 1))))
        for j in range(1, cutoff + 1)
    ]


def partial_negativity(correlations: CorrelationMatrix, cutoff: int) -> float:
    """
    Negativity N_M between the system and the first M chain modes.

    Pipeline: tridiagonalize C keeping mode 0 fixed, keep modes 0..M,
    rebuild the Gaussian density matrix, transpose the chain modes, sum the
    negative eigenvalues. N_M is a lower bound on the full negativity.
    """
    _check_cutoff(cutoff, correlations.dimension)
    chain = householder_tridiagonalize(correlations, steps=cutoff, accumulate=False).correlation_matrix()
    return negativity(density_matrix_from_correlations(reduce_modes(chain, range(cutoff + 1))))
