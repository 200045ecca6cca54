"""
Householder Tridiagonalization
==============================

Brings a Hermitian correlation matrix into chain form while keeping the
system mode 0 fixed. Each step takes the column b below the current pivot,
sets s = (|b|, 0, ..., 0), and applies the reflector Q = 1 - alpha v v^dagger
with

    v       = (b - s) / |b - s|
    alpha_r = (2 s^dagger s - b^dagger s - s^dagger b) / 2
    alpha_i = -Im(b^dagger s)
    alpha   = 2 alpha_r (alpha_r + i alpha_i) / (alpha_r^2 + alpha_i^2)

to the trailing block as C_B -> Q C_B Q^dagger, which maps b onto s.
Every subdiagonal element therefore comes out as the Euclidean norm of the
column it replaces.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .gaussian import CorrelationMatrix

logger = logging.getLogger(__name__)

HERMITICITY_TOLERANCE = 1e-8
ZERO_COLUMN_TOLERANCE = 1e-14
DEGENERATE_TOLERANCE = 1e-14


@dataclass(frozen=True)
class Reflector:
    """Q = 1 - alpha v v^dagger acting on modes offset, offset+1, ..."""

    offset: int
    alpha: complex
    vector: np.ndarray

    def matrix(self, dimension: int) -> np.ndarray:
        q = np.eye(dimension, dtype=complex)
        v = self.vector
        q[self.offset:, self.offset:] -= self.alpha * np.outer(v, v.conj())
        return q


@dataclass(frozen=True)
class TridiagonalizationResult:
    """
    Chain form of a correlation matrix.

    c_tilde = (1 (+) U)^dagger C (1 (+) U), where U acts on the bath modes
    only. When the decomposition was stopped early after `steps` reflectors,
    only rows and columns 0..steps of c_tilde are in final chain form.
    """

    c_tilde: np.ndarray
    unitary: Optional[np.ndarray]
    reflectors: tuple
    phases: np.ndarray
    steps: int
    mode_labels: tuple

    @property
    def dimension(self) -> int:
        return self.c_tilde.shape[0]

    def correlation_matrix(self) -> CorrelationMatrix:
        labels = ("S",) + tuple(f"chain{i}" for i in range(1, self.dimension))
        return CorrelationMatrix(self.c_tilde, labels)

    def full_unitary(self) -> np.ndarray:
        if self.unitary is None:
            raise ValueError("unitary was not accumulated; rerun with accumulate=True")
        full = np.zeros((self.dimension, self.dimension), dtype=complex)
        full[0, 0] = 1.0
        full[1:, 1:] = self.unitary
        return full

    def transform(self, correlations) -> np.ndarray:
        """(1 (+) U)^dagger C (1 (+) U) using the accumulated unitary."""
        w = self.full_unitary()
        return w.conj().T @ _as_array(correlations) @ w

    def apply_reflectors(self, correlations) -> np.ndarray:
        """Same transformation, applying the recorded reflectors one by one."""
        c = _as_array(correlations).copy()
        for reflector in self.reflectors:
            q = reflector.matrix(self.dimension)
            c = q @ c @ q.conj().T
        return self.phases.conj()[:, None] * c * self.phases[None, :]

    def reconstruct(self) -> np.ndarray:
        """Undo the transformation: returns the original C."""
        w = self.full_unitary()
        return w @ self.c_tilde @ w.conj().T


def _as_array(correlations) -> np.ndarray:
    return np.asarray(getattr(correlations, "matrix", correlations), dtype=complex)


def _reflector(b):
    """Reflector data for column b, or None when no reflection is needed."""
    norm = np.linalg.norm(b)
    s = np.zeros_like(b)
    s[0] = norm
    diff = b - s
    diff_norm = np.linalg.norm(diff)
    if diff_norm < DEGENERATE_TOLERANCE * norm:
        return None, s
    v = diff / diff_norm
    b_dag_s = np.vdot(b, s)
    alpha_r = 0.5 * (2.0 * np.vdot(s, s) - b_dag_s - np.conj(b_dag_s)).real
    alpha_i = -b_dag_s.imag
    alpha = 2.0 * alpha_r / (alpha_r ** 2 + alpha_i ** 2) * (alpha_r + 1j * alpha_i)
    return (alpha, v), s


def householder_tridiagonalize(correlations, steps: Optional[int] = None,
                               accumulate: bool = True) -> TridiagonalizationResult:
    """
    Tridiagonalize a Hermitian matrix keeping mode 0 fixed.

    Args:
        correlations: CorrelationMatrix or square array, dimension >= 2.
        steps: stop after this many pivots (default: all, dimension - 1).
            Modes 0..steps are final after `steps` pivots.
        accumulate: also build the bath unitary U.

    Returns:
        TridiagonalizationResult with nonnegative real subdiagonal.
    """
    c = _as_array(correlations)
    n = c.shape[0]
    if c.ndim != 2 or c.shape[1] != n or n < 2:
        raise ValueError(f"tridiagonalization needs a square matrix of dimension >= 2, got {c.shape}")
    residual = np.max(np.abs(c - c.conj().T))
    if residual > HERMITICITY_TOLERANCE:
        raise ValueError(f"matrix is not Hermitian (symmetry residual {residual:.3e})")

    total = n - 1 if steps is None else min(int(steps), n - 1)
    if total < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")

    work = c.copy()
    bath = np.eye(n - 1, dtype=complex) if accumulate else None
    reflectors = []
    skipped = 0

    for j in range(total):
        b = work[j + 1:, j].copy()
        if np.linalg.norm(b) < ZERO_COLUMN_TOLERANCE:
            work[j + 1:, j] = 0.0
            work[j, j + 1:] = 0.0
            skipped += 1
            continue

        data, s = _reflector(b)
        if data is None:
            # Column already has the target form; clear the residue below the subdiagonal.
            work[j + 2:, j] = 0.0
            work[j, j + 2:] = 0.0
            skipped += 1
            continue

        alpha, v = data
        block = work[j + 1:, j + 1:]
        w = block @ v
        gamma = np.vdot(v, w).real
        block = (block
                 - alpha * np.outer(v, w.conj())
                 - np.conj(alpha) * np.outer(w, v.conj())
                 + abs(alpha) ** 2 * gamma * np.outer(v, v.conj()))
        work[j + 1:, j + 1:] = 0.5 * (block + block.conj().T)
        work[j + 1:, j] = s
        work[j, j + 1:] = s.conj()

        if bath is not None:
            rows = bath[j:, :]
            bath[j:, :] = rows - alpha * np.outer(v, v.conj() @ rows)
        reflectors.append(Reflector(j + 1, complex(alpha), v))

    if skipped:
        logger.debug(f"Householder: {skipped} of {total} pivots needed no reflection")

    # Diagonal phase gauge making the finished subdiagonal nonnegative real.
    phases = np.ones(n, dtype=complex)
    for j in range(total):
        element = work[j + 1, j]
        rotation = np.exp(1j * np.angle(element)) if element != 0 else 1.0
        phases[j + 1:] = phases[j] * rotation
    work = phases.conj()[:, None] * work * phases[None, :]
    for j in range(total):
        work[j + 1, j] = work[j + 1, j].real
        work[j, j + 1] = work[j + 1, j]

    unitary = None
    if bath is not None:
        bath = phases.conj()[1:, None] * bath
        unitary = bath.conj().T

    labels = getattr(correlations, "mode_labels", None) or tuple(str(i) for i in range(n))
    return TridiagonalizationResult(work, unitary, tuple(reflectors), phases, total, labels)
