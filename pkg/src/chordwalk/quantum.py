"""Density matrices in Bloch coordinates.

A state of an N-level system is written as

    rho = I/N + sum_i tau_i * lambda_i

where ``lambda_i`` are the N**2 - 1 traceless Hermitian generators of SU(N),
normalized so that ``Tr(lambda_i lambda_j) = delta_ij``.  With that
normalization the map ``tau -> rho`` is an isometry between Euclidean
distance on ``tau`` and Hilbert-Schmidt distance on ``rho``, so Lebesgue
measure on Bloch vectors is the flat (Hilbert-Schmidt) measure on states.

Generator ordering is fixed: symmetric off-diagonal pairs ``(j, k)`` with
``j < k`` in lexicographic order, then antisymmetric pairs in the same
order, then the N - 1 diagonal generators.  For N = 2 this gives
``(sigma_x, sigma_y, sigma_z) / sqrt(2)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class GeneratorBasis:
    """Orthonormal traceless Hermitian basis of the N x N matrices."""

    N: int
    generators: np.ndarray  # shape (N**2 - 1, N, N), complex, read-only

    @property
    def d(self) -> int:
        return self.N * self.N - 1

    def gram(self) -> np.ndarray:
        """Hilbert-Schmidt Gram matrix ``Tr(lambda_i lambda_j)``."""
        G = self.generators
        return np.einsum("iab,jba->ij", G, G)


@lru_cache(maxsize=None)
def su_generators(N: int) -> GeneratorBasis:
    """Generalized Gell-Mann basis with ``Tr(lambda_i lambda_j) = delta_ij``."""
    N = int(N)
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    s = 1.0 / np.sqrt(2.0)
    pairs = [(j, k) for j in range(N) for k in range(j + 1, N)]
    gens = []
    for j, k in pairs:
        m = np.zeros((N, N), dtype=complex)
        m[j, k] = m[k, j] = s
        gens.append(m)
    for j, k in pairs:
        m = np.zeros((N, N), dtype=complex)
        m[j, k] = -1j * s
        m[k, j] = 1j * s
        gens.append(m)
    for l in range(1, N):
        m = np.zeros((N, N), dtype=complex)
        m[np.arange(l), np.arange(l)] = 1.0
        m[l, l] = -float(l)
        gens.append(m / np.sqrt(l * (l + 1)))
    G = np.array(gens)
    G.setflags(write=False)
    return GeneratorBasis(N, G)


def _check_hermitian(H: np.ndarray, what: str = "matrix") -> np.ndarray:
    H = np.asarray(H)
    if H.ndim < 2 or H.shape[-1] != H.shape[-2]:
        raise ValueError(f"{what} must be square, got shape {H.shape}")
    scale = max(1.0, float(np.max(np.abs(H)))) if H.size else 1.0
    if np.max(np.abs(H - np.swapaxes(H, -1, -2).conj()), initial=0.0) > HERMITIAN_TOL * scale:
        raise ValueError(f"{what} is not Hermitian")
    return H


def bloch_to_density(tau, basis: GeneratorBasis) -> np.ndarray:
    """Map a Bloch vector (or a stack of them) to ``I/N + sum tau_i lambda_i``.

    Positivity is not checked; that is the membership test of the state body.
    """
    tau = np.asarray(tau, dtype=float)
    if tau.shape[-1] != basis.d:
        raise ValueError(f"Bloch vector must have length {basis.d}, got {tau.shape[-1]}")
    rho = np.tensordot(tau, basis.generators, axes=(-1, 0))
    idx = np.arange(basis.N)
    rho[..., idx, idx] += 1.0 / basis.N
    return rho


def density_to_bloch(rho, basis: GeneratorBasis) -> np.ndarray:
    """Bloch coordinates ``tau_i = Tr(lambda_i rho)`` of a Hermitian matrix."""
    rho = _check_hermitian(rho, "rho")
    if rho.shape[-1] != basis.N:
        raise ValueError(f"rho must be {basis.N}x{basis.N}, got {rho.shape}")
    tau = np.einsum("iab,...ba->...i", basis.generators, rho)
    if np.max(np.abs(tau.imag), initial=0.0) > HERMITIAN_TOL * max(1.0, np.max(np.abs(tau.real), initial=0.0)):
        raise ValueError("Bloch coordinates are not real; rho is not Hermitian")
    return np.ascontiguousarray(tau.real)


def min_eigenvalue(H) -> float | np.ndarray:
    """Smallest eigenvalue of a Hermitian matrix (LAPACK ``heevd``).

    Accepts a stack of matrices and returns one value per matrix.
    """
    H = _check_hermitian(H, "H")
    w = np.linalg.eigvalsh(H)[..., 0]
    return float(w) if w.ndim == 0 else w


def partial_transpose(rho, K: int) -> np.ndarray:
    """Transpose on the second tensor factor of a ``K x K`` bipartite matrix.

    With composite indices ``(a, b)`` for rows and ``(c, d)`` for columns the
    entry ``((a, b), (c, d))`` moves to ``((a, d), (c, b))``.  Works on
    stacks of matrices.
    """
    rho = np.asarray(rho)
    K = int(K)
    N = rho.shape[-1]
    if K < 1 or K * K != N or rho.shape[-2] != N:
        raise ValueError(f"matrix of shape {rho.shape} is not (K*K)x(K*K) with K={K}")
    lead = rho.shape[:-2]
    t = rho.reshape(lead + (K, K, K, K))
    n = len(lead)
    axes = tuple(range(n)) + (n, n + 3, n + 2, n + 1)
    return t.transpose(axes).reshape(lead + (N, N))


def is_ppt(rho, K: int, tol: float = 1e-10) -> bool | np.ndarray:
    """Positive-partial-transpose test ``lambda_min(rho^T2) >= -tol``."""
    return min_eigenvalue(partial_transpose(rho, K)) >= -tol


def random_hs_density(N: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Exact draws from the Hilbert-Schmidt (flat) measure on N x N states.

    ``rho = G G^dag / Tr(G G^dag)`` with ``G`` a square complex Ginibre matrix.
    """
    shape = (N, N) if size is None else (size, N, N)
    G = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    W = G @ np.swapaxes(G, -1, -2).conj()
    tr = np.trace(W, axis1=-2, axis2=-1).real
    return W / tr[..., None, None]
