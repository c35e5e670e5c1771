"""Partial traces, entropies and fidelities for dense Fock-space states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import MultiModeState, _check_compatible

EIGEN_CLIP = 1e-10
DENSE_NEGATIVITY_LIMIT = 400


@dataclass(frozen=True, eq=False)
class ReducedDensity:
    matrix: np.ndarray
    trace: float
    modes: tuple[int, ...] = ()

    def purity(self) -> float:
        return float(np.einsum("ij,ji->", self.matrix, self.matrix).real)


def _split(state: MultiModeState, keep_modes) -> tuple[tuple[int, ...], tuple[int, ...]]:
    keep = tuple(sorted(set(int(m) for m in keep_modes)))
    if not keep:
        raise ValueError("keep set must not be empty")
    if any(not 0 <= m < state.mode_count for m in keep):
        raise IndexError(f"modes {keep} out of range for {state.mode_count} modes")
    rest = tuple(m for m in range(state.mode_count) if m not in keep)
    return keep, rest


def _bipartite_matrix(state: MultiModeState, keep_modes) -> np.ndarray:
    """Amplitudes reshaped to ``(dim_keep, dim_rest)``, normalized."""
    keep, rest = _split(state, keep_modes)
    n2 = state.norm_squared()
    if n2 == 0.0:
        raise ValueError("zero state")
    psi = np.transpose(state.amplitudes, keep + rest)
    return psi.reshape(state.dim ** len(keep), -1) / np.sqrt(n2)


def partial_trace(state: MultiModeState, keep_modes) -> ReducedDensity:
    """Reduced density matrix on ``keep_modes``; the state is normalized first."""
    keep, _ = _split(state, keep_modes)
    psi = _bipartite_matrix(state, keep)
    rho = psi @ psi.conj().T
    rho = (rho + rho.conj().T) / 2
    return ReducedDensity(rho, float(np.trace(rho).real), keep)


def _eigenvalues(rho: np.ndarray) -> np.ndarray:
    lam = np.linalg.eigvalsh(rho)
    if lam.min() < -EIGEN_CLIP:
        raise ValueError(f"density matrix has eigenvalue {lam.min():.3g} below -{EIGEN_CLIP:g}")
    return np.clip(lam, 0.0, None)


def entropy(rho: ReducedDensity | np.ndarray) -> float:
    """Von Neumann entropy in bits."""
    matrix = rho.matrix if isinstance(rho, ReducedDensity) else np.asarray(rho)
    lam = _eigenvalues(matrix)
    lam = lam[lam > 0.0]
    return float(-(lam * np.log2(lam)).sum()) + 0.0


def entanglement_entropy(state: MultiModeState, keep_modes) -> float:
    """Entropy of the smaller side of a pure bipartition, via singular values."""
    s = np.linalg.svd(_bipartite_matrix(state, keep_modes), compute_uv=False)
    lam = s**2
    lam = lam[lam > 0.0]
    return float(-(lam * np.log2(lam)).sum()) + 0.0


def partial_transpose(rho: np.ndarray, dim_a: int, dim_b: int) -> np.ndarray:
    """Transpose the second tensor factor of a ``(dim_a*dim_b)``-square matrix."""
    r = rho.reshape(dim_a, dim_b, dim_a, dim_b)
    return r.transpose(0, 3, 2, 1).reshape(dim_a * dim_b, dim_a * dim_b)


def log_negativity(state: MultiModeState, split, dense: bool | None = None) -> float:
    """``log2 || rho^{T_B} ||_1`` for the pure state across ``split`` vs the rest.

    Dense partial transposition is used for bipartite dimensions up to
    ``DENSE_NEGATIVITY_LIMIT``; above that the pure-state identity
    ``||rho^{T_B}||_1 = (sum_i s_i)^2`` over Schmidt coefficients ``s_i`` is used.
    """
    psi = _bipartite_matrix(state, split)
    dim_a, dim_b = psi.shape
    if dense is None:
        dense = dim_a * dim_b <= DENSE_NEGATIVITY_LIMIT
    if dense:
        vec = psi.reshape(-1)
        rho = np.outer(vec, vec.conj())
        pt = partial_transpose(rho, dim_a, dim_b)
        trace_norm = np.abs(np.linalg.eigvalsh((pt + pt.conj().T) / 2)).sum()
    else:
        s = np.linalg.svd(psi, compute_uv=False)
        trace_norm = s.sum() ** 2
    return max(float(np.log2(trace_norm)), 0.0)


def fidelity_fock(a: MultiModeState, b: MultiModeState) -> float:
    """``|<a|b>|^2`` for the normalized versions of ``a`` and ``b``."""
    _check_compatible(a, b)
    na, nb = a.norm_squared(), b.norm_squared()
    if na == 0.0 or nb == 0.0:
        raise ValueError("fidelity of a zero state")
    f = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2 / (na * nb)
    return float(min(f, 1.0))
