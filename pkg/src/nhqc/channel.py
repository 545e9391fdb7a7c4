"""Linear maps on operators, stored as superoperator matrices.

A channel on ``d x d`` operators is held as the ``d**2 x d**2`` matrix ``S``
acting on row-major vectorized operators: ``vec(E(rho)) = S @ vec(rho)``.
Column ``i*d + j`` of ``S`` is therefore ``vec(E(|i><j|))``.
"""

from __future__ import annotations

import numpy as np

from .pauli import n_qubits_of

__all__ = ["Channel", "matrix_units"]


def matrix_units(d: int) -> list[np.ndarray]:
    """``|i><j|`` for ``i, j`` in row-major order."""
    units = []
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            units.append(e)
    return units


class Channel:
    def __init__(self, superop: np.ndarray):
        superop = np.asarray(superop, dtype=complex)
        d2 = superop.shape[0]
        d = int(round(np.sqrt(d2)))
        if superop.shape != (d2, d2) or d * d != d2:
            raise ValueError(f"superoperator must be d^2 x d^2, got {superop.shape}")
        self.dim = d
        self.n_qubits = n_qubits_of(np.empty((d, d)))
        self.superop = superop

    @classmethod
    def from_function(cls, fn, dim: int) -> "Channel":
        """Tabulate a linear map ``fn`` on the matrix units."""
        cols = [np.asarray(fn(e), dtype=complex).reshape(-1) for e in matrix_units(dim)]
        return cls(np.stack(cols, axis=1))

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> "Channel":
        u = np.asarray(u, dtype=complex)
        return cls(np.kron(u, u.conj()))

    @classmethod
    def from_kraus(cls, ops) -> "Channel":
        ops = [np.asarray(k, dtype=complex) for k in ops]
        return cls(sum(np.kron(k, k.conj()) for k in ops))

    @classmethod
    def identity(cls, dim: int) -> "Channel":
        return cls(np.eye(dim * dim, dtype=complex))

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.dim, self.dim):
            raise ValueError(f"channel acts on {self.dim}x{self.dim} operators, got {rho.shape}")
        return (self.superop @ rho.reshape(-1)).reshape(self.dim, self.dim)

    def compose(self, other: "Channel") -> "Channel":
        """``self`` after ``other``."""
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return Channel(self.superop @ other.superop)

    def trace_preservation_error(self) -> float:
        """Max over matrix units of ``|Tr E(|i><j|) - delta_ij|``."""
        d = self.dim
        # row-major vec: Tr(A) = sum of entries at positions k*d + k
        traces = self.superop[:: d + 1, :].sum(axis=0)
        return float(np.max(np.abs(traces - np.eye(d).reshape(-1))))

    def hermiticity_preservation_error(self) -> float:
        errs = []
        for e in matrix_units(self.dim):
            herm = e + e.conj().T
            out = self(herm)
            errs.append(np.max(np.abs(out - out.conj().T)))
        return float(max(errs))

    def __repr__(self) -> str:
        return f"Channel(dim={self.dim})"
