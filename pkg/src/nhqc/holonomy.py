"""Numerical checks of the two conditions that make an evolution holonomic.

For a subspace spanned by ``|phi_k(0)>`` and evolution time ``tau``:

* (i) the subspace is mapped onto itself: ``U P U^dagger = P``;
* (ii) the Hamiltonian has no matrix elements inside the evolving subspace,
  ``<phi_k(t)|H|phi_l(t)> = 0`` for all ``t`` in ``[0, tau]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import OperatorSum, opsum_to_dense
from .propagator import expm_hermitian

__all__ = [
    "Subspace",
    "HolonomyReport",
    "LeakageError",
    "projector",
    "check_condition_i",
    "check_condition_ii",
    "holonomy_check",
    "logical_action",
    "DEFAULT_GRID",
    "DEFAULT_TOL",
]

DEFAULT_GRID = 101
DEFAULT_TOL = 1e-9
LEAKAGE_TOL = 1e-6


class LeakageError(ValueError):
    """The unitary does not map the subspace onto itself."""

    def __init__(self, leakage: float, tol: float):
        self.leakage = leakage
        super().__init__(f"subspace not preserved: ||U P U^+ - P||_F = {leakage:.3e} >= {tol:g}")


@dataclass(frozen=True, eq=False)
class Subspace:
    """Orthonormal basis vectors stored as the rows of ``basis``."""

    n_qubits: int
    basis: np.ndarray

    def __post_init__(self):
        basis = np.atleast_2d(np.asarray(self.basis, dtype=complex))
        dim = 2**self.n_qubits
        if basis.shape[1] != dim:
            raise ValueError(f"basis vectors must have length {dim}, got {basis.shape[1]}")
        if not 1 <= basis.shape[0] <= dim:
            raise ValueError(f"subspace dimension must be in 1..{dim}")
        gram = basis.conj() @ basis.T
        if np.max(np.abs(gram - np.eye(basis.shape[0]))) >= 1e-12:
            raise ValueError("basis vectors are not orthonormal")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def from_labels(cls, labels) -> "Subspace":
        """``Subspace.from_labels(["10", "11"])`` spans |10>, |11>."""
        labels = list(labels)
        if not labels:
            raise ValueError("need at least one basis label")
        n = len(labels[0])
        if any(len(s) != n or set(s) - {"0", "1"} for s in labels):
            raise ValueError(f"labels must be equal-length bit strings, got {labels}")
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate basis labels")
        vecs = np.zeros((len(labels), 2**n), dtype=complex)
        for row, s in enumerate(labels):
            vecs[row, int(s, 2)] = 1.0
        return cls(n, vecs)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


@dataclass(frozen=True)
class HolonomyReport:
    condition_i_residual: float
    condition_ii_max: float
    grid_points: int
    tol: float

    @property
    def passed(self) -> tuple[bool, bool]:
        return (self.condition_i_residual < self.tol, self.condition_ii_max < self.tol)

    @property
    def holonomic(self) -> bool:
        return all(self.passed)


def projector(s: Subspace) -> np.ndarray:
    return s.basis.T @ s.basis.conj()


def _check_dims(h: OperatorSum, s: Subspace):
    if h.n_qubits != s.n_qubits:
        raise ValueError(f"Hamiltonian acts on {h.n_qubits} qubits, subspace on {s.n_qubits}")


def _leakage(u: np.ndarray, p: np.ndarray) -> float:
    return float(np.linalg.norm(u @ p @ u.conj().T - p))


def check_condition_i(h: OperatorSum, s: Subspace, tau: float, tol: float = DEFAULT_TOL):
    """Return ``(residual, passed)`` with residual ``||U P U^+ - P||_F``."""
    _check_dims(h, s)
    if tau <= 0:
        raise ValueError("tau must be positive")
    u = expm_hermitian(opsum_to_dense(h), tau)
    residual = _leakage(u, projector(s))
    return residual, residual < tol


def check_condition_ii(
    h: OperatorSum,
    s: Subspace,
    tau: float,
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
):
    """Return ``(max_residual, passed)``.

    ``grid`` is the number of evenly spaced time points in ``[0, tau]``,
    endpoints included.
    """
    _check_dims(h, s)
    if grid < 2:
        raise ValueError("grid must have at least 2 points")
    hd = opsum_to_dense(h)
    evals, evecs = np.linalg.eigh(hd)
    worst = 0.0
    for t in np.linspace(0.0, tau, grid):
        u = (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T
        states = u @ s.basis.T
        block = states.conj().T @ hd @ states
        worst = max(worst, float(np.max(np.abs(block))))
    return worst, worst < tol


def holonomy_check(
    h: OperatorSum,
    s: Subspace,
    tau: float,
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
) -> HolonomyReport:
    res_i, _ = check_condition_i(h, s, tau, tol)
    res_ii, _ = check_condition_ii(h, s, tau, grid, tol)
    return HolonomyReport(res_i, res_ii, grid, tol)


def logical_action(u: np.ndarray, s: Subspace, tol: float = LEAKAGE_TOL) -> np.ndarray:
    """Matrix ``<phi_k|U|phi_l>`` of ``u`` restricted to ``s``.

    Raises :class:`LeakageError` when ``u`` drives amplitude out of ``s`` by
    more than ``tol``; use :func:`logical_block` to project regardless.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2**s.n_qubits,) * 2:
        raise ValueError(f"unitary shape {u.shape} does not match a {s.n_qubits}-qubit subspace")
    leak = _leakage(u, projector(s))
    if leak >= tol:
        raise LeakageError(leak, tol)
    return logical_block(u, s)


def logical_block(u: np.ndarray, s: Subspace) -> np.ndarray:
    return s.basis.conj() @ np.asarray(u) @ s.basis.T
