"""Exact and product-formula propagators for time-independent Hamiltonians."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .pauli import OperatorSum, is_hermitian, opsum_to_dense

__all__ = [
    "TrotterSchedule",
    "FactorSequence",
    "expm_hermitian",
    "exact_evolution",
    "build_t1_sequence",
    "build_t2_sequence",
    "build_t3_sequence",
    "trotter_product",
    "product_error",
    "unitarity_error",
    "TAU1",
    "TAU2",
    "TAU3",
]

# J * tau products that make the gates holonomic (couplings normalized to 1)
TAU1 = np.pi / np.sqrt(2)
TAU2 = np.pi
TAU3 = np.pi / np.sqrt(2)


def expm_hermitian(h: np.ndarray, t: float, tol: float = 1e-10) -> np.ndarray:
    """Return ``exp(-i t h)`` via the eigendecomposition of Hermitian ``h``."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, tol):
        raise ValueError("expm_hermitian requires a Hermitian generator")
    try:
        evals, evecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"eigendecomposition failed: {exc}") from exc
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


def exact_evolution(h: OperatorSum, t: float) -> np.ndarray:
    return expm_hermitian(opsum_to_dense(h), t)


def unitarity_error(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


@dataclass(frozen=True)
class TrotterSchedule:
    total_time: float
    steps: int

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps!r}")

    @property
    def dt(self) -> float:
        return self.total_time / self.steps


@dataclass(frozen=True)
class FactorSequence:
    """Ordered exponential factors ``exp(-i * scale * dt * G)``.

    Each entry of ``factors`` is ``(G, scale)``.  Signs of the exponent live in
    ``scale`` so the generators can stay exactly as written in the Hamiltonian.
    The first factor is applied leftmost in the matrix product.
    """

    factors: tuple
    tag: str = ""

    @property
    def n_qubits(self) -> int:
        return self.factors[0][0].n_qubits

    def factor_unitaries(self, dt: float) -> list[np.ndarray]:
        return [expm_hermitian(opsum_to_dense(g), scale * dt) for g, scale in self.factors]

    def step(self, dt: float) -> np.ndarray:
        """Single short-time step: the ordered product of all factors."""
        return reduce(np.matmul, self.factor_unitaries(dt))

    def __len__(self) -> int:
        return len(self.factors)


def _h1_parts(phi1: float, j1: float):
    a1 = j1 * np.cos(phi1 / 2)
    b1 = j1 * np.sin(phi1 / 2)
    y_leak = OperatorSum.from_terms([(b1 / 2, "YI"), (-b1 / 2, "YZ")])
    x_leak = OperatorSum.from_terms([(a1 / 2, "XI"), (-a1 / 2, "XZ")])
    flip_flop_b = OperatorSum.from_terms([(b1 / 2, "XY"), (-b1 / 2, "YX")])
    flip_flop_a = OperatorSum.from_terms([(a1 / 2, "XX"), (a1 / 2, "YY")])
    return y_leak, x_leak, flip_flop_b, flip_flop_a


def build_t1_sequence(phi1: float, j1: float = 1.0) -> FactorSequence:
    """Seven-factor symmetric step approximating ``exp(-i dt H1(phi1))``."""
    y_leak, x_leak, ffb, ffa = _h1_parts(phi1, j1)
    factors = (
        (y_leak, -0.5),
        (x_leak, -0.5),
        (ffb, 0.5),
        (ffa, 1.0),
        (ffb, 0.5),
        (x_leak, -0.5),
        (y_leak, -0.5),
    )
    return FactorSequence(factors, tag="T1")


def build_t2_sequence(phi2: float, j2: float = 1.0) -> FactorSequence:
    """Three-factor symmetric step approximating ``exp(-i dt H2(phi2))``."""
    a2 = j2 * np.sin(phi2 / 2)
    b2 = j2 * np.cos(phi2 / 2)
    x_leak = OperatorSum.from_terms([(b2 / 2, "XI"), (-b2 / 2, "XZ")])
    flip_flop = OperatorSum.from_terms([(a2 / 2, "YX"), (-a2 / 2, "XY")])
    return FactorSequence(((x_leak, -0.5), (flip_flop, 1.0), (x_leak, -0.5)), tag="T2")


def build_t3_sequence(j3: float = 1.0) -> FactorSequence:
    """Four-factor step approximating ``exp(-i dt H3)``."""
    c = j3 / 4
    # X1 (I2 - Z2)(I3 - Z3)
    x_cc = OperatorSum.from_terms([(c, "XII"), (-c, "XZI"), (-c, "XIZ"), (c, "XZZ")])
    # X1 (I2 - Z2) X3 and Y1 (I2 - Z2) Y3
    x_cx = OperatorSum.from_terms([(c, "XIX"), (-c, "XZX")])
    y_cy = OperatorSum.from_terms([(c, "YIY"), (-c, "YZY")])
    return FactorSequence(((x_cc, -0.5), (x_cx, 1.0), (y_cy, 1.0), (x_cc, -0.5)), tag="T3")


def trotter_product(seq: FactorSequence, schedule: TrotterSchedule) -> np.ndarray:
    return np.linalg.matrix_power(seq.step(schedule.dt), schedule.steps)


def product_error(a: np.ndarray, b: np.ndarray, align_phase: bool = True) -> float:
    """Frobenius distance ``||e^{i alpha} a - b||``.

    With ``align_phase`` the global phase ``alpha = arg Tr(a^dagger b)`` is the
    minimizer; when the trace vanishes no alignment is possible and
    ``alpha = 0``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if align_phase:
        overlap = np.vdot(a, b)
        if abs(overlap) > 1e-14:
            a = a * (overlap / abs(overlap))
    return float(np.linalg.norm(a - b))
