"""Simulated state and process tomography with linear-inversion chi matrices.

The chi matrix of a process ``E`` in an operator basis ``{e_k}`` is defined by
``E(rho) = sum_kl chi[k, l] e_k rho e_l^dagger``.  :class:`ProcessTomography`
estimates it from input/output operator pairs by least squares, with the
scikit-learn estimator interface (``fit`` / ``predict`` / ``get_params``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .channel import Channel, matrix_units
from .pauli import n_qubits_of, parse_pauli, pauli_to_dense

__all__ = [
    "OperatorBasis",
    "ChiMatrix",
    "ProcessTomography",
    "TomographyError",
    "FidelityReport",
    "ONE_QUBIT_LABELS",
    "TWO_QUBIT_LABELS",
    "one_qubit_basis",
    "two_qubit_basis",
    "basis_for",
    "deviation_inputs",
    "qst_outputs",
    "qpt_chi",
    "chi_of_unitary",
    "state_fid_attenuated",
    "state_fid_unattenuated",
    "chi_fid_attenuated",
    "chi_fid_unattenuated",
    "attenuate",
    "evaluate_gate",
]

ONE_QUBIT_LABELS = ("I", "X", "-iY", "Z")
TWO_QUBIT_LABELS = (
    "II", "IX", "-iIY", "IZ",
    "XI", "XX", "-iXY", "XZ",
    "-iYI", "-iYX", "-YY", "-iYZ",
    "ZI", "ZX", "-iZY", "ZZ",
)  # fmt: skip

IMAG_TOL = 1e-9


class TomographyError(ArithmeticError):
    def __init__(self, message: str, condition: float):
        self.condition = condition
        super().__init__(f"{message} (condition estimate {condition:.3e})")


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    labels: tuple
    elements: np.ndarray = field(repr=False)

    def __post_init__(self):
        elements = np.asarray(self.elements, dtype=complex)
        if elements.ndim != 3 or elements.shape[1] != elements.shape[2]:
            raise ValueError("elements must be a stack of square matrices")
        d = elements.shape[1]
        if elements.shape[0] != d * d or len(self.labels) != d * d:
            raise ValueError(f"a complete basis on {d}x{d} operators has {d * d} elements")
        elements.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "elements", elements)

    @classmethod
    def from_labels(cls, labels) -> "OperatorBasis":
        return cls(tuple(labels), np.stack([pauli_to_dense(parse_pauli(s)) for s in labels]))

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    def __len__(self) -> int:
        return len(self.labels)

    def gram(self) -> np.ndarray:
        """``Tr(e_k^dagger e_l)``; equals ``d * identity`` for the built-in bases."""
        flat = self.elements.reshape(len(self), -1)
        return flat.conj() @ flat.T


def one_qubit_basis() -> OperatorBasis:
    return OperatorBasis.from_labels(ONE_QUBIT_LABELS)


def two_qubit_basis() -> OperatorBasis:
    return OperatorBasis.from_labels(TWO_QUBIT_LABELS)


def basis_for(n_qubits: int) -> OperatorBasis:
    if n_qubits == 1:
        return one_qubit_basis()
    if n_qubits == 2:
        return two_qubit_basis()
    raise ValueError("built-in operator bases exist for 1 and 2 qubits only")


def deviation_inputs(n_qubits: int) -> tuple[list[str], list[np.ndarray]]:
    """Traceless Pauli deviation inputs: {X, Y, Z} or the 15 two-qubit products."""
    labels = ["".join(w) for w in itertools.product("IXYZ", repeat=n_qubits)][1:]
    return labels, [pauli_to_dense(s) for s in labels]


@dataclass(frozen=True, eq=False)
class ChiMatrix:
    basis: OperatorBasis
    entries: np.ndarray
    residual: float = 0.0

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        e = self.basis.elements
        return np.einsum("kl,kij,jm,lnm->in", self.entries, e, np.asarray(rho), e.conj())

    def to_dict(self) -> dict:
        return {
            "basis": list(self.basis.labels),
            "entries": _complex_nested(self.entries),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ChiMatrix":
        entries = np.array(data["entries"], dtype=float)
        return cls(OperatorBasis.from_labels(data["basis"]), entries[..., 0] + 1j * entries[..., 1])


def _complex_nested(m: np.ndarray) -> list:
    m = np.asarray(m)
    if m.ndim == 0:
        return [float(m.real), float(m.imag)]
    return [_complex_nested(row) for row in m]


def _design_row(rho: np.ndarray, elements: np.ndarray) -> np.ndarray:
    # vec(e_a rho e_b^dagger) for all (a, b), shape (d*d, K*K)
    k = len(elements)
    t = np.einsum("aij,jm,bnm->abin", elements, rho, elements.conj())
    return t.reshape(k * k, -1).T


class ProcessTomography(BaseEstimator):
    """Linear-inversion process tomography.

    Parameters
    ----------
    basis : OperatorBasis or None
        Operator basis for chi.  ``None`` picks the built-in basis matching
        the data dimension.
    rcond : float
        Relative singular-value cutoff of the least-squares solve.
    max_condition : float
        Largest acceptable condition number of the retained design matrix.

    Attributes
    ----------
    chi_ : ChiMatrix
    residual_ : float
        Frobenius norm of the fit residual over all training pairs.
    condition_ : float
    rank_ : int
    """

    def __init__(self, basis=None, rcond=1e-12, max_condition=1e10):
        self.basis = basis
        self.rcond = rcond
        self.max_condition = max_condition

    def fit(self, X, y):
        X = _stack_operators(X)
        y = _stack_operators(y)
        if X.shape != y.shape:
            raise ValueError(f"inputs {X.shape} and outputs {y.shape} differ in shape")
        d = X.shape[1]
        basis = self.basis if self.basis is not None else basis_for(n_qubits_of(X[0]))
        if basis.dim != d:
            raise ValueError(f"basis acts on dimension {basis.dim}, data on {d}")
        a = np.concatenate([_design_row(rho, basis.elements) for rho in X])
        b = y.reshape(-1)
        sol, _, rank, sv = np.linalg.lstsq(a, b, rcond=self.rcond)
        n_unknowns = len(basis) ** 2
        kept = sv[: rank] if rank else sv[:1]
        condition = float(kept[0] / kept[-1]) if kept[-1] > 0 else np.inf
        if rank < n_unknowns:
            raise TomographyError(
                f"inputs determine only {rank} of {n_unknowns} chi parameters",
                float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf,
            )
        if condition > self.max_condition:
            raise TomographyError("ill-conditioned inversion", condition)
        self.basis_ = basis
        self.residual_ = float(np.linalg.norm(a @ sol - b))
        self.rank_ = int(rank)
        self.condition_ = condition
        self.chi_ = ChiMatrix(basis, sol.reshape(len(basis), len(basis)), self.residual_)
        return self

    def predict(self, X):
        if not hasattr(self, "chi_"):
            raise NotFittedError("call fit() before predict()")
        return np.stack([self.chi_.apply(rho) for rho in _stack_operators(X)])

    def score(self, X, y):
        """Mean unattenuated state fidelity of predicted against given outputs."""
        pred = self.predict(X)
        return float(np.mean([state_fid_unattenuated(p, t) for p, t in zip(pred, _stack_operators(y))]))


def _stack_operators(ops) -> np.ndarray:
    arr = np.asarray(ops, dtype=complex)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ValueError(f"expected a sequence of square matrices, got shape {arr.shape}")
    return arr


def qst_outputs(ch: Channel, inputs) -> list[np.ndarray]:
    return [ch(rho) for rho in inputs]


def qpt_chi(ch: Channel, basis: OperatorBasis | None = None, inputs: str = "full") -> ChiMatrix:
    """Reconstruct chi of ``ch`` by simulated process tomography.

    ``inputs="full"`` probes the matrix units ``|i><j|``.  ``inputs="paper"``
    probes the traceless Pauli deviation operators plus the identity, which
    together span the same operator space.
    """
    if inputs == "full":
        probes = matrix_units(ch.dim)
    elif inputs == "paper":
        probes = [np.eye(ch.dim, dtype=complex)] + deviation_inputs(ch.n_qubits)[1]
    else:
        raise ValueError(f"inputs must be 'full' or 'paper', got {inputs!r}")
    est = ProcessTomography(basis=basis).fit(probes, qst_outputs(ch, probes))
    return est.chi_


def chi_of_unitary(u: np.ndarray, basis: OperatorBasis | None = None, tol: float = 1e-9) -> ChiMatrix:
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    if np.max(np.abs(u.conj().T @ u - np.eye(d))) > tol:
        raise ValueError("chi_of_unitary needs a unitary matrix")
    basis = basis if basis is not None else basis_for(n_qubits_of(u))
    if basis.dim != d:
        raise ValueError("basis dimension mismatch")
    c = np.einsum("kij,ij->k", basis.elements.conj(), u) / d
    return ChiMatrix(basis, np.outer(c, c.conj()))


def _real_trace(x: complex, what: str) -> float:
    if abs(x.imag) > IMAG_TOL * max(1.0, abs(x.real)):
        raise ValueError(f"{what} has imaginary part {x.imag:.3e}")
    return float(x.real)


def _tr(a, b) -> complex:
    return complex(np.trace(np.asarray(a) @ np.asarray(b)))


def state_fid_attenuated(rho_out, rho_th, rho_in) -> float:
    """``Tr(out th) / sqrt(Tr(th th) Tr(in in))``."""
    nth = _real_trace(_tr(rho_th, rho_th), "Tr(th^2)")
    nin = _real_trace(_tr(rho_in, rho_in), "Tr(in^2)")
    if nth <= 0 or nin <= 0:
        raise ValueError("reference and input must have nonzero norm")
    return _real_trace(_tr(rho_out, rho_th), "Tr(out th)") / np.sqrt(nth * nin)


def state_fid_unattenuated(rho_out, rho_th) -> float:
    """``Tr(out th) / sqrt(Tr(out out) Tr(th th))``; invariant under scaling ``out``."""
    nout = _real_trace(_tr(rho_out, rho_out), "Tr(out^2)")
    nth = _real_trace(_tr(rho_th, rho_th), "Tr(th^2)")
    if nout <= 0 or nth <= 0:
        raise ValueError("both states must have nonzero norm")
    return _real_trace(_tr(rho_out, rho_th), "Tr(out th)") / np.sqrt(nout * nth)


def _chi_pair(chi_exp, chi_th):
    if isinstance(chi_exp, ChiMatrix) and isinstance(chi_th, ChiMatrix):
        if chi_exp.basis.labels != chi_th.basis.labels:
            raise ValueError("chi matrices are expressed in different bases")
    a = chi_exp.entries if isinstance(chi_exp, ChiMatrix) else np.asarray(chi_exp)
    b = chi_th.entries if isinstance(chi_th, ChiMatrix) else np.asarray(chi_th)
    if a.shape != b.shape:
        raise ValueError("chi matrices differ in shape")
    return a, b


def chi_fid_attenuated(chi_exp, chi_th) -> float:
    """``|Tr(chi_exp chi_th^dagger)|``."""
    a, b = _chi_pair(chi_exp, chi_th)
    return float(abs(np.vdot(b, a)))


def chi_fid_unattenuated(chi_exp, chi_th) -> float:
    a, b = _chi_pair(chi_exp, chi_th)
    na = np.vdot(a, a).real
    nb = np.vdot(b, b).real
    if na <= 0 or nb <= 0:
        raise ValueError("chi matrices must be nonzero")
    return float(abs(np.vdot(b, a)) / np.sqrt(na * nb))


def attenuate(ch: Channel, lam: float) -> Channel:
    """Uniform signal loss: shrink the traceless part of every output by ``lam``."""
    if not 0 < lam <= 1:
        raise ValueError(f"attenuation must lie in (0, 1], got {lam}")
    d = ch.dim
    vec_id = np.eye(d, dtype=complex).reshape(-1)
    trace_row = vec_id @ ch.superop
    return Channel(lam * ch.superop + (1 - lam) / d * np.outer(vec_id, trace_row))


@dataclass
class FidelityReport:
    labels: list
    outputs: list
    ideal_outputs: list
    state_attenuated: list
    state_unattenuated: list
    chi_attenuated: float
    chi_unattenuated: float
    chi: ChiMatrix = field(repr=False)
    chi_ideal: ChiMatrix = field(repr=False)

    @property
    def mean_state_attenuated(self) -> float:
        return float(np.mean(self.state_attenuated))

    @property
    def mean_state_unattenuated(self) -> float:
        return float(np.mean(self.state_unattenuated))


def evaluate_gate(ch: Channel, ideal: np.ndarray, inputs: str = "paper", lam: float = 1.0) -> FidelityReport:
    """State and chi fidelities of ``ch`` against the unitary ``ideal``.

    ``inputs="paper"`` uses the traceless Pauli deviation inputs,
    ``inputs="full"`` adds the identity.
    """
    if lam != 1.0:
        ch = attenuate(ch, lam)
    if inputs not in ("paper", "full"):
        raise ValueError(f"inputs must be 'paper' or 'full', got {inputs!r}")
    labels, probes = deviation_inputs(ch.n_qubits)
    if inputs == "full":
        labels = ["I" * ch.n_qubits] + labels
        probes = [np.eye(ch.dim, dtype=complex)] + probes
    ideal_ch = Channel.from_unitary(ideal)
    outs = qst_outputs(ch, probes)
    ths = qst_outputs(ideal_ch, probes)
    att = [state_fid_attenuated(o, t, r) for r, o, t in zip(probes, outs, ths)]
    unatt = [state_fid_unattenuated(o, t) for o, t in zip(outs, ths)]
    chi = qpt_chi(ch)
    chi_th = chi_of_unitary(ideal)
    return FidelityReport(
        labels,
        outs,
        ths,
        att,
        unatt,
        chi_fid_attenuated(chi, chi_th),
        chi_fid_unattenuated(chi, chi_th),
        chi,
        chi_th,
    )
