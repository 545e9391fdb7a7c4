"""Hamiltonians, target unitaries and logical gates of the ancilla-assisted scheme.

Register layout: qubit 1 is the ancilla, qubits 2 (and 3) carry the logical
information.  Logical states live in the ancilla = 1 block:

* one logical qubit: |0>_L = |10>, |1>_L = |11>
* two logical qubits: |ab>_L = |1ab>
"""

from __future__ import annotations

import ast
import operator
from dataclasses import dataclass, field

import numpy as np

from .channel import Channel
from .holonomy import Subspace, logical_action, logical_block, projector
from .pauli import OperatorSum, partial_trace, tensor
from .propagator import (
    TAU1,
    TAU2,
    TAU3,
    TrotterSchedule,
    build_t1_sequence,
    build_t2_sequence,
    build_t3_sequence,
    exact_evolution,
    trotter_product,
)

__all__ = [
    "Encoding",
    "ONE_QUBIT_ENCODING",
    "TWO_QUBIT_ENCODING",
    "GateSpec",
    "GateRealization",
    "build_h1",
    "build_h2",
    "build_h3",
    "exact_u1",
    "exact_u2",
    "exact_u3",
    "u_xz",
    "u_zx",
    "ideal_rz",
    "ideal_rx",
    "CNOT",
    "realize_gate",
    "induced_channel",
    "parse_angle",
    "DEFAULT_STEPS",
]

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    dtype=complex,
)

DEFAULT_STEPS = {"rz": 3, "rx": 2, "cnot": 2}


@dataclass(frozen=True)
class Encoding:
    n_register: int
    logical_basis: tuple
    ancilla_index: int = 1

    def __post_init__(self):
        expected = {
            2: ("10", "11"),
            3: ("100", "101", "110", "111"),
        }
        if self.n_register not in expected:
            raise ValueError("only 2-qubit (one logical) and 3-qubit (two logical) registers exist")
        if tuple(self.logical_basis) != expected[self.n_register]:
            raise ValueError(f"logical basis for {self.n_register} qubits must be {expected[self.n_register]}")
        if self.ancilla_index != 1:
            raise ValueError("the ancilla is qubit 1")

    @property
    def n_logical(self) -> int:
        return self.n_register - 1

    @property
    def subspace(self) -> Subspace:
        return Subspace.from_labels(self.logical_basis)

    @property
    def work_qubits(self) -> tuple:
        return tuple(range(2, self.n_register + 1))


ONE_QUBIT_ENCODING = Encoding(2, ("10", "11"))
TWO_QUBIT_ENCODING = Encoding(3, ("100", "101", "110", "111"))


# --- Hamiltonians -----------------------------------------------------------


def build_h1(phi1: float, j1: float = 1.0) -> OperatorSum:
    a1 = j1 * np.cos(phi1 / 2)
    b1 = j1 * np.sin(phi1 / 2)
    # 1/2 [a1 (XX + YY) + b1 (XY - YX) - a1 X(I - Z) - b1 Y(I - Z)]
    terms = [
        (a1 / 2, "XX"),
        (a1 / 2, "YY"),
        (b1 / 2, "XY"),
        (-b1 / 2, "YX"),
        (-a1 / 2, "XI"),
        (a1 / 2, "XZ"),
        (-b1 / 2, "YI"),
        (b1 / 2, "YZ"),
    ]
    return OperatorSum.from_terms(terms)


def build_h2(phi2: float, j2: float = 1.0) -> OperatorSum:
    a2 = j2 * np.sin(phi2 / 2)
    b2 = j2 * np.cos(phi2 / 2)
    terms = [
        (a2 / 2, "YX"),
        (-a2 / 2, "XY"),
        (-b2 / 2, "XI"),
        (b2 / 2, "XZ"),
    ]
    return OperatorSum.from_terms(terms)


def build_h3(j3: float = 1.0) -> OperatorSum:
    c = j3 / 4
    # X1(I-Z2)X3 + Y1(I-Z2)Y3 - X1(I-Z2)(I-Z3), expanded
    terms = [
        (c, "XIX"),
        (-c, "XZX"),
        (c, "YIY"),
        (-c, "YZY"),
        (-c, "XII"),
        (c, "XZI"),
        (c, "XIZ"),
        (-c, "XZZ"),
    ]
    return OperatorSum.from_terms(terms)


# --- literal target matrices --------------------------------------------------
# Written out entry by entry; never derived from the Hamiltonians.


def exact_u1(phi1: float) -> np.ndarray:
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = 1
    u[1, 1] = -1
    u[2, 3] = np.exp(-1j * phi1)
    u[3, 2] = np.exp(1j * phi1)
    return u


def exact_u2(phi2: float) -> np.ndarray:
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = 1
    u[1, 1] = -1
    u[2, 2] = np.cos(phi2)
    u[2, 3] = 1j * np.sin(phi2)
    u[3, 2] = -1j * np.sin(phi2)
    u[3, 3] = -np.cos(phi2)
    return u


def exact_u3() -> np.ndarray:
    u = np.diag([1, 1, 1, -1, 1, 1, 0, 0]).astype(complex)
    u[6, 7] = u[7, 6] = 1
    return u


def u_xz(phi1: float) -> np.ndarray:
    return np.array([[0, np.exp(-1j * phi1)], [np.exp(1j * phi1), 0]], dtype=complex)


def u_zx(phi2: float) -> np.ndarray:
    c, s = np.cos(phi2), np.sin(phi2)
    return np.array([[c, 1j * s], [-1j * s, -c]], dtype=complex)


def ideal_rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-1j * theta / 2), np.exp(1j * theta / 2)])


def ideal_rx(phi: float) -> np.ndarray:
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


# --- gate specs ---------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_angle(text: str) -> float:
    """Evaluate a small arithmetic expression in ``pi``: ``"pi/2"``, ``"-3*pi/4"``, ``"0.7"``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return np.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"unsupported angle expression {text!r}")

    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"unsupported angle expression {text!r}") from exc
    value = ev(tree)
    if not np.isfinite(value):
        raise ValueError(f"angle {text!r} is not finite")
    return value


@dataclass(frozen=True)
class GateSpec:
    """What to build: ``kind`` in {"rz", "rx", "cnot"}, an angle, and a mode.

    ``steps`` is the Trotter step count per segment; ``None`` means the
    default for the gate (3 for Rz, 2 for Rx and CNOT).  ``angle_text`` keeps
    the original angle expression for round-tripping.
    """

    kind: str
    angle: float | None = None
    mode: str = "trotter"
    steps: int | None = None
    coupling: float = 1.0
    angle_text: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in DEFAULT_STEPS:
            raise ValueError(f"unknown gate kind {self.kind!r}; expected rz, rx or cnot")
        if self.kind == "cnot":
            if self.angle is not None:
                raise ValueError("cnot takes no angle")
        elif self.angle is None:
            raise ValueError(f"{self.kind} needs an angle")
        if self.mode not in ("exact", "trotter"):
            raise ValueError(f"mode must be exact or trotter, got {self.mode!r}")
        if self.mode == "exact" and self.steps is not None:
            raise ValueError("exact mode takes no step count")
        if self.steps is not None and (int(self.steps) != self.steps or self.steps < 1):
            raise ValueError("step count must be a positive integer")
        if not self.coupling > 0:
            raise ValueError("coupling must be positive")

    @property
    def n(self) -> int | None:
        if self.mode == "exact":
            return None
        return self.steps if self.steps is not None else DEFAULT_STEPS[self.kind]

    @classmethod
    def parse(cls, text: str) -> "GateSpec":
        """Parse ``rz:theta=pi/2:mode=trotter:n=3``, ``rx:phi=pi:mode=exact``, ``cnot:n=2``."""
        kind, *fields = text.strip().split(":")
        kind = kind.lower()
        opts = {}
        for f in fields:
            key, sep, value = f.partition("=")
            if not sep or not key or not value:
                raise ValueError(f"malformed field {f!r} in gate spec {text!r}")
            if key in opts:
                raise ValueError(f"duplicate field {key!r} in gate spec {text!r}")
            opts[key] = value
        angle_key = {"rz": "theta", "rx": "phi"}.get(kind)
        angle = angle_text = None
        if angle_key is not None and angle_key in opts:
            angle_text = opts.pop(angle_key)
            angle = parse_angle(angle_text)
        steps = int(opts.pop("n")) if "n" in opts else None
        mode = opts.pop("mode", "trotter")
        coupling = float(opts.pop("j", 1.0))
        if opts:
            raise ValueError(f"unknown field(s) {sorted(opts)} in gate spec {text!r}")
        return cls(kind, angle, mode, steps, coupling, angle_text)

    def __str__(self) -> str:
        parts = [self.kind]
        if self.angle is not None:
            key = "theta" if self.kind == "rz" else "phi"
            parts.append(f"{key}={self.angle_text or repr(self.angle)}")
        parts.append(f"mode={self.mode}")
        if self.mode == "trotter":
            parts.append(f"n={self.n}")
        if self.coupling != 1.0:
            parts.append(f"j={self.coupling!r}")
        return ":".join(parts)

    @property
    def label(self) -> str:
        if self.kind == "cnot":
            return "CNOT"
        name = "Rz" if self.kind == "rz" else "Rx"
        return f"{name}({self.angle_text or format(self.angle, '.6g')})"


@dataclass(frozen=True, eq=False)
class GateRealization:
    register_unitary: np.ndarray
    encoding: Encoding
    ideal_logical: np.ndarray
    spec: GateSpec

    def logical_action(self, tol: float = 1e-6) -> np.ndarray:
        return logical_action(self.register_unitary, self.encoding.subspace, tol)

    def logical_block(self) -> np.ndarray:
        return logical_block(self.register_unitary, self.encoding.subspace)

    @property
    def leakage(self) -> float:
        p = projector(self.encoding.subspace)
        u = self.register_unitary
        return float(np.linalg.norm(u @ p @ u.conj().T - p))

    def channel(self, leakage: str = "trace") -> Channel:
        return induced_channel(self, leakage)


def _segment(kind: str, angle: float, spec: GateSpec) -> np.ndarray:
    j = spec.coupling
    if kind == "h1":
        tau, h, seq = TAU1 / j, build_h1(angle, j), build_t1_sequence
    elif kind == "h2":
        tau, h, seq = TAU2 / j, build_h2(angle, j), build_t2_sequence
    else:
        tau, h = TAU3 / j, build_h3(j)
        seq = None
    if spec.mode == "exact":
        return exact_evolution(h, tau)
    schedule = TrotterSchedule(tau, spec.n)
    sequence = build_t3_sequence(j) if seq is None else seq(angle, j)
    return trotter_product(sequence, schedule)


def realize_gate(spec: GateSpec | str) -> GateRealization:
    """Build the register unitary for a logical gate.

    Rz(theta) = U1^0 U1^{-theta/2}, Rx(phi) = U2^0 U2^{-phi/2}, CNOT = U3.  In
    trotter mode every segment is a product formula except the leading
    ``U2^0`` of Rx, whose Hamiltonian is a single commuting term and is
    applied as one exact exponential.
    """
    if isinstance(spec, str):
        spec = GateSpec.parse(spec)
    if spec.kind == "rz":
        u = _segment("h1", 0.0, spec) @ _segment("h1", -spec.angle / 2, spec)
        return GateRealization(u, ONE_QUBIT_ENCODING, ideal_rz(spec.angle), spec)
    if spec.kind == "rx":
        first = exact_evolution(build_h2(0.0, spec.coupling), TAU2 / spec.coupling)
        u = first @ _segment("h2", -spec.angle / 2, spec)
        return GateRealization(u, ONE_QUBIT_ENCODING, ideal_rx(spec.angle), spec)
    u = _segment("h3", 0.0, spec)
    return GateRealization(u, TWO_QUBIT_ENCODING, CNOT.copy(), spec)


def induced_channel(g: GateRealization, leakage: str = "trace") -> Channel:
    """Channel on the work qubits.

    ``"trace"``: prepare the ancilla in |1><1|, evolve, trace the ancilla out.
    ``"project"``: conjugate by the logical block of the register unitary
    (amplitude that leaks out is simply lost).
    """
    d = 2**g.encoding.n_logical
    if leakage == "project":
        block = g.logical_block()
        return Channel.from_unitary(block)
    if leakage != "trace":
        raise ValueError(f"leakage mode must be 'trace' or 'project', got {leakage!r}")
    u = g.register_unitary
    anc = np.diag([0.0, 1.0]).astype(complex)
    keep = g.encoding.work_qubits

    def evolve(rho):
        return partial_trace(u @ tensor(anc, rho) @ u.conj().T, keep)

    return Channel.from_function(evolve, d)
