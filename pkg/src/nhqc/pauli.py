"""Pauli strings, real-weighted Pauli sums and small dense-operator helpers.

Ordering convention used throughout the package: qubit 1 is the leftmost
Kronecker factor, i.e. the most significant bit of a computational-basis
index.  ``"XI"`` therefore flips |00> <-> |10>.

Dense operators are plain ``numpy`` complex arrays of shape ``(2**n, 2**n)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

__all__ = [
    "PAULI_MATRICES",
    "PauliString",
    "OperatorSum",
    "PauliParseError",
    "parse_pauli",
    "pauli_to_dense",
    "opsum_to_dense",
    "tensor",
    "partial_trace",
    "hs_inner",
    "n_qubits_of",
    "is_hermitian",
]

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_PHASES = (1, -1, 1j, -1j)
_PHASE_TEXT = {1: "", -1: "-", 1j: "i", -1j: "-i"}

# single-letter product table: (a, b) -> (phase, c) with a.b = phase * c
_MUL = {}
for _a in "IXYZ":
    _MUL[("I", _a)] = (1, _a)
    _MUL[(_a, "I")] = (1, _a)
    _MUL[(_a, _a)] = (1, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _MUL[(_a, _b)] = (1j, _c)
    _MUL[(_b, _a)] = (-1j, _c)


class PauliParseError(ValueError):
    """Malformed Pauli text; ``position`` is 1-based."""

    def __init__(self, text: str, position: int, reason: str):
        self.text = text
        self.position = position
        super().__init__(f"cannot parse Pauli string {text!r} at position {position}: {reason}")


@dataclass(frozen=True)
class PauliString:
    """A word over {I, X, Y, Z} times a fourth root of unity."""

    word: str
    phase: complex = 1

    def __post_init__(self):
        if not self.word:
            raise ValueError("Pauli word must contain at least one letter")
        bad = [c for c in self.word if c not in PAULI_MATRICES]
        if bad:
            raise ValueError(f"illegal Pauli letter {bad[0]!r} in {self.word!r}")
        phase = complex(self.phase)
        for p in _PHASES:
            if phase == p:
                object.__setattr__(self, "phase", p)
                break
        else:
            raise ValueError(f"phase must be one of +1, -1, +i, -i; got {self.phase!r}")

    @property
    def n_qubits(self) -> int:
        return len(self.word)

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (1, -1)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if not isinstance(other, PauliString):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        phase = self.phase * other.phase
        letters = []
        for a, b in zip(self.word, other.word):
            p, c = _MUL[(a, b)]
            phase *= p
            letters.append(c)
        return PauliString("".join(letters), phase)

    def __str__(self) -> str:
        return _PHASE_TEXT[self.phase] + self.word

    def to_dense(self) -> np.ndarray:
        return pauli_to_dense(self)


_PAULI_RE = re.compile(r"([+-]?)(i?)(.*)\Z", re.S)


def parse_pauli(text: str) -> PauliString:
    """Parse ``[+|-][i]?[IXYZ]+``, e.g. ``"XY"``, ``"-iZI"``, ``"+iX"``."""
    m = _PAULI_RE.match(text)
    sign, imag, body = m.groups()
    start = len(sign) + len(imag)
    if not body:
        raise PauliParseError(text, start + 1, "expected at least one of I, X, Y, Z")
    for offset, c in enumerate(body):
        if c not in PAULI_MATRICES:
            raise PauliParseError(text, start + offset + 1, f"illegal character {c!r}")
    phase = (-1 if sign == "-" else 1) * (1j if imag else 1)
    return PauliString(body, phase)


def pauli_to_dense(p: PauliString | str) -> np.ndarray:
    if isinstance(p, str):
        p = parse_pauli(p)
    mat = reduce(np.kron, (PAULI_MATRICES[c] for c in p.word))
    return p.phase * mat


@dataclass(frozen=True)
class OperatorSum:
    """Real linear combination of phase-free Pauli strings.

    Phased input strings are folded into the coefficient on construction, so
    only ``+1``/``-1`` phases are accepted (anything else would break
    Hermiticity).
    """

    n_qubits: int
    terms: tuple = field(default=())

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        normalized = []
        for coeff, string in self.terms:
            if isinstance(string, str):
                string = parse_pauli(string)
            if string.n_qubits != self.n_qubits:
                raise ValueError(
                    f"term {string} acts on {string.n_qubits} qubits, expected {self.n_qubits}"
                )
            if not string.is_hermitian:
                raise ValueError(f"term {string} has imaginary phase; OperatorSum must be Hermitian")
            coeff = float(coeff)
            if not np.isfinite(coeff):
                raise ValueError("coefficients must be finite")
            normalized.append((coeff * string.phase.real, PauliString(string.word)))
        object.__setattr__(self, "terms", tuple(normalized))

    @classmethod
    def from_terms(cls, terms) -> "OperatorSum":
        """Build from ``[(coeff, "XZ"), ...]``; qubit count taken from the first term."""
        terms = [(c, parse_pauli(s) if isinstance(s, str) else s) for c, s in terms]
        if not terms:
            raise ValueError("cannot infer qubit count from an empty term list")
        return cls(terms[0][1].n_qubits, tuple(terms))

    def __add__(self, other: "OperatorSum") -> "OperatorSum":
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit count mismatch")
        return OperatorSum(self.n_qubits, self.terms + other.terms)

    def __mul__(self, scalar: float) -> "OperatorSum":
        return OperatorSum(self.n_qubits, tuple((c * scalar, s) for c, s in self.terms))

    __rmul__ = __mul__

    def simplify(self, atol: float = 0.0) -> "OperatorSum":
        """Merge repeated words and drop coefficients with ``|c| <= atol``."""
        merged: dict[str, float] = {}
        for c, s in self.terms:
            merged[s.word] = merged.get(s.word, 0.0) + c
        return OperatorSum(
            self.n_qubits, tuple((c, PauliString(w)) for w, c in merged.items() if abs(c) > atol)
        )

    def to_dense(self) -> np.ndarray:
        return opsum_to_dense(self)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " ".join(f"{c:+g}*{s.word}" for c, s in self.terms)


def opsum_to_dense(h: OperatorSum) -> np.ndarray:
    dim = 2**h.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for coeff, string in h.terms:
        out += coeff * pauli_to_dense(string)
    return out


def n_qubits_of(m: np.ndarray) -> int:
    """Qubit count of a square ``2**n`` operator; raises ``ValueError`` otherwise."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0].bit_length() - 1
    if n < 0 or 2**n != m.shape[0]:
        raise ValueError(f"dimension {m.shape[0]} is not a power of two")
    return n


def is_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) < tol)


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product, first argument as the most significant factor."""
    if not ops:
        raise ValueError("tensor() needs at least one operand")
    for op in ops:
        n_qubits_of(op)
    return reduce(np.kron, (np.asarray(op, dtype=complex) for op in ops))


def partial_trace(m: np.ndarray, keep) -> np.ndarray:
    """Trace out every qubit not listed in ``keep`` (1-based qubit indices).

    The kept qubits stay in ascending order.
    """
    n = n_qubits_of(m)
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep must name at least one qubit")
    if keep[0] < 1 or keep[-1] > n:
        raise ValueError(f"qubit indices must lie in 1..{n}, got {keep}")
    traced = [q for q in range(1, n + 1) if q not in keep]
    t = np.asarray(m, dtype=complex).reshape((2,) * (2 * n))
    # axes 0..n-1 are row qubits, n..2n-1 column qubits; trace highest index first
    for q in sorted(traced, reverse=True):
        n_left = t.ndim // 2
        t = np.trace(t, axis1=q - 1, axis2=q - 1 + n_left)
    d = 2 ** len(keep)
    return t.reshape(d, d)


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product Tr(a^dagger b)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))
