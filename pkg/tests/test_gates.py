import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import evolve, h1_by_action, h2_by_action, h3_by_action, pauli_by_action, ptrace_by_sum

from nhqc.gates import (
    CNOT,
    ONE_QUBIT_ENCODING,
    TWO_QUBIT_ENCODING,
    Encoding,
    GateSpec,
    build_h1,
    build_h2,
    build_h3,
    exact_u1,
    exact_u2,
    exact_u3,
    ideal_rx,
    ideal_rz,
    induced_channel,
    parse_angle,
    realize_gate,
    u_xz,
    u_zx,
)
from nhqc.pauli import opsum_to_dense, partial_trace, pauli_to_dense
from nhqc.propagator import TAU1, TAU2, TAU3, exact_evolution, product_error


def _terms(h):
    return {s.word: c for c, s in h.simplify(atol=1e-15).terms}


def _phase_aligned_close(a, b, tol):
    return product_error(a, b) < tol


class TestHamiltonians:
    def test_h1_phi0(self):
        assert _terms(build_h1(0.0)) == pytest.approx({"XX": 0.5, "YY": 0.5, "XI": -0.5, "XZ": 0.5})

    def test_h1_phi_pi(self):
        t = _terms(build_h1(np.pi))
        assert t == pytest.approx({"XY": 0.5, "YX": -0.5, "YI": -0.5, "YZ": 0.5})

    @given(st.floats(-np.pi, np.pi), st.floats(0.1, 3))
    def test_h1_matches_hand_expansion(self, phi, j):
        m = opsum_to_dense(build_h1(phi, j))
        np.testing.assert_allclose(m, h1_by_action(phi, j), atol=1e-14)
        # |00> is decoupled from everything
        assert np.max(np.abs(m[0])) < 1e-15
        assert abs(m[0, 1]) < 1e-15 and abs(m[0, 3]) < 1e-15

    def test_h2_limits(self):
        assert _terms(build_h2(0.0, 2.0)) == pytest.approx({"XI": -1.0, "XZ": 1.0})
        assert _terms(build_h2(np.pi)) == pytest.approx({"YX": 0.5, "XY": -0.5})

    @given(st.floats(-np.pi, np.pi))
    def test_h2_hermitian(self, phi):
        m = opsum_to_dense(build_h2(phi))
        assert np.max(np.abs(m - m.conj().T)) < 1e-12
        np.testing.assert_allclose(m, h2_by_action(phi), atol=1e-14)

    def test_h3_terms(self):
        h = build_h3()
        assert len(h.terms) == 8
        np.testing.assert_allclose(opsum_to_dense(h), h3_by_action(), atol=1e-15)

    def test_h3_elements(self):
        m = opsum_to_dense(build_h3())
        assert m[6, 7] == 0  # <110|H3|111>
        nz = {(format(i, "03b"), format(j, "03b")) for i, j in zip(*np.nonzero(np.abs(m) > 1e-12))}
        # only the ancilla-flipping couplings |011> <-> |110>, |111> survive
        assert nz == {("011", "110"), ("011", "111"), ("110", "011"), ("111", "011")}
        for i, j in nz:
            assert i[0] != j[0]

    def test_h3_annihilates_qubit2_zero(self):
        m = opsum_to_dense(build_h3())
        for label in ("000", "001", "100", "101"):
            assert not np.any(m[:, int(label, 2)])


class TestLiterals:
    def test_u1_phi0(self):
        u = exact_u1(0.0)
        np.testing.assert_array_equal(u[:2, :2], np.diag([1, -1]))
        np.testing.assert_array_equal(u[2:, 2:], [[0, 1], [1, 0]])

    def test_u2_half_pi(self):
        np.testing.assert_allclose(exact_u2(np.pi / 2)[2:, 2:], [[0, 1j], [-1j, 0]], atol=1e-16)

    def test_u3(self):
        u = exact_u3()
        assert u[7, 6] == 1 and u[6, 7] == 1 and u[3, 3] == -1

    @pytest.mark.parametrize("seed", range(3))
    def test_exponentiation_matches_literals(self, seed):
        for phi in np.random.default_rng(seed).uniform(-np.pi, np.pi, 20):
            assert np.max(np.abs(evolve(h1_by_action(phi), TAU1) - exact_u1(phi))) < 1e-9
            assert np.max(np.abs(evolve(h2_by_action(phi), TAU2) - exact_u2(phi))) < 1e-9
        assert np.max(np.abs(evolve(h3_by_action(), TAU3) - exact_u3())) < 1e-9


class TestSpecParsing:
    @pytest.mark.parametrize(
        "text,kind,angle,mode,n",
        [
            ("rz:theta=pi/2:mode=trotter:n=3", "rz", np.pi / 2, "trotter", 3),
            ("rx:phi=pi:mode=exact", "rx", np.pi, "exact", None),
            ("cnot:n=2", "cnot", None, "trotter", 2),
            ("rz:theta=-pi/4", "rz", -np.pi / 4, "trotter", 3),
            ("rx:phi=0.7", "rx", 0.7, "trotter", 2),
        ],
    )
    def test_parse(self, text, kind, angle, mode, n):
        spec = GateSpec.parse(text)
        assert spec.kind == kind and spec.mode == mode and spec.n == n
        if angle is None:
            assert spec.angle is None
        else:
            assert spec.angle == pytest.approx(angle, abs=0)

    @pytest.mark.parametrize("text", ["rz:theta=pi/2:mode=trotter:n=3", "rx:phi=pi:mode=exact", "cnot:mode=trotter:n=2"])
    def test_round_trip(self, text):
        spec = GateSpec.parse(text)
        assert GateSpec.parse(str(spec)) == spec

    @pytest.mark.parametrize(
        "text",
        ["foo", "rz", "rz:theta=", "cnot:theta=1", "rz:theta=pi:mode=fast", "rz:theta=pi:n=0",
         "rx:phi=pi:mode=exact:n=2", "rz:theta=__import__", "rz:theta=pi:bogus=1", "rz:theta=1:theta=2"],
    )  # fmt: skip
    def test_invalid(self, text):
        with pytest.raises(ValueError):
            GateSpec.parse(text)

    @pytest.mark.parametrize("text,value", [("pi", np.pi), ("-pi/4", -np.pi / 4), ("3*pi/4", 0.75 * np.pi), ("2", 2.0)])
    def test_angles(self, text, value):
        assert parse_angle(text) == value


class TestEncoding:
    def test_builtin(self):
        assert ONE_QUBIT_ENCODING.n_logical == 1 and TWO_QUBIT_ENCODING.n_logical == 2
        assert all(s[0] == "1" for s in TWO_QUBIT_ENCODING.logical_basis)

    def test_rejects_spectator_register(self):
        with pytest.raises(ValueError):
            Encoding(4, ("100", "101"))

    def test_rejects_wrong_labels(self):
        with pytest.raises(ValueError):
            Encoding(2, ("00", "01"))


class TestRealize:
    @pytest.mark.parametrize("theta", [np.pi / 2, np.pi, 0.3])
    def test_exact_rz(self, theta):
        g = realize_gate(GateSpec("rz", theta, "exact"))
        la = g.logical_action()
        assert _phase_aligned_close(la, ideal_rz(theta), 1e-9)
        np.testing.assert_allclose(u_xz(0) @ u_xz(-theta / 2), ideal_rz(theta), atol=1e-15)
        np.testing.assert_allclose(la, ideal_rz(theta), atol=1e-9)

    @pytest.mark.parametrize("phi", [np.pi / 2, np.pi, -1.1])
    def test_exact_rx(self, phi):
        g = realize_gate(GateSpec("rx", phi, "exact"))
        np.testing.assert_allclose(g.logical_action(), ideal_rx(phi), atol=1e-9)
        np.testing.assert_allclose(u_zx(0) @ u_zx(-phi / 2), ideal_rx(phi), atol=1e-15)

    def test_exact_cnot(self):
        g = realize_gate("cnot:mode=exact")
        np.testing.assert_allclose(g.logical_action(), CNOT, atol=1e-9)

    def test_rx_first_segment_exact_in_trotter_mode(self):
        g = realize_gate("rx:phi=pi/2:mode=trotter:n=2")
        from nhqc.propagator import TrotterSchedule, build_t2_sequence, trotter_product

        second = trotter_product(build_t2_sequence(-np.pi / 4), TrotterSchedule(TAU2, 2))
        first = evolve(-0.5 * (pauli_by_action("XI") - pauli_by_action("XZ")), TAU2)
        np.testing.assert_allclose(g.register_unitary, first @ second, atol=1e-12)

    def test_coupling_rescales_time(self):
        a = realize_gate("rz:theta=pi/2:mode=trotter:n=3")
        b = realize_gate("rz:theta=pi/2:mode=trotter:n=3:j=2.5")
        np.testing.assert_allclose(a.register_unitary, b.register_unitary, atol=1e-12)

    def test_non_commuting(self):
        rz = realize_gate("rz:theta=pi/2:mode=exact").logical_action()
        rx = realize_gate("rx:phi=pi/2:mode=exact").logical_action()
        assert np.linalg.norm(rz @ rx - rx @ rz, 2) > 0.5

    @given(st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi))
    @settings(max_examples=20, deadline=None)
    def test_rz_composition(self, t1, t2):
        a = realize_gate(GateSpec("rz", t1, "exact")).logical_action()
        b = realize_gate(GateSpec("rz", t2, "exact")).logical_action()
        assert product_error(a @ b, ideal_rz(t1 + t2)) < 1e-9

    def test_trotter_leaks(self):
        g = realize_gate("rx:phi=pi:mode=trotter:n=2")
        assert g.leakage > 1e-3
        with pytest.raises(ValueError):
            g.logical_action()


def _gates():
    return [
        realize_gate(s)
        for s in ("rz:theta=pi/2:mode=exact", "rx:phi=pi:mode=exact", "cnot:mode=exact",
                  "rz:theta=pi:mode=trotter:n=3", "rx:phi=pi/2:mode=trotter:n=2", "cnot:n=2")
    ]  # fmt: skip


class TestChannel:
    def test_cnot_truth_table(self):
        ch = induced_channel(realize_gate("cnot:mode=exact"))
        rho = np.zeros((4, 4))
        rho[2, 2] = 1
        out = ch(rho)
        expected = np.zeros((4, 4))
        expected[3, 3] = 1
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_rz_pi_on_x(self):
        ch = induced_channel(realize_gate("rz:theta=pi:mode=exact"))
        np.testing.assert_allclose(ch(pauli_to_dense("X")), -pauli_to_dense("X"), atol=1e-12)

    def test_trotter_rx_on_z(self):
        g = realize_gate("rx:phi=pi:mode=trotter:n=2")
        ch = induced_channel(g)
        z = pauli_to_dense("Z")
        out = ch(z)
        # oracle: explicit ancilla preparation and index-sum partial trace
        u = g.register_unitary
        ref = ptrace_by_sum(u @ np.kron(np.diag([0, 1]), z) @ u.conj().T, 2, [2])
        np.testing.assert_allclose(out, ref, atol=1e-12)
        assert abs(np.trace(out)) < 1e-12
        assert np.abs(np.linalg.eigvalsh(out)).sum() <= 2 + 1e-12
        ideal = ideal_rx(np.pi) @ z @ ideal_rx(np.pi).conj().T
        assert np.linalg.norm(out - ideal) == pytest.approx(0.45566624413866774, abs=1e-9)

    @pytest.mark.parametrize("g", _gates(), ids=lambda g: str(g.spec))
    def test_trace_and_hermiticity_preserving(self, g):
        ch = induced_channel(g)
        assert ch.trace_preservation_error() < 1e-9
        assert ch.hermiticity_preservation_error() < 1e-12

    @pytest.mark.parametrize("g", [g for g in _gates() if g.spec.mode == "exact"], ids=lambda g: str(g.spec))
    def test_exact_channel_is_conjugation(self, g):
        ch = induced_channel(g)
        d = ch.dim
        u = g.ideal_logical
        for k in range(d * d):
            rho = np.zeros(d * d, dtype=complex)
            rho[k] = 1
            rho = rho.reshape(d, d)
            np.testing.assert_allclose(ch(rho), u @ rho @ u.conj().T, atol=1e-9)

    @pytest.mark.parametrize("g", [g for g in _gates() if g.spec.mode == "exact"], ids=lambda g: str(g.spec))
    def test_ancilla_returns(self, g):
        u = g.register_unitary
        d = 2**g.encoding.n_logical
        for k in range(d * d):
            rho = np.zeros(d * d, dtype=complex)
            rho[k] = 1
            full = u @ np.kron(np.diag([0, 1]), rho.reshape(d, d)) @ u.conj().T
            anc = partial_trace(full, {1})
            assert abs(anc[0, 0]) < 1e-9

    def test_project_mode(self):
        g = realize_gate("rx:phi=pi:mode=trotter:n=2")
        ch = induced_channel(g, "project")
        block = g.logical_block()
        rho = pauli_to_dense("Y")
        np.testing.assert_allclose(ch(rho), block @ rho @ block.conj().T)
        with pytest.raises(ValueError):
            induced_channel(g, "bogus")

    def test_exact_modes_agree(self):
        g = realize_gate("rz:theta=pi/2:mode=exact")
        a, b = induced_channel(g, "trace"), induced_channel(g, "project")
        np.testing.assert_allclose(a.superop, b.superop, atol=1e-12)
