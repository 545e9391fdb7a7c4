import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import evolve, h1_by_action, h2_by_action, h3_by_action, pauli_by_action

from nhqc.gates import build_h1, build_h2, build_h3, exact_u1
from nhqc.pauli import OperatorSum, opsum_to_dense, pauli_to_dense
from nhqc.propagator import (
    TAU1,
    TAU2,
    TAU3,
    FactorSequence,
    TrotterSchedule,
    build_t1_sequence,
    build_t2_sequence,
    build_t3_sequence,
    exact_evolution,
    expm_hermitian,
    product_error,
    trotter_product,
    unitarity_error,
)


def _random_hermitian(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (a + a.conj().T) / 2


class TestExpm:
    def test_zero_time(self):
        h = _random_hermitian(np.random.default_rng(0), 4)
        np.testing.assert_allclose(expm_hermitian(h, 0.0), np.eye(4), atol=1e-14)

    def test_diagonal(self):
        theta = 0.83
        u = expm_hermitian(pauli_to_dense("Z"), theta / 2)
        np.testing.assert_allclose(u, np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]), atol=1e-15)

    @pytest.mark.parametrize("phi1", [0.0, np.pi / 3, -np.pi / 4])
    def test_h1_gives_literal(self, phi1):
        u = expm_hermitian(opsum_to_dense(build_h1(phi1)), np.pi / np.sqrt(2))
        assert np.max(np.abs(u - exact_u1(phi1))) < 1e-9

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            expm_hermitian(np.array([[0, 1], [0, 0]]), 1.0)

    @given(st.integers(0, 2**32 - 1), st.floats(-5, 5))
    @settings(max_examples=30)
    def test_matches_pade_oracle(self, seed, t):
        h = _random_hermitian(np.random.default_rng(seed), 8)
        u = expm_hermitian(h, t)
        np.testing.assert_allclose(u, evolve(h, t), atol=1e-9)
        assert unitarity_error(u) < 1e-9

    @given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
    @settings(max_examples=30)
    def test_group_law(self, seed, t1, t2):
        h = OperatorSum.from_terms(
            [(c, w) for c, w in zip(np.random.default_rng(seed).standard_normal(4), ["XX", "YZ", "ZI", "IY"])]
        )
        np.testing.assert_allclose(
            exact_evolution(h, t1 + t2), exact_evolution(h, t1) @ exact_evolution(h, t2), atol=1e-10
        )

    @given(st.integers(0, 2**32 - 1), st.floats(0.1, 3))
    @settings(max_examples=20)
    def test_spectrum(self, seed, t):
        h = _random_hermitian(np.random.default_rng(seed), 4)
        lam = np.linalg.eigvalsh(h)
        ev_u = np.linalg.eigvals(expm_hermitian(h, t))
        expected = np.exp(-1j * lam * t)
        # match each eigenvalue of U to one of the expected phases
        for z in ev_u:
            assert np.min(np.abs(expected - z)) < 1e-9


class TestExactEvolution:
    @pytest.mark.parametrize("phi2", [0.0, np.pi / 2, 0.7])
    def test_h2(self, phi2):
        from nhqc.gates import exact_u2

        assert np.max(np.abs(exact_evolution(build_h2(phi2), np.pi) - exact_u2(phi2))) < 1e-9

    def test_h3(self):
        from nhqc.gates import exact_u3

        assert np.max(np.abs(exact_evolution(build_h3(), TAU3) - exact_u3())) < 1e-9

    def test_zero_sum(self):
        np.testing.assert_allclose(exact_evolution(OperatorSum(2), 1.7), np.eye(4))


class TestSchedule:
    def test_dt(self):
        s = TrotterSchedule(TAU1, 3)
        assert abs(s.dt * s.steps - TAU1) <= 1e-15 * TAU1

    @pytest.mark.parametrize("n", [0, -1, 1.5])
    def test_invalid(self, n):
        with pytest.raises(ValueError):
            TrotterSchedule(1.0, n)


def _words(seq: FactorSequence):
    return [tuple(s.word for _, s in g.terms) for g, _ in seq.factors]


class TestSequences:
    def test_t1_structure(self):
        seq = build_t1_sequence(0.4)
        assert len(seq) == 7
        words = _words(seq)
        assert words == words[::-1]
        assert [scale for _, scale in seq.factors] == [-0.5, -0.5, 0.5, 1.0, 0.5, -0.5, -0.5]

    def test_t1_phi0_reduces(self):
        dt = 0.31
        u = build_t1_sequence(0.0).step(dt)
        xl = 0.5 * (pauli_by_action("XI") - pauli_by_action("XZ"))
        ff = 0.5 * (pauli_by_action("XX") + pauli_by_action("YY"))
        expected = evolve(xl, -dt / 2) @ evolve(ff, dt) @ evolve(xl, -dt / 2)
        np.testing.assert_allclose(u, expected, atol=1e-12)
        ids = [np.allclose(f, np.eye(4)) for f in build_t1_sequence(0.0).factor_unitaries(dt)]
        assert sum(ids) == 4

    def test_t1_three_steps(self):
        u = trotter_product(build_t1_sequence(0.0), TrotterSchedule(TAU1, 3))
        assert np.linalg.norm(u - evolve(h1_by_action(0.0), TAU1), 2) < 0.1

    def test_t2_structure(self):
        seq = build_t2_sequence(0.9)
        assert len(seq) == 3
        assert _words(seq)[0] == _words(seq)[2]
        assert seq.factors[0][1] == seq.factors[2][1] == -0.5

    def test_t2_phi0_single_step(self):
        dt = 0.77
        u = build_t2_sequence(0.0).step(dt)
        expected = evolve(0.5 * (pauli_by_action("XI") - pauli_by_action("XZ")), -dt)
        np.testing.assert_allclose(u, expected, atol=1e-12)

    def test_t2_two_steps(self):
        u = trotter_product(build_t2_sequence(-np.pi / 4), TrotterSchedule(TAU2, 2))
        dist = np.linalg.norm(u - evolve(h2_by_action(-np.pi / 4), TAU2))
        # recorded value 0.138731365757...
        assert dist == pytest.approx(0.13873136575762057, abs=1e-9)
        assert dist < 0.5

    def test_t3_structure(self):
        seq = build_t3_sequence()
        assert len(seq) == 4
        np.testing.assert_array_equal(opsum_to_dense(seq.factors[0][0]), opsum_to_dense(seq.factors[3][0]))
        for f in seq.factor_unitaries(0.4):
            assert unitarity_error(f) < 1e-10

    def test_t3_generators_match_products(self):
        # X1 (I-Z2)(I-Z3), X1 (I-Z2) X3, Y1 (I-Z2) Y3 built by matrix products
        i2, z = np.eye(2), pauli_by_action("Z")
        x, y = pauli_by_action("X"), pauli_by_action("Y")
        kr = lambda *m: np.kron(np.kron(m[0], m[1]), m[2])  # noqa: E731
        refs = [kr(x, i2 - z, i2 - z), kr(x, i2 - z, x), kr(y, i2 - z, y)]
        seq = build_t3_sequence(1.0)
        for (g, _), ref in zip(seq.factors[:3], refs):
            np.testing.assert_allclose(opsum_to_dense(g), ref / 4, atol=1e-15)

    def test_t3_two_steps(self):
        u = trotter_product(build_t3_sequence(), TrotterSchedule(TAU3, 2))
        assert np.linalg.norm(u - evolve(h3_by_action(), TAU3), 2) < 0.3

    def test_single_step_product(self):
        seq = build_t1_sequence(0.2)
        np.testing.assert_allclose(trotter_product(seq, TrotterSchedule(0.5, 1)), seq.step(0.5))

    @pytest.mark.parametrize("n", [1, 2, 5, 13])
    def test_t2_phi0_exact_for_any_n(self, n):
        u = trotter_product(build_t2_sequence(0.0), TrotterSchedule(TAU2, n))
        np.testing.assert_allclose(u, exact_evolution(build_h2(0.0), TAU2), atol=1e-9)

    @pytest.mark.parametrize(
        "seq,h,tau",
        [
            (build_t1_sequence(-np.pi / 4), h1_by_action(-np.pi / 4), TAU1),
            (build_t2_sequence(-np.pi / 4), h2_by_action(-np.pi / 4), TAU2),
            (build_t3_sequence(), h3_by_action(), TAU3),
        ],
        ids=["T1", "T2", "T3"],
    )
    def test_second_order(self, seq, h, tau):
        exact = evolve(h, tau)
        errs = {n: product_error(trotter_product(seq, TrotterSchedule(tau, n)), exact) for n in (8, 16, 32, 64)}
        scaled = [e * n * n for n, e in errs.items()]
        assert max(scaled) / min(scaled) < 1.1
        for n in (8, 16, 32):
            assert 3.0 <= errs[n] / errs[2 * n] <= 5.0


class TestProductError:
    def test_same(self):
        u = expm_hermitian(_random_hermitian(np.random.default_rng(3), 4), 1.0)
        assert product_error(u, u) < 1e-14

    def test_global_phase(self):
        u = expm_hermitian(_random_hermitian(np.random.default_rng(4), 4), 1.0)
        assert product_error(u, np.exp(1j * np.pi / 7) * u) < 1e-13

    def test_no_alignment_possible(self):
        assert product_error(np.eye(2), pauli_to_dense("X")) == pytest.approx(2.0)

    def test_strict_mode(self):
        u = np.eye(2)
        assert product_error(u, -u, align_phase=False) == pytest.approx(2 * np.sqrt(2))

    def test_mismatch(self):
        with pytest.raises(ValueError):
            product_error(np.eye(2), np.eye(4))
