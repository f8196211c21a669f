import numpy as np
import pytest

from helpers import random_density
from qrp.diagnostics import (
    OtocSpec,
    TmiSpec,
    correlation_curve,
    dynamical_correlation,
    heisenberg,
    otoc,
    otoc_curve,
    tmi,
    tmi_curve,
)
from qrp.driver import DriveConfig, StateEnsemble, generate_inputs, run_drive
from qrp.hamiltonian import IsingParams, propagator, spectral_model
from qrp.pauli import PauliString, build_dense
from qrp.states import input_state, partial_trace


def make_ensemble(rng, model, n_samples=4):
    """Hand-built ensemble of valid post-injection snapshots."""
    half = model.dim // 2
    s_vals = rng.random(n_samples)
    rests = np.array([random_density(rng, half) for _ in range(n_samples)])
    mean = np.zeros((2 * model.dim, 2 * model.dim), dtype=complex)
    for s, rest in zip(s_vals, rests):
        psi = input_state(float(s))
        mean += np.kron(np.outer(psi, psi.conj()), rest) / n_samples
    return StateEnsemble(
        n_qubits=model.n + 1,
        mean_state=mean,
        sample_inputs=s_vals,
        sample_rest=rests,
        n_averaged=n_samples,
        final_state=mean.copy(),
    )


@pytest.fixture(scope="module")
def chaotic3():
    return spectral_model(IsingParams(n=3, h_x=-0.5, h_z=1.05))


class TestHeisenberg:
    def test_zero_time(self, chaotic3):
        op = PauliString.from_terms({2: "x", 3: "z"})
        dense = build_dense(op, 4)
        assert np.max(np.abs(heisenberg(op, chaotic3, 0.0) - dense)) < 1e-12

    def test_conserved_operator_constant(self):
        model = spectral_model(IsingParams(n=1, h_x=0.0, h_z=1.0))
        op = PauliString.from_terms({1: "z"})
        fixed = build_dense(op, 2)
        for tau in (0.3, 1.7):
            assert np.max(np.abs(heisenberg(op, model, tau) - fixed)) < 1e-10

    def test_single_spin_precession(self):
        model = spectral_model(IsingParams(n=1, h_x=0.0, h_z=1.0))
        tau = 0.83
        got = heisenberg(PauliString.from_terms({1: "x"}), model, tau)
        sx = build_dense(PauliString.from_terms({1: "x"}), 2)
        sy = build_dense(PauliString.from_terms({1: "y"}), 2)
        expected = np.cos(2 * tau) * sx - np.sin(2 * tau) * sy
        assert np.max(np.abs(got - expected)) < 1e-10

    def test_spectrum_preserved(self, chaotic3):
        op = PauliString.from_terms({1: "z", 2: "z"})
        before = np.linalg.eigvalsh(build_dense(op, 4))
        after = np.linalg.eigvalsh(heisenberg(op, chaotic3, 1.9))
        np.testing.assert_allclose(before, after, atol=1e-9)

    def test_hermitian(self, chaotic3):
        out = heisenberg(PauliString.from_terms({1: "x"}), chaotic3, 2.4)
        assert np.max(np.abs(out - out.conj().T)) < 1e-10


class TestDynamicalCorrelation:
    def test_equal_time_autocorrelation_is_one(self, chaotic3):
        rng = np.random.default_rng(30)
        ensemble = make_ensemble(rng, chaotic3)
        value = dynamical_correlation(ensemble, 1, chaotic3, 0.0)
        assert abs(value - 1.0) < 1e-10

    def test_matches_per_snapshot_average(self, chaotic3):
        rng = np.random.default_rng(31)
        ensemble = make_ensemble(rng, chaotic3)
        tau = 0.9
        z1 = build_dense(PauliString.from_terms({1: "z"}), 4)
        z2_tau = heisenberg(PauliString.from_terms({2: "z"}), chaotic3, tau)
        oracle = np.mean(
            [
                np.trace(ensemble.sample_state(i) @ z1 @ z2_tau)
                for i in range(ensemble.n_samples)
            ]
        )
        got = dynamical_correlation(ensemble, 2, chaotic3, tau)
        assert abs(got - oracle) < 1e-10

    def test_curve_matches_pointwise(self, chaotic3):
        rng = np.random.default_rng(32)
        ensemble = make_ensemble(rng, chaotic3)
        taus = np.array([0.0, 0.4, 1.1])
        curve = correlation_curve(ensemble, 3, chaotic3, taus)
        for m, tau in enumerate(taus):
            point = dynamical_correlation(ensemble, 3, chaotic3, float(tau))
            assert abs(curve[m] - point) < 1e-12

    def test_bounded_modulus(self, chaotic3):
        rng = np.random.default_rng(33)
        ensemble = make_ensemble(rng, chaotic3)
        curve = correlation_curve(ensemble, 2, chaotic3, np.linspace(0, 2, 9))
        assert np.max(np.abs(curve)) <= 1.0 + 1e-9


class TestOtoc:
    def test_commuting_pair_at_zero_time(self, chaotic3):
        rng = np.random.default_rng(34)
        ensemble = make_ensemble(rng, chaotic3)
        value = otoc(ensemble, OtocSpec.of("z2", "z1"), chaotic3, 0.0)
        assert abs(value - 1.0) < 1e-12

    def test_identity_v_gives_one(self, chaotic3):
        rng = np.random.default_rng(35)
        ensemble = make_ensemble(rng, chaotic3)
        spec = OtocSpec(w=PauliString.from_terms({2: "z"}), v=PauliString())
        for tau in (0.0, 0.8, 2.3):
            assert abs(otoc(ensemble, spec, chaotic3, tau) - 1.0) < 1e-10

    def test_matches_brute_force_trace(self, chaotic3):
        rng = np.random.default_rng(36)
        ensemble = make_ensemble(rng, chaotic3)
        tau = 1.2
        spec = OtocSpec.of("z2", "z1")
        u = propagator(chaotic3, tau)
        w_tau = u.conj().T @ build_dense(spec.w, 4) @ u
        v = build_dense(spec.v, 4)
        oracle = np.trace(ensemble.mean_state @ w_tau @ v @ w_tau @ v)
        assert abs(otoc(ensemble, spec, chaotic3, tau) - oracle.real) < 1e-10

    def test_curve_shape_and_residue(self, chaotic3):
        rng = np.random.default_rng(37)
        ensemble = make_ensemble(rng, chaotic3)
        values, residue = otoc_curve(
            ensemble, OtocSpec.of("z2", "z1"), chaotic3, np.linspace(0, 1, 5)
        )
        assert values.shape == (5,)
        assert residue < 1e-8


class TestTmi:
    def test_product_state_zero(self):
        rng = np.random.default_rng(38)
        parts = [random_density(rng, 2) for _ in range(4)]
        rho = parts[0]
        for p in parts[1:]:
            rho = np.kron(rho, p)
        spec = TmiSpec(a=(0,), b=(2,), c=(3,))
        assert abs(tmi(rho, spec)) < 1e-8

    def test_ghz_triple_zero(self):
        # GHZ on qubits (0, 2, 3), qubit 1 in a product state: all single and
        # pair entropies are 1 bit, the triple is pure.
        psi = np.zeros(16, dtype=complex)
        psi[0b0000] = 1 / np.sqrt(2)
        psi[0b1011] = 1 / np.sqrt(2)
        rho = np.outer(psi, psi.conj())
        assert abs(tmi(rho, TmiSpec(a=(0,), b=(2,), c=(3,)))) < 1e-8

    def test_permutation_invariance(self):
        rng = np.random.default_rng(39)
        rho = random_density(rng, 16)
        base = tmi(rho, TmiSpec(a=(0,), b=(1,), c=(3,)))
        for a, b, c in (((1,), (0,), (3,)), ((3,), (1,), (0,))):
            assert abs(tmi(rho, TmiSpec(a=a, b=b, c=c)) - base) < 1e-10

    def test_overlapping_subsets_rejected(self):
        with pytest.raises(ValueError, match="overlap"):
            TmiSpec(a=(0,), b=(0, 2), c=(3,))
        with pytest.raises(ValueError, match="empty"):
            TmiSpec(a=(), b=(1,), c=(2,))

    def test_matches_direct_entropy_sum(self):
        from qrp.states import von_neumann_entropy as s_vn

        rng = np.random.default_rng(40)
        rho = random_density(rng, 16)
        spec = TmiSpec(a=(0,), b=(2,), c=(3,))
        expected = (
            s_vn(partial_trace(rho, (0,)))
            + s_vn(partial_trace(rho, (2,)))
            + s_vn(partial_trace(rho, (3,)))
            - s_vn(partial_trace(rho, (0, 2)))
            - s_vn(partial_trace(rho, (0, 3)))
            - s_vn(partial_trace(rho, (2, 3)))
            + s_vn(partial_trace(rho, (0, 2, 3)))
        )
        assert abs(tmi(rho, spec) - expected) < 1e-10

    def test_curve_averages_snapshots(self, chaotic3):
        rng = np.random.default_rng(41)
        ensemble = make_ensemble(rng, chaotic3, n_samples=3)
        taus = np.array([0.0, 0.7])
        spec = TmiSpec(a=(0,), b=(2,), c=(3,))
        curve = tmi_curve(ensemble, spec, chaotic3, taus)
        for m, tau in enumerate(taus):
            u = propagator(chaotic3, float(tau))
            oracle = np.mean(
                [
                    tmi(u @ ensemble.sample_state(i) @ u.conj().T, spec)
                    for i in range(3)
                ]
            )
            assert abs(curve[m] - oracle) < 1e-12

    def test_curve_requires_snapshots(self, chaotic3):
        ensemble = StateEnsemble(
            n_qubits=4,
            mean_state=np.eye(16) / 16,
            sample_inputs=np.zeros(0),
            sample_rest=np.zeros((0, 4, 4)),
            n_averaged=1,
            final_state=np.eye(16) / 16,
        )
        with pytest.raises(ValueError, match="snapshot"):
            tmi_curve(ensemble, TmiSpec(a=(0,), b=(2,), c=(3,)), chaotic3, [0.0])


class TestEndToEndDiagnostics:
    def test_drive_feeds_diagnostics(self):
        model = spectral_model(IsingParams(n=3, h_x=0.0, h_z=1.0))
        cfg = DriveConfig(
            t_in=1.5, n_grid=3, n_washout=6, n_train=6, n_test=6, seed=44, tmi_cap=4
        )
        inputs = generate_inputs(cfg.seed, cfg.n_total)
        _, ensemble = run_drive(cfg, model, ["z1"], inputs)
        taus = cfg.grid
        values, _ = otoc_curve(ensemble, OtocSpec.of("z2", "z1"), model, taus)
        assert abs(values[0] - 1.0) < 1e-9
        curve = tmi_curve(ensemble, TmiSpec(a=(0,), b=(2,), c=(3,)), model, taus)
        assert abs(curve[0]) < 1e-8  # info still local right after injection
