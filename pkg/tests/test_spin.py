import math

import numpy as np
import pytest

from qtomo import groups, numerics, spin

SIGMA = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)


def random_state(rng, two_j):
    dim = two_j + 1
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = raw @ raw.conj().T
    return spin.SpinDensityMatrix(two_j, m / np.trace(m).real)


def random_hermitian(rng, dim):
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (raw + raw.conj().T) / 2.0


def random_axis(rng):
    axis = rng.normal(size=3)
    return axis / np.linalg.norm(axis)


class TestSpinMatrices:
    def test_spin_half_pauli_relation(self):
        jx, jy, jz = spin.spin_matrices(1)
        np.testing.assert_allclose(jx, SIGMA[0] / 2.0, atol=1e-15)
        # ascending-m ordering flips the y and z frame axes relative to the
        # literal Pauli matrices; spectra and algebra are unchanged
        np.testing.assert_allclose(np.linalg.eigvalsh(jy), [-0.5, 0.5], atol=1e-15)
        np.testing.assert_allclose(np.linalg.eigvalsh(jz), [-0.5, 0.5], atol=1e-15)
        np.testing.assert_allclose(np.abs(jy), np.abs(SIGMA[1]) / 2.0, atol=1e-15)

    def test_spin_one_jz_diagonal(self):
        _, _, jz = spin.spin_matrices(2)
        np.testing.assert_allclose(jz, np.diag([-1.0, 0.0, 1.0]), atol=1e-15)

    @pytest.mark.parametrize("two_j", [1, 2, 3, 5])
    def test_commutation_relations(self, two_j):
        jx, jy, jz = spin.spin_matrices(two_j)
        for a, b, c in ((jx, jy, jz), (jy, jz, jx), (jz, jx, jy)):
            comm = a @ b - b @ a
            assert np.max(np.abs(comm - 1j * c)) <= 1e-12

    @pytest.mark.parametrize("two_j", [1, 2, 4])
    def test_casimir(self, two_j):
        jx, jy, jz = spin.spin_matrices(two_j)
        j = two_j / 2.0
        total = jx @ jx + jy @ jy + jz @ jz
        assert np.max(np.abs(total - j * (j + 1) * np.eye(two_j + 1))) <= 1e-12

    @pytest.mark.parametrize("two_j", [1, 2, 3, 7])
    def test_jz_spectrum(self, two_j):
        _, _, jz = spin.spin_matrices(two_j)
        j = two_j / 2.0
        np.testing.assert_allclose(
            np.linalg.eigvalsh(jz), np.arange(-j, j + 0.5), atol=1e-12
        )


class TestAxisOperator:
    def test_z_axis_is_jz(self):
        for two_j in (1, 2):
            _, _, jz = spin.spin_matrices(two_j)
            np.testing.assert_allclose(
                spin.axis_operator(two_j, (0.0, 0.0, 1.0)), jz, atol=1e-15
            )

    def test_x_axis_spin_half(self):
        np.testing.assert_allclose(
            spin.axis_operator(1, (1.0, 0.0, 0.0)), SIGMA[0] / 2.0, atol=1e-15
        )

    def test_random_axis_spectrum(self):
        rng = np.random.default_rng(17)
        for _ in range(5):
            jn = spin.axis_operator(3, random_axis(rng))
            np.testing.assert_allclose(
                np.linalg.eigvalsh(jn), [-1.5, -0.5, 0.5, 1.5], atol=1e-10
            )

    def test_rejects_non_unit_axis(self):
        with pytest.raises(ValueError, match="unit"):
            spin.axis_operator(1, (1.0, 1.0, 0.0))


class TestDensityMatrix:
    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            spin.SpinDensityMatrix(1, np.eye(2, dtype=complex))

    def test_rejects_non_hermitian(self):
        m = np.array([[0.5, 0.5], [0.0, 0.5]], dtype=complex)
        with pytest.raises(numerics.NonHermitianError):
            spin.SpinDensityMatrix(1, m)

    def test_rejects_negative_state(self):
        m = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(ValueError, match="positive"):
            spin.SpinDensityMatrix(1, m)


class TestProbabilities:
    def test_aligned_state_z_axis(self):
        m = np.zeros((3, 3), dtype=complex)
        m[2, 2] = 1.0  # |j, j> in ascending-m order
        rho = spin.SpinDensityMatrix(2, m)
        np.testing.assert_allclose(
            spin.spin_probabilities(rho, (0.0, 0.0, 1.0)), [0.0, 0.0, 1.0], atol=1e-12
        )

    def test_maximally_mixed_uniform(self):
        rng = np.random.default_rng(23)
        for two_j in (1, 2, 3):
            rho = spin.maximally_mixed(two_j)
            p = spin.spin_probabilities(rho, random_axis(rng))
            np.testing.assert_allclose(p, np.full(two_j + 1, 1.0 / (two_j + 1)), atol=1e-12)

    def test_tilted_axis_overlap_law(self):
        # p(+1/2) = cos^2(theta/2) for the spin-up state and a tilted axis
        m = np.zeros((2, 2), dtype=complex)
        m[1, 1] = 1.0  # m = +1/2
        rho = spin.SpinDensityMatrix(1, m)
        for theta in (0.0, 0.4, 1.3, 2.8, math.pi):
            axis = (math.sin(theta), 0.0, math.cos(theta))
            p = spin.spin_probabilities(rho, axis)
            assert p[1] == pytest.approx(math.cos(theta / 2.0) ** 2, abs=1e-12)

    def test_invariant_under_eigenvector_phases(self):
        rng = np.random.default_rng(29)
        rho = random_state(rng, 2)
        axis = random_axis(rng)
        p = spin.spin_probabilities(rho, axis)
        jn = spin.axis_operator(2, axis)
        _, vectors = np.linalg.eigh(jn)
        phases = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=3))
        twisted = vectors * phases
        p_twisted = np.einsum("nk,nm,mk->k", twisted.conj(), rho.matrix, twisted).real
        np.testing.assert_allclose(p, p_twisted, atol=1e-12)

    def test_probabilities_sum_to_one(self):
        rng = np.random.default_rng(31)
        for two_j in (1, 3):
            rho = random_state(rng, two_j)
            p = spin.spin_probabilities(rho, random_axis(rng))
            assert p.sum() == pytest.approx(1.0, abs=1e-10)
            assert np.all(p >= 0.0)


class TestSampling:
    def test_maximally_mixed_frequencies(self):
        rho = spin.maximally_mixed(1)
        records = spin.sample_spin(rho, 100_000, seed=101)
        up = sum(1 for r in records if r.two_m == 1)
        assert up / len(records) == pytest.approx(0.5, abs=0.01)

    def test_axis_mean_is_isotropic(self):
        rho = spin.maximally_mixed(1)
        records = spin.sample_spin(rho, 100_000, seed=5)
        mean = np.mean([r.axis for r in records], axis=0)
        assert np.max(np.abs(mean)) <= 0.01

    def test_outcome_labels_are_valid(self):
        rng = np.random.default_rng(2)
        rho = random_state(rng, 3)
        for r in spin.sample_spin(rho, 500, seed=9):
            assert abs(r.two_m) <= 3
            assert (r.two_m - 3) % 2 == 0

    def test_fixed_seed_reproduces_stream(self):
        rho = spin.maximally_mixed(2)
        a = spin.sample_spin(rho, 300, seed=7)
        b = spin.sample_spin(rho, 300, seed=7)
        assert a == b

    def test_prefix_purity(self):
        rng = np.random.default_rng(13)
        rho = random_state(rng, 1)
        long = spin.sample_spin(rho, 9000, seed=3)
        short = spin.sample_spin(rho, 50, seed=3)
        assert long[:50] == short

    def test_rejects_zero_count(self):
        with pytest.raises(ValueError):
            spin.sample_spin(spin.maximally_mixed(1), 0, seed=1)


class TestKernels:
    def test_identity_spin_half_edge(self):
        eye = np.eye(2, dtype=complex)
        axis = (0.0, 0.0, 1.0)
        assert spin.kernel_spin_closed(eye, axis, 1) == pytest.approx(1.0, abs=1e-12)
        assert spin.kernel_spin_numeric(eye, axis, 1) == pytest.approx(1.0, abs=1e-9)

    def test_identity_spin_one_interior(self):
        eye = np.eye(3, dtype=complex)
        axis = (0.0, 0.0, 1.0)
        assert spin.kernel_spin_closed(eye, axis, 0) == pytest.approx(0.0, abs=1e-12)
        assert spin.kernel_spin_numeric(eye, axis, 0) == pytest.approx(0.0, abs=1e-9)

    def test_jz_spin_half(self):
        _, _, jz = spin.spin_matrices(1)
        assert spin.kernel_spin_closed(jz, (0.0, 0.0, 1.0), 1) == pytest.approx(
            1.5, abs=1e-12
        )

    def test_jz_estimator_projects_axis(self):
        # sigma(J_z)(n, m) = 3 m n_z for spin 1/2
        _, _, jz = spin.spin_matrices(1)
        rng = np.random.default_rng(37)
        for _ in range(5):
            axis = random_axis(rng)
            for two_lambda in (-1, 1):
                got = spin.kernel_spin_closed(jz, axis, two_lambda)
                assert got == pytest.approx(1.5 * two_lambda * axis[2], abs=1e-12)

    def test_vanishing_diagonal_pattern(self):
        jx, _, _ = spin.spin_matrices(2)
        for two_lambda in (-2, 0, 2):
            assert spin.kernel_spin_closed(jx, (0.0, 0.0, 1.0), two_lambda) == pytest.approx(
                0.0, abs=1e-12
            )

    @pytest.mark.parametrize("two_j", [1, 2, 3])
    def test_closed_matches_numeric(self, two_j):
        rng = np.random.default_rng(40 + two_j)
        a_matrix = random_hermitian(rng, two_j + 1)
        for _ in range(5):
            axis = random_axis(rng)
            for two_lambda in range(-two_j, two_j + 1, 2):
                closed = spin.kernel_spin_closed(a_matrix, axis, two_lambda)
                numeric = spin.kernel_spin_numeric(a_matrix, axis, two_lambda)
                assert abs(closed - numeric) <= 1e-9

    def test_general_kernel_hermitian_decomposition(self):
        rng = np.random.default_rng(51)
        h1 = random_hermitian(rng, 3)
        h2 = random_hermitian(rng, 3)
        a_matrix = h1 + 1j * h2
        axis = random_axis(rng)
        for two_lambda in (-2, 0, 2):
            got = spin.kernel_spin_closed_general(a_matrix, axis, two_lambda)
            want = spin.kernel_spin_closed(h1, axis, two_lambda) + 1j * spin.kernel_spin_closed(
                h2, axis, two_lambda
            )
            assert got == pytest.approx(want, abs=1e-12)

    def test_rejects_bad_lambda(self):
        eye = np.eye(2, dtype=complex)
        with pytest.raises(ValueError):
            spin.kernel_spin_closed(eye, (0.0, 0.0, 1.0), 2)
        with pytest.raises(ValueError):
            spin.kernel_spin_closed(eye, (0.0, 0.0, 1.0), 0)

    def test_prefactor_consistency_with_chart_measure(self):
        # d * C_m * radial weight reproduces the kernel integrand prefactor
        for two_j in (1, 2, 3):
            spec = groups.QuorumSpec.su2(two_j)
            for t in np.linspace(1e-3, 2.0 * math.pi - 1e-3, 100):
                chart = spec.formal_degree * spec.sphere_volume * groups.radial_weight(spec, t)
                kernel = (two_j + 1) / math.pi * math.sin(t / 2.0) ** 2
                assert chart == pytest.approx(kernel, rel=1e-12)


class TestExactReconstruction:
    def test_maximally_mixed_identity(self):
        rho = spin.maximally_mixed(2)
        assert spin.exact_reconstruction(rho, np.eye(3, dtype=complex)) == pytest.approx(
            1.0, abs=1e-10
        )

    def test_jz_spin_one(self):
        rng = np.random.default_rng(61)
        rho = random_state(rng, 2)
        _, _, jz = spin.spin_matrices(2)
        want = float(np.trace(jz @ rho.matrix).real)
        assert spin.exact_reconstruction(rho, jz) == pytest.approx(want, abs=1e-8)

    @pytest.mark.parametrize("two_j", [1, 2, 3])
    def test_random_pairs(self, two_j):
        rng = np.random.default_rng(70 + two_j)
        for _ in range(4):
            rho = random_state(rng, two_j)
            a_matrix = random_hermitian(rng, two_j + 1)
            want = float(np.trace(a_matrix @ rho.matrix).real)
            got = spin.exact_reconstruction(rho, a_matrix, sphere_order=16)
            assert abs(got - want) <= 1e-8

    def test_rejects_low_order(self):
        with pytest.raises(ValueError):
            spin.exact_reconstruction(spin.maximally_mixed(1), np.eye(2, dtype=complex), 4)


class TestBatchKernel:
    def test_matches_scalar_kernel(self):
        rng = np.random.default_rng(83)
        rho = random_state(rng, 2)
        _, _, jz = spin.spin_matrices(2)
        records = spin.sample_spin(rho, 64, seed=12)
        kernel = spin.spin_operator_kernel(jz)
        batch = kernel.evaluate(records)
        for r, value in zip(records, batch):
            scalar = spin.kernel_spin_closed(jz, r.axis, r.two_m)
            assert value == pytest.approx(scalar, abs=1e-12)
            assert value.imag == 0.0

    def test_rejects_foreign_records(self):
        from qtomo.homodyne import HomodyneRecord

        kernel = spin.spin_operator_kernel(np.eye(2, dtype=complex))
        with pytest.raises(TypeError, match="SpinRecord"):
            kernel.evaluate([HomodyneRecord(phi=0.0, y=0.0)])


class TestRecordIO:
    def test_jsonl_roundtrip_bitwise(self, tmp_path):
        rng = np.random.default_rng(91)
        rho = random_state(rng, 3)
        records = spin.sample_spin(rho, 200, seed=44)
        path = tmp_path / "records.jsonl"
        spin.write_spin_records(records, path)
        again = spin.read_spin_records(path)
        assert records == again
        spin.write_spin_records(again, tmp_path / "records2.jsonl")
        assert (tmp_path / "records.jsonl").read_bytes() == (
            tmp_path / "records2.jsonl"
        ).read_bytes()

    def test_state_roundtrip(self, tmp_path):
        rng = np.random.default_rng(93)
        rho = random_state(rng, 2)
        path = tmp_path / "state.json"
        spin.save_spin_state(rho, path)
        again = spin.load_spin_state(path)
        assert again.two_j == rho.two_j
        np.testing.assert_array_equal(again.matrix, rho.matrix)
