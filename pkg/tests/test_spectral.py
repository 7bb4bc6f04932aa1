import numpy as np
import pytest

from gpd.coarsening import build_hierarchy
from gpd.errors import ZeroRowError
from gpd.graphs import (
    SbmModel,
    graph_filter,
    normalize_adjacency,
    sample_sbm,
    spectral_decomposition,
)
from gpd.signals import random_lowpass_coeffs
from gpd.spectral import (
    BoundInputs,
    eigenvector_similarity,
    expected_sq_jacobian_gcg,
    expected_sq_jacobian_gdec,
    fit_error_bound,
    monte_carlo_deep_jacobian,
    monte_carlo_sq_jacobian,
    procrustes_align,
    two_layer_factory,
    width_requirement,
)
from oracles import random_orthonormal


def sbm_filter(n=32, seed=0, order=3, coeff_seed=5):
    graph = sample_sbm(SbmModel.balanced(n, 4, 0.8, 0.05), seed)
    adj = normalize_adjacency(graph)
    return graph, adj, graph_filter(adj, random_lowpass_coeffs(order, coeff_seed))


class TestClosedForm:
    def test_identity_gives_half_identity(self):
        out = expected_sq_jacobian_gcg(np.eye(8))
        assert np.max(np.abs(out.matrix - 0.5 * np.eye(8))) == 0.0
        out = expected_sq_jacobian_gdec(np.eye(8))
        assert np.max(np.abs(out.matrix - 0.5 * np.eye(8))) == 0.0

    def test_diagonal_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            n = int(rng.integers(4, 24))
            operator = rng.standard_normal((n, n))
            out = expected_sq_jacobian_gcg(operator)
            gram_diag = np.diag(operator @ operator.T)
            assert np.max(np.abs(np.diag(out.matrix) - 0.5 * gram_diag)) < 1e-12

    def test_symmetric_psd(self):
        rng = np.random.default_rng(1)
        for trial in range(100):
            n = int(rng.integers(4, 32))
            if trial % 2 == 0:
                operator = rng.standard_normal((n, n))
                out = expected_sq_jacobian_gcg(operator)
            else:
                operator = rng.standard_normal((n, max(1, n // 3)))
                out = expected_sq_jacobian_gdec(operator)
            assert np.max(np.abs(out.matrix - out.matrix.T)) < 1e-10
            assert out.eigenvalues[-1] >= -1e-8

    def test_zero_row_rejected(self):
        operator = np.eye(4)
        operator[2, 2] = 0.0
        with pytest.raises(ZeroRowError) as info:
            expected_sq_jacobian_gcg(operator)
        assert info.value.row == 2

    def test_monte_carlo_agreement_gcg(self):
        _, _, h = sbm_filter()
        closed = expected_sq_jacobian_gcg(h)
        estimate = monte_carlo_sq_jacobian("gcg", h, 64, 5000, 0)
        rel = np.linalg.norm(estimate - closed.matrix) / np.linalg.norm(closed.matrix)
        assert rel < 0.05

    def test_monte_carlo_agreement_gdec(self):
        graph, _, _ = sbm_filter()
        hierarchy = build_hierarchy(graph, [4, 32], 0.5)
        u = hierarchy.upsamplers[0]
        closed = expected_sq_jacobian_gdec(u)
        estimate = monte_carlo_sq_jacobian("gdec", u, 64, 5000, 1)
        rel = np.linalg.norm(estimate - closed.matrix) / np.linalg.norm(closed.matrix)
        assert rel < 0.05


class TestMonteCarlo:
    def test_reproducible_single_sample(self):
        _, _, h = sbm_filter()
        a = monte_carlo_sq_jacobian("gcg", h, 8, 1, 3)
        b = monte_carlo_sq_jacobian("gcg", h, 8, 1, 3)
        assert np.array_equal(a, b)

    def test_identity_converges_to_half_identity(self):
        estimate = monte_carlo_sq_jacobian("gcg", np.eye(8), 2, 50000, 2)
        assert np.max(np.abs(estimate - 0.5 * np.eye(8))) < 0.01

    def test_convergence_rate_scaling(self):
        _, _, h = sbm_filter()
        closed = expected_sq_jacobian_gcg(h).matrix
        scale = np.linalg.norm(closed)
        errors = []
        for idx, n_samples in enumerate((100, 1000, 10000)):
            estimate = monte_carlo_sq_jacobian("gcg", h, 2, n_samples, 100 + idx)
            errors.append(np.linalg.norm(estimate - closed) / scale)
        slope = np.polyfit(np.log10((100, 1000, 10000)), np.log10(errors), 1)[0]
        assert -0.6 < slope < -0.4

    def test_deep_two_layer_matches_closed_form(self):
        _, _, h = sbm_filter()
        closed = expected_sq_jacobian_gcg(h).matrix
        estimate = monte_carlo_deep_jacobian(two_layer_factory("gcg", h, 64), 2000, seed=4)
        rel = np.linalg.norm(estimate - closed) / np.linalg.norm(closed)
        assert rel < 0.05

    def test_deep_deterministic(self):
        _, _, h = sbm_filter(n=16, coeff_seed=9)
        factory = two_layer_factory("gcg", h, 8)
        a = monte_carlo_deep_jacobian(factory, 5, seed=8)
        b = monte_carlo_deep_jacobian(factory, 5, seed=8)
        assert np.array_equal(a, b)

    def test_probe_step_route_agrees_with_reverse_mode(self):
        _, _, h = sbm_filter(n=8, coeff_seed=10)
        factory = two_layer_factory("gcg", h, 4)
        exact = monte_carlo_deep_jacobian(factory, 3, seed=5)
        probed = monte_carlo_deep_jacobian(factory, 3, probe_step=1e-6, seed=5)
        assert np.max(np.abs(exact - probed)) < 1e-6

    def test_deep_gcg_leading_eigenvectors_align_with_graph(self):
        from gpd.models import init_model

        graph = sample_sbm(SbmModel.balanced(64, 4, 0.8, 0.05), 11)
        adj = normalize_adjacency(graph)
        h = graph_filter(adj, np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0)
        spectrum = spectral_decomposition(adj)

        def factory(seed):
            return init_model("gcg", [h], [16, 16, 16, 16, 1], seed, init_mode="he-scaled")

        average = monte_carlo_deep_jacobian(factory, 60, seed=12)
        deep_spectrum = spectral_decomposition((average + average.T) / 2.0)
        similarity = eigenvector_similarity(spectrum.leading(4), deep_spectrum.leading(4))
        assert similarity < 0.15


class TestProcrustes:
    def test_identity_alignment(self):
        rng = np.random.default_rng(0)
        v = random_orthonormal(10, 3, rng)
        q = procrustes_align(v, v)
        assert np.allclose(q, np.eye(3), atol=1e-12)
        assert eigenvector_similarity(v, v) < 1e-14

    def test_rotation_recovered(self):
        rng = np.random.default_rng(1)
        v = random_orthonormal(12, 4, rng)
        rotation = random_orthonormal(4, 4, rng)
        w = v @ rotation
        q = procrustes_align(v, w)
        assert np.allclose(w @ q, v, atol=1e-10)
        assert eigenvector_similarity(v, w) < 1e-10

    def test_orthogonal_subspaces_distance(self):
        rng = np.random.default_rng(2)
        basis = random_orthonormal(8, 4, rng)
        v, w = basis[:, :2], basis[:, 2:]
        with pytest.warns(RuntimeWarning, match="rank deficient"):
            q = procrustes_align(v, w)
        distance_sq = np.linalg.norm(v - w @ q, "fro") ** 2
        assert abs(distance_sq - 4.0) < 1e-9
        with pytest.warns(RuntimeWarning):
            assert abs(eigenvector_similarity(v, w) - 1.0) < 1e-9

    def test_optimality_against_random_rotations(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            v = random_orthonormal(10, 3, rng)
            w = random_orthonormal(10, 3, rng)
            q = procrustes_align(v, w)
            best = np.linalg.norm(v - w @ q, "fro")
            candidates = [random_orthonormal(3, 3, rng) for _ in range(1000)]
            worst = min(np.linalg.norm(v - w @ c, "fro") for c in candidates)
            assert worst >= best - 1e-12

    def test_requires_orthonormal_columns(self):
        rng = np.random.default_rng(4)
        with pytest.raises(ValueError, match="orthonormal"):
            procrustes_align(rng.standard_normal((6, 2)), random_orthonormal(6, 2, rng))


def random_bound_inputs(rng, n=16):
    eigenvalues = np.sort(rng.random(n) + 0.05)[::-1]
    eigenvectors = random_orthonormal(n, n, rng)
    return BoundInputs(
        step_size=float(rng.random() * 0.9 / eigenvalues[0] ** 2),
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        bandwidth=int(rng.integers(1, n + 1)),
        subspace_error=float(rng.random() * 0.3),
        width_tolerance=float(rng.random() * 0.1),
        clean_signal=rng.standard_normal(n),
        observed_signal=rng.standard_normal(n),
        noise=rng.standard_normal(n),
    )


class TestBound:
    def test_epoch_zero_values(self):
        rng = np.random.default_rng(0)
        inputs = random_bound_inputs(rng)
        terms = fit_error_bound(inputs, 0)
        norm0 = np.linalg.norm(inputs.clean_signal)
        assert terms.term_signal == pytest.approx((1.0 + inputs.subspace_error) * norm0, abs=1e-10)
        assert terms.term_noise == 0.0

    def test_large_epoch_limits(self):
        rng = np.random.default_rng(1)
        inputs = random_bound_inputs(rng)
        terms = fit_error_bound(inputs, 10**7)
        assert terms.term_signal == pytest.approx(0.0, abs=1e-10)
        expected = np.linalg.norm(inputs.eigenvectors.T @ inputs.noise)
        assert terms.term_noise == pytest.approx(expected, abs=1e-10)
        assert expected == pytest.approx(np.linalg.norm(inputs.noise), abs=1e-8)

    def test_monotonicity_over_epochs(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            inputs = random_bound_inputs(rng)
            values = [fit_error_bound(inputs, t) for t in range(0, 200, 10)]
            signals = [v.term_signal for v in values]
            noises = [v.term_noise for v in values]
            assert all(b <= a + 1e-12 for a, b in zip(signals, signals[1:]))
            assert all(b >= a - 1e-12 for a, b in zip(noises, noises[1:]))

    def test_width_term(self):
        rng = np.random.default_rng(3)
        inputs = random_bound_inputs(rng)
        terms = fit_error_bound(inputs, 5)
        assert terms.term_width == pytest.approx(
            inputs.width_tolerance * np.linalg.norm(inputs.observed_signal), abs=1e-12
        )
        assert terms.total == pytest.approx(
            terms.term_signal + terms.term_width + terms.term_noise, abs=1e-12
        )

    def test_step_size_precondition(self):
        rng = np.random.default_rng(4)
        inputs = random_bound_inputs(rng)
        with pytest.raises(ValueError, match="step size"):
            BoundInputs(
                step_size=2.0 / inputs.eigenvalues[0] ** 2,
                eigenvalues=inputs.eigenvalues,
                eigenvectors=inputs.eigenvectors,
                bandwidth=1,
                subspace_error=0.0,
                width_tolerance=0.0,
                clean_signal=inputs.clean_signal,
                observed_signal=inputs.observed_signal,
                noise=inputs.noise,
            )


class TestWidthRequirement:
    def test_equal_extremes_approach_node_count(self):
        out = width_requirement(2.0, 2.0, 1.0 - 1e-12, 64)
        assert out.features == pytest.approx(64.0, rel=1e-9)

    def test_log_arithmetic_identity(self):
        out = width_requirement(2.0, 1.0, 0.5, 64)
        expected = 26.0 * np.log10(4.0) + 8.0 * np.log10(2.0) + np.log10(64.0)
        assert out.log10_features == pytest.approx(expected, abs=1e-12)

    def test_measured_spectrum_is_finite_diagnostic(self):
        _, _, h = sbm_filter()
        out = expected_sq_jacobian_gcg(h)
        eigenvalues = out.eigenvalues
        positive = eigenvalues[eigenvalues > 1e-12]
        requirement = width_requirement(positive[0], positive[-1], 0.05, 32)
        assert np.isfinite(requirement.log10_features)

    def test_degenerate_sigma_rejected(self):
        with pytest.raises(ValueError, match="undefined"):
            width_requirement(1.0, 0.0, 0.5, 8)
