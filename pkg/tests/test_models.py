import numpy as np
import pytest

from gpd.coarsening import build_hierarchy
from gpd.errors import NonFiniteLossError
from gpd.graphs import graph_filter, normalize_adjacency, spectral_decomposition
from gpd.models import (
    FitConfig,
    fit,
    forward,
    init_model,
    load_checkpoint,
    loss_and_gradient,
    mixing_vector,
    output_jacobian,
    output_jacobian_fd,
    save_checkpoint,
)
from gpd.signals import bandlimited_signal
from oracles import finite_difference_grads


def lowpass_filter(graph, order=2):
    coeffs = np.ones(order + 1) / (order + 1.0)
    return graph_filter(normalize_adjacency(graph), coeffs)


def random_gcg2(h, n_features=16, seed=0):
    return init_model("gcg2", [h], [n_features], seed)


class TestInit:
    def test_mixing_vector_balance(self):
        b = mixing_vector(8)
        assert b.sum() == 0.0
        assert np.sum(b == 1.0 / np.sqrt(8)) == 4
        assert np.sum(b == -1.0 / np.sqrt(8)) == 4

    def test_odd_features_rejected(self):
        with pytest.raises(ValueError, match="even"):
            mixing_vector(7)

    def test_bitwise_reproducible(self, path_graph_10):
        h = lowpass_filter(path_graph_10)
        a = init_model("gcg", [h], [8, 8, 1], seed=3)
        b = init_model("gcg", [h], [8, 8, 1], seed=3)
        assert np.array_equal(a.z, b.z)
        for wa, wb in zip(a.weights, b.weights):
            assert np.array_equal(wa, wb)

    def test_standard_normal_variance(self):
        model = init_model("gcg2", [np.eye(100)], [10000], seed=1)
        sample = model.weights[0].ravel()
        assert sample.size == 10**6
        assert abs(sample.var() - 1.0) < 0.01

    def test_he_scaled_variance(self):
        model = init_model("gcg2", [np.eye(200)], [5000], seed=2, init_mode="he-scaled")
        sample = model.weights[0].ravel()
        assert abs(sample.var() - 2.0 / 200) < 0.01 * 2.0 / 200 * 10

    def test_dimension_chain_validated(self, sbm_graph_64):
        graph, _ = sbm_graph_64
        h = lowpass_filter(graph)
        with pytest.raises(ValueError):
            init_model("gcg", [h], [8, 8], seed=0)  # output width must be 1
        hierarchy = build_hierarchy(graph, [4, 16, 64], 0.5)
        with pytest.raises(ValueError):
            init_model("gdec", hierarchy.upsamplers[::-1], [8, 8, 1], seed=0)


class TestForward:
    def test_zero_weights_zero_output(self, path_graph_10):
        h = lowpass_filter(path_graph_10)
        model = random_gcg2(h)
        model.weights[0][:] = 0.0
        assert np.all(forward(model) == 0.0)

    def test_two_feature_analytic_form(self):
        theta = np.array([[1.0, -2.0], [3.0, 0.5], [-1.0, 4.0]]).T  # 2 cols after T? keep explicit
        theta = np.array([[1.0, -2.0], [-0.5, 3.0], [2.0, -1.0]])
        model = init_model("gcg2", [np.eye(3)], [2], seed=0)
        model.weights[0] = theta.copy()
        out = forward(model)
        expected = (np.maximum(theta[:, 0], 0.0) - np.maximum(theta[:, 1], 0.0)) / np.sqrt(2.0)
        assert np.allclose(out, expected, atol=1e-15)

    def test_deep_forward_matches_layer_oracle(self, path_graph_10):
        h = lowpass_filter(path_graph_10)
        model = init_model("gcg", [h], [6, 6, 6, 1], seed=4)
        out = forward(model)
        y = model.z
        for idx, theta in enumerate(model.weights):
            pre = h @ y @ theta
            y = pre if idx == len(model.weights) - 1 else np.maximum(pre, 0.0)
        assert np.linalg.norm(out - y[:, 0]) < 1e-12

    def test_gdec_parent_copy(self, sbm_graph_64):
        graph, _ = sbm_graph_64
        hierarchy = build_hierarchy(graph, [4, 64], 1.0)  # gamma 1: pure parent copy
        model = init_model("gdec", hierarchy.upsamplers, [1, 1], seed=0)
        model.weights[0][:] = 1.0
        latent = model.z[:, 0]
        out = forward(model)
        parents = hierarchy.assignments[0]
        assert np.allclose(out, latent[parents], atol=1e-12)

    def test_gdec_deep_matches_layer_oracle(self, sbm_graph_64):
        graph, _ = sbm_graph_64
        hierarchy = build_hierarchy(graph, [4, 16, 64], 0.5)
        model = init_model("gdec", hierarchy.upsamplers, [5, 5, 1], seed=6)
        out = forward(model)
        y = model.z
        for idx, (u, theta) in enumerate(zip(hierarchy.upsamplers, model.weights)):
            pre = u @ y @ theta
            y = pre if idx == len(model.weights) - 1 else np.maximum(pre, 0.0)
        assert np.linalg.norm(out - y[:, 0]) < 1e-12

    def test_forward_is_pure(self, path_graph_10):
        model = random_gcg2(lowpass_filter(path_graph_10))
        assert np.array_equal(forward(model), forward(model))

    def test_positive_homogeneity(self, path_graph_10):
        model = random_gcg2(lowpass_filter(path_graph_10))
        base = forward(model)
        model.weights[0] *= 2.5
        assert np.allclose(forward(model), 2.5 * base, atol=1e-12)


class TestGradient:
    def test_zero_residual_zero_gradient(self, path_graph_10):
        model = random_gcg2(lowpass_filter(path_graph_10))
        x = forward(model)
        loss, grads = loss_and_gradient(model, x)
        assert loss == 0.0
        assert all(np.all(g == 0.0) for g in grads)

    def test_matches_finite_differences(self, sbm_graph_64):
        graph, _ = sbm_graph_64
        h = lowpass_filter(graph)
        hierarchy = build_hierarchy(graph, [4, 16, 64], 0.5)
        flat = build_hierarchy(graph, [4, 64], 0.5)
        rng = np.random.default_rng(0)
        cases = []
        for seed in range(3):
            cases.append(init_model("gcg2", [h], [8], seed))
            cases.append(init_model("gcg", [h], [5, 5, 1], seed))
            cases.append(init_model("gdec2", [flat.upsamplers[0]], [8], seed))
            cases.append(init_model("gdec", hierarchy.upsamplers, [5, 5, 1], seed))
        for model in cases:
            x = rng.standard_normal(64)
            _, grads = loss_and_gradient(model, x)
            numeric = finite_difference_grads(model, x)
            for g, fd in zip(grads, numeric):
                scale = max(np.max(np.abs(fd)), 1e-8)
                assert np.max(np.abs(g - fd)) / scale < 1e-6


class TestOutputJacobian:
    def test_two_layer_against_fd(self, path_graph_10):
        model = random_gcg2(lowpass_filter(path_graph_10), n_features=6, seed=2)
        jac = output_jacobian(model)
        fd = output_jacobian_fd(model, 1e-6)
        assert np.max(np.abs(jac - fd)) < 1e-8

    def test_deep_against_fd(self, path_graph_10):
        h = lowpass_filter(path_graph_10)
        model = init_model("gcg", [h], [4, 4, 1], seed=5)
        jac = output_jacobian(model)
        fd = output_jacobian_fd(model, 1e-6)
        assert np.max(np.abs(jac - fd)) < 1e-7


class TestFit:
    def test_zero_epochs_returns_initial_forward(self, path_graph_10):
        model = random_gcg2(lowpass_filter(path_graph_10))
        initial = forward(model)
        trajectory = fit(model, np.zeros(10), FitConfig(epochs=0, step_size=0.1))
        assert np.array_equal(trajectory.estimate, initial)
        assert trajectory.losses.shape == (1,)

    def test_record_count_and_final_state(self, path_graph_10):
        model = random_gcg2(lowpass_filter(path_graph_10))
        x = np.ones(10)
        trajectory = fit(model, x, FitConfig(epochs=25, step_size=0.01, record_reference=x))
        assert trajectory.losses.shape == (26,)
        assert trajectory.nmses.shape == (26,)
        assert np.array_equal(trajectory.estimate, forward(model))
        for final, current in zip(trajectory.final_weights, model.weights):
            assert np.array_equal(final, current)

    def test_plain_gd_monotone_descent_small_step(self, sbm_spectrum_64, sbm_graph_64):
        graph, _ = sbm_graph_64
        h = lowpass_filter(graph)
        x = bandlimited_signal(sbm_spectrum_64, 4, np.array([2.0, 1.0, -1.0, 0.5]))
        for seed in range(3):
            model = init_model("gcg2", [h], [128], seed)
            trajectory = fit(model, x, FitConfig(epochs=50, step_size=1e-3, optimizer="plain-gd"))
            assert np.all(np.diff(trajectory.losses) <= 1e-12)

    def test_frozen_input_untouched(self, path_graph_10):
        h = lowpass_filter(path_graph_10)
        model = init_model("gcg", [h], [6, 6, 1], seed=7)
        z_before = model.z.copy()
        fit(model, np.ones(10), FitConfig(epochs=30, step_size=0.01))
        assert np.array_equal(model.z, z_before)

    def test_noiseless_bandlimited_convergence(self, sbm_graph_64, sbm_spectrum_64):
        graph, _ = sbm_graph_64
        h = graph_filter(normalize_adjacency(graph), np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0)
        x0 = bandlimited_signal(sbm_spectrum_64, 4, np.array([1.5, -2.0, 1.0, 0.8]))
        model = init_model("gcg", [h], [64, 64, 1], seed=1, init_mode="he-scaled")
        cfg = FitConfig(epochs=3000, step_size=0.01, optimizer="adam", record_reference=x0)
        trajectory = fit(model, x0, cfg)
        assert trajectory.nmses[-1] < 0.01

    @pytest.mark.filterwarnings("ignore:overflow:RuntimeWarning")
    def test_nonfinite_loss_raises_with_epoch(self, path_graph_10):
        model = random_gcg2(lowpass_filter(path_graph_10))
        with pytest.raises(NonFiniteLossError):
            fit(model, np.ones(10) * 1e150, FitConfig(epochs=50, step_size=1e30, optimizer="plain-gd"))

    def test_two_layer_rank_bounds(self, sbm_graph_64):
        graph, _ = sbm_graph_64
        hierarchy = build_hierarchy(graph, [4, 64], 0.5)
        model = init_model("gdec2", [hierarchy.upsamplers[0]], [16], seed=0)
        linear = model.operators[0] @ model.weights[0]
        singulars = np.linalg.svd(linear, compute_uv=False)
        assert np.sum(singulars > 1e-9) <= 4
        h = lowpass_filter(graph)
        gcg = init_model("gcg2", [h], [16], seed=0)
        span = np.maximum(gcg.operators[0] @ gcg.weights[0], 0.0)
        estimate = forward(gcg)
        coeffs, *_ = np.linalg.lstsq(span, estimate, rcond=None)
        assert np.linalg.norm(span @ coeffs - estimate) < 1e-9


class TestCheckpoint:
    def test_round_trip(self, path_graph_10, tmp_path):
        h = lowpass_filter(path_graph_10)
        model = init_model("gcg", [h], [6, 6, 1], seed=9)
        path = save_checkpoint(model, tmp_path / "model.json", seed=9)
        loaded = load_checkpoint(path, [h, h])
        assert loaded.kind == model.kind
        assert np.array_equal(loaded.z, model.z)
        for a, b in zip(loaded.weights, model.weights):
            assert np.array_equal(a, b)
        assert np.array_equal(forward(loaded), forward(model))

    def test_operator_hash_mismatch(self, path_graph_10, tmp_path):
        h = lowpass_filter(path_graph_10)
        model = init_model("gcg2", [h], [8], seed=0)
        path = save_checkpoint(model, tmp_path / "model.json")
        with pytest.raises(ValueError, match="hash"):
            load_checkpoint(path, [np.eye(10)])
