"""Config-driven experiment harness.

Experiments are described by TOML (or JSON) configs merged over documented
defaults and emit CSV files with fixed header schemas:

  fit-curves      fit_curves_<model>.csv  (trial, target_kind, epoch, nmse)
  eigsim          eigsim.csv              (graph_family, N, K, trial, similarity)
  compare-bl/-dw  compare.csv             (trial, method, epoch, nmse)
  jacobian-check  jacobian_check.csv      (kind, N, n_samples, rel_frob_err)
  bound-curve     bound_curve.csv         (t, term_signal, term_width,
                                           term_noise, total, observed_error)
  denoise-file    denoise_results.csv     (signal, method, nmse, error_rate)
                  estimates.csv           (node, <signal>__<method>, ...)

Seed discipline: trial i draws from ``SeedSequence(master_seed,
spawn_key=(role, i + 1))`` (slot 0 is reserved for draws shared by all
trials), so results are independent of trial execution order and of the
worker count. Reruns with an identical config produce byte-identical files.
"""

import json
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import baselines, models, signals, spectral
from .coarsening import build_hierarchy, default_layer_sizes
from .errors import ConfigError, DataFormatError
from .graphs import (
    SbmModel,
    graph_filter,
    normalize_adjacency,
    sample_graph,
    sample_sbm,
    spectral_decomposition,
)
from .io import load_edge_list, load_signals, write_csv

EXPERIMENT_IDS = (
    "fit-curves",
    "eigsim",
    "compare-bl",
    "compare-dw",
    "jacobian-check",
    "bound-curve",
    "denoise-file",
)

FIT_CURVES_HEADER = ("trial", "target_kind", "epoch", "nmse")
EIGSIM_HEADER = ("graph_family", "N", "K", "trial", "similarity")
COMPARE_HEADER = ("trial", "method", "epoch", "nmse")
JACOBIAN_HEADER = ("kind", "N", "n_samples", "rel_frob_err")
BOUND_HEADER = ("t", "term_signal", "term_width", "term_noise", "total", "observed_error")
DENOISE_HEADER = ("signal", "method", "nmse", "error_rate")

BASELINE_EPOCH = -1  # epoch column value for epoch-independent methods

# spawn-key roles for deriving independent random streams
ROLE_GRAPH, ROLE_SIGNAL, ROLE_NOISE, ROLE_MODEL, ROLE_FILTER = range(5)
SHARED_SLOT = 0


def derive_seed(master_seed, role, slot, *extra):
    """Independent seed for (role, slot, *extra) under one master seed."""
    key = (int(role), int(slot)) + tuple(int(e) for e in extra)
    return np.random.SeedSequence(int(master_seed), spawn_key=key)


def trial_slot(trial):
    return trial + 1


# ---------------------------------------------------------------------------
# configuration


def load_config(path):
    """Parse a TOML or JSON config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    text = path.read_text()
    try:
        if path.suffix == ".json":
            return json.loads(text)
        return tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


# collection tables are replaced wholesale: a config listing its own models
# (or methods, or families) opts out of the default collection entirely
ATOMIC_TABLES = frozenset({"models", "methods", "families"})


def merge_config(defaults, overrides, atomic=ATOMIC_TABLES):
    """Recursive dict merge; override values win, tables merge key-wise."""
    merged = dict(defaults)
    for key, value in (overrides or {}).items():
        if (
            key not in atomic
            and isinstance(value, dict)
            and isinstance(merged.get(key), dict)
        ):
            merged[key] = merge_config(merged[key], value, atomic=frozenset())
        else:
            merged[key] = value
    return merged


def prepare_config(experiment, overrides=None, seed=None):
    """Defaults for ``experiment`` merged with overrides and CLI seed."""
    if experiment not in EXPERIMENT_IDS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    cfg = merge_config(DEFAULT_CONFIGS[experiment], overrides or {})
    if seed is not None:
        cfg["master_seed"] = int(seed)
    validate_config(experiment, cfg)
    return cfg


def validate_config(experiment, cfg):
    trials = cfg.get("trials", 1)
    if not isinstance(trials, int) or trials < 1:
        raise ConfigError("trials must be an integer >= 1")
    if "master_seed" not in cfg:
        raise ConfigError("master_seed is required")
    for key in ("graph_file", "signal_file", "reference_file"):
        path = cfg.get(key)
        if path is not None and not Path(path).exists():
            raise ConfigError(f"{key} {path!r} does not exist")
    graph = cfg.get("graph")
    if isinstance(graph, dict) and graph.get("family") == "file":
        if not Path(graph.get("path", "")).exists():
            raise ConfigError(f"graph file {graph.get('path')!r} does not exist")
    if experiment in ("compare-bl", "compare-dw", "fit-curves"):
        if not cfg.get("models"):
            raise ConfigError("at least one model must be configured")
    if experiment == "denoise-file":
        for key in ("graph_file", "signal_file"):
            if not cfg.get(key):
                raise ConfigError(f"denoise-file needs {key}")
        if not cfg.get("methods"):
            raise ConfigError("at least one method must be configured")


def resolve_output_dir(cli_out=None, cfg=None):
    """--out flag, then $GPD_OUT, then the config, then ./results."""
    out = cli_out or os.environ.get("GPD_OUT") or (cfg or {}).get("output_dir") or "results"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


# ---------------------------------------------------------------------------
# builders shared by the experiment runners


def build_graph(graph_cfg, seed):
    """Graph described by a config table; returns (graph, sbm_model_or_None)."""
    family = graph_cfg["family"]
    if family == "sbm":
        model = SbmModel.balanced(
            graph_cfg["n"],
            graph_cfg["communities"],
            graph_cfg["p_in"],
            graph_cfg["p_out"],
        )
        return sample_sbm(model, seed), model
    if family == "file":
        return load_edge_list(graph_cfg["path"]), None
    params = {k: v for k, v in graph_cfg.items() if k not in ("family", "per_trial")}
    return sample_graph(family, params, seed), None


def binomial_coeffs(order):
    """Coefficients of ((1 + t) / 2)^order, a steep low-pass polynomial."""
    from math import comb

    return np.array([comb(order, m) for m in range(order + 1)], dtype=float) / 2.0**order


def filter_from_config(filter_cfg, adjacency, seed):
    kind = filter_cfg.get("kind", "binomial")
    if kind == "binomial":
        coeffs = binomial_coeffs(filter_cfg.get("order", 3))
    elif kind == "random-lowpass":
        coeffs = signals.random_lowpass_coeffs(filter_cfg.get("order", 3), seed)
    elif kind == "coeffs":
        coeffs = np.asarray(filter_cfg["values"], dtype=float)
    else:
        raise ConfigError(f"unknown filter kind {kind!r}")
    return graph_filter(adjacency, coeffs)


class GraphContext:
    """Per-trial graph with lazily computed derived objects."""

    def __init__(self, graph, sbm_model=None):
        self.graph = graph
        self.sbm_model = sbm_model
        self._adjacency = None
        self._spectrum = None
        self._hierarchies = {}

    @property
    def adjacency(self):
        if self._adjacency is None:
            self._adjacency = normalize_adjacency(self.graph)
        return self._adjacency

    @property
    def spectrum(self):
        if self._spectrum is None:
            self._spectrum = spectral_decomposition(self.adjacency)
        return self._spectrum

    def hierarchy(self, sizes, gamma):
        key = (tuple(int(s) for s in sizes), float(gamma))
        if key not in self._hierarchies:
            self._hierarchies[key] = build_hierarchy(self.graph, sizes, gamma)
        return self._hierarchies[key]


def model_operators(model_cfg, ctx, seed):
    """Fixed operators (filter or upsampler chain) for a model config."""
    kind = model_cfg["kind"]
    n = ctx.graph.n_nodes
    if kind in ("gcg", "gcg2"):
        return [filter_from_config(model_cfg.get("filter", {}), ctx.adjacency, seed)]
    gamma = model_cfg.get("gamma", 0.5)
    if kind == "gdec2":
        sizes = [int(model_cfg.get("latent", 4)), n]
    elif "hierarchy_sizes" in model_cfg:
        sizes = [int(s) for s in model_cfg["hierarchy_sizes"]]
    else:
        sizes = default_layer_sizes(n, model_cfg.get("latent", 4), model_cfg.get("layers", 3))
    hierarchy = ctx.hierarchy(sizes, gamma)
    if kind == "gdec2":
        return [hierarchy.upsamplers[0]]
    return list(hierarchy.upsamplers)


def model_widths(model_cfg, n_operators):
    kind = model_cfg["kind"]
    if kind in ("gcg2", "gdec2"):
        return [int(model_cfg.get("features", 128))]
    if "widths" in model_cfg:
        return [int(w) for w in model_cfg["widths"]]
    features = int(model_cfg.get("features", 64))
    layers = int(model_cfg.get("layers", n_operators if n_operators > 1 else 3))
    return [features] * layers + [1]


def build_model(model_cfg, ctx, operator_seed, weight_seed):
    kind = model_cfg["kind"]
    operators = model_operators(model_cfg, ctx, operator_seed)
    layers = len(operators) if kind == "gdec" else int(model_cfg.get("layers", 3))
    widths = model_widths(model_cfg, layers)
    return models.init_model(
        kind,
        operators,
        widths,
        weight_seed,
        init_mode=model_cfg.get("init", "standard-normal"),
    )


def fit_config_from(fit_cfg, model, reference=None):
    """FitConfig with either a fixed step or one scaled by the operator
    spectrum (step_size / sigma_1^2 of the closed-form squared Jacobian,
    two-layer kinds only)."""
    step = float(fit_cfg.get("step_size", 0.01))
    mode = fit_cfg.get("step_mode", "fixed")
    if mode == "spectral":
        if model.kind not in ("gcg2", "gdec2"):
            raise ConfigError("spectral step mode applies to two-layer kinds only")
        top = spectral.expected_sq_jacobian_gcg(model.operators[0]).eigenvalues[0]
        step = step / float(top**2)
    elif mode != "fixed":
        raise ConfigError(f"unknown step mode {mode!r}")
    return models.FitConfig(
        epochs=int(fit_cfg.get("epochs", 1000)),
        step_size=step,
        optimizer=fit_cfg.get("optimizer", "adam"),
        record_reference=reference,
    )


def build_signal(signal_cfg, ctx, seed):
    kind = signal_cfg["kind"]
    rng_seed = seed
    if kind == "piecewise-constant":
        if ctx.sbm_model is None:
            raise ConfigError("piecewise-constant signals need an SBM graph")
        return signals.piecewise_constant_signal(ctx.sbm_model.assignments)
    if kind == "bandlimited":
        k = int(signal_cfg.get("bandwidth", 4))
        coeffs = np.random.default_rng(rng_seed).standard_normal(k)
        return signals.bandlimited_signal(ctx.spectrum, k, coeffs)
    if kind == "diffused-white":
        filter_cfg = signal_cfg.get("filter")
        coeffs = None
        if filter_cfg:
            if filter_cfg.get("kind") == "binomial":
                coeffs = binomial_coeffs(filter_cfg.get("order", 3))
            elif filter_cfg.get("kind") == "coeffs":
                coeffs = np.asarray(filter_cfg["values"], dtype=float)
            elif filter_cfg.get("kind") == "random-lowpass":
                coeffs = signals.random_lowpass_coeffs(
                    filter_cfg.get("order", 3), np.random.default_rng(rng_seed).integers(2**32)
                )
            else:
                raise ConfigError(f"unknown filter kind {filter_cfg.get('kind')!r}")
        return signals.diffused_white_signal(ctx.graph, filter_coeffs=coeffs, seed=rng_seed)
    if kind == "random":
        return signals.random_signal(ctx.graph.n_nodes, rng_seed)
    raise ConfigError(f"unknown signal kind {kind!r}")


def noise_spec_from(noise_cfg):
    distribution = noise_cfg.get("distribution", "gaussian")
    if distribution == "bernoulli-flip":
        return signals.NoiseSpec(distribution, flip_fraction=noise_cfg["flip_fraction"])
    return signals.NoiseSpec(distribution, power=noise_cfg.get("power", 0.1))


# ---------------------------------------------------------------------------
# fit-curves


def _fit_curves_trial(args):
    cfg, trial = args
    master = cfg["master_seed"]
    graph_slot = trial_slot(trial) if cfg["graph"].get("per_trial", False) else SHARED_SLOT
    graph, sbm_model = build_graph(cfg["graph"], derive_seed(master, ROLE_GRAPH, graph_slot))
    ctx = GraphContext(graph, sbm_model)
    x0 = build_signal(cfg["signal"], ctx, derive_seed(master, ROLE_SIGNAL, graph_slot))

    noise_rng = np.random.default_rng(derive_seed(master, ROLE_NOISE, trial_slot(trial)))
    distribution = cfg["noise"].get("distribution", "gaussian")
    if distribution == "gaussian":
        raw = noise_rng.standard_normal(graph.n_nodes)
    elif distribution == "uniform":
        raw = noise_rng.random(graph.n_nodes)
    else:
        raise ConfigError("fit-curves supports gaussian or uniform noise")
    power = float(cfg["noise"].get("power", 0.1))
    scaled = raw * (np.sqrt(power) * np.linalg.norm(x0) / np.linalg.norm(raw))
    targets = [("signal", x0, x0), ("noise", raw, raw), ("noisy", x0 + scaled, x0)]

    out = {}
    for model_idx, (name, model_cfg) in enumerate(sorted(cfg["models"].items())):
        rows = []
        for target_idx, (kind_label, target, reference) in enumerate(targets):
            model = build_model(
                model_cfg,
                ctx,
                derive_seed(master, ROLE_FILTER, graph_slot, model_idx),
                derive_seed(master, ROLE_MODEL, trial_slot(trial), model_idx, target_idx),
            )
            fit_cfg = fit_config_from(cfg["fit"], model, reference=reference)
            trajectory = models.fit(model, target, fit_cfg)
            rows.extend(
                (trial, kind_label, epoch, float(v))
                for epoch, v in enumerate(trajectory.nmses)
            )
        out[name] = rows
    return out


def run_fit_curves(cfg, out_dir, jobs=1):
    """Fit every configured model to clean / pure-noise / noisy targets.

    The NMSE of each fit is tracked against the target's own reference (the
    clean signal for "signal" and "noisy", the noise itself for "noise").
    One CSV per model.
    """
    results = _map_trials(_fit_curves_trial, cfg, jobs)
    paths = []
    for name in sorted(cfg["models"]):
        rows = [row for result in results for row in result[name]]
        paths.append(write_csv(Path(out_dir) / f"fit_curves_{name}.csv", FIT_CURVES_HEADER, rows))
    return paths


# ---------------------------------------------------------------------------
# eigsim


def _eigsim_trial(args):
    cfg, trial = args
    master = cfg["master_seed"]
    rows = []
    for family_idx, family_cfg in enumerate(cfg["families"]):
        family = family_cfg["family"]
        k = int(family_cfg["k"])
        for size_idx, n in enumerate(cfg["sizes"]):
            graph_cfg = dict(family_cfg.get("params", {}))
            graph_cfg["family"] = family
            for key, value in _family_size_params(family, n, graph_cfg).items():
                graph_cfg.setdefault(key, value)
            graph, _ = build_graph(
                graph_cfg,
                derive_seed(master, ROLE_GRAPH, trial_slot(trial), family_idx, size_idx),
            )
            ctx = GraphContext(graph)
            operator = filter_from_config(
                cfg.get("filter", {"kind": "random-lowpass", "order": 3}),
                ctx.adjacency,
                derive_seed(master, ROLE_FILTER, trial_slot(trial), family_idx, size_idx),
            )
            squared = spectral.expected_sq_jacobian_gcg(operator)
            similarity = spectral.eigenvector_similarity(
                ctx.spectrum.leading(k), squared.spectrum.leading(k)
            )
            rows.append((family, graph.n_nodes, k, trial, similarity))
    return rows


def _family_size_params(family, n, existing):
    if family == "sbm":
        return {"n": n, "communities": 4, "p_in": 0.8, "p_out": 0.05}
    if family == "caveman":
        cliques = existing.get("cliques", 4)
        return {"cliques": cliques, "clique_size": max(2, n // cliques)}
    if family == "regular":
        return {"n": n, "degree": max(3, n // 16)}
    if family == "small_world":
        return {"n": n, "neighbors": max(4, n // 8), "rewire_prob": 0.1}
    if family == "powerlaw_cluster":
        return {"n": n, "attach_edges": max(2, n // 16), "triangle_prob": 0.3}
    raise ConfigError(f"unknown graph family {family!r}")


def run_eigsim(cfg, out_dir, jobs=1):
    """Similarity between the graph's and the squared Jacobian's leading
    eigenvectors, per family and size; one row per trial."""
    results = _map_trials(_eigsim_trial, cfg, jobs)
    rows = [row for result in results for row in result]
    return write_csv(Path(out_dir) / "eigsim.csv", EIGSIM_HEADER, rows)


# ---------------------------------------------------------------------------
# compare


def _compare_trial(args):
    cfg, trial = args
    master = cfg["master_seed"]
    slot = trial_slot(trial)
    graph, sbm_model = build_graph(cfg["graph"], derive_seed(master, ROLE_GRAPH, slot))
    ctx = GraphContext(graph, sbm_model)
    x0 = build_signal(cfg["signal"], ctx, derive_seed(master, ROLE_SIGNAL, slot))
    observed, _ = signals.add_noise(
        x0, noise_spec_from(cfg["noise"]), derive_seed(master, ROLE_NOISE, slot)
    )

    rows = []
    grid = [float(a) for a in cfg["baselines"]["alpha_grid"]]
    bandwidth = int(cfg["baselines"].get("bandwidth", 8))
    estimate = baselines.bl_denoise(ctx.spectrum, observed, bandwidth)
    rows.append((trial, "bl", BASELINE_EPOCH, signals.nmse(x0, estimate)))
    best_lr = min(
        signals.nmse(x0, baselines.lr_denoise(graph, observed, alpha)) for alpha in grid
    )
    rows.append((trial, "lr", BASELINE_EPOCH, best_lr))
    tv_iters = int(cfg["baselines"].get("tv_iters", 600))
    tv_step = float(cfg["baselines"].get("tv_step", 0.1))
    best_tv = min(
        signals.nmse(
            x0, baselines.tv_denoise(graph, observed, alpha, iters=tv_iters, step=tv_step)
        )
        for alpha in grid
    )
    rows.append((trial, "tv", BASELINE_EPOCH, best_tv))

    for model_idx, (name, model_cfg) in enumerate(sorted(cfg["models"].items())):
        model = build_model(
            model_cfg,
            ctx,
            derive_seed(master, ROLE_FILTER, slot, model_idx),
            derive_seed(master, ROLE_MODEL, slot, model_idx),
        )
        fit_cfg = fit_config_from(
            merge_config(cfg["fit"], model_cfg.get("fit", {})), model, reference=x0
        )
        trajectory = models.fit(model, observed, fit_cfg)
        rows.extend(
            (trial, name, epoch, float(v)) for epoch, v in enumerate(trajectory.nmses)
        )
    return rows


def run_compare(cfg, out_dir, jobs=1):
    """Denoise per-trial observations with baselines and fitted models.

    Baselines are epoch-independent rows (epoch -1, regularization weights
    grid-searched per trial, which favors them); fitted models contribute a
    row per epoch.
    """
    results = _map_trials(_compare_trial, cfg, jobs)
    rows = [row for result in results for row in result]
    return write_csv(Path(out_dir) / "compare.csv", COMPARE_HEADER, rows)


# ---------------------------------------------------------------------------
# jacobian-check


def run_jacobian_check(cfg, out_dir, jobs=1):
    """Relative Frobenius error of the sampled squared Jacobian against the
    closed form, per architecture kind and sample count."""
    master = cfg["master_seed"]
    rows = []
    for kind_idx, kind in enumerate(cfg["kinds"]):
        graph, sbm_model = build_graph(cfg["graph"], derive_seed(master, ROLE_GRAPH, SHARED_SLOT, kind_idx))
        ctx = GraphContext(graph, sbm_model)
        if kind == "gcg":
            operator = filter_from_config(
                cfg.get("filter", {"kind": "random-lowpass", "order": 3}),
                ctx.adjacency,
                derive_seed(master, ROLE_FILTER, SHARED_SLOT, kind_idx),
            )
            closed = spectral.expected_sq_jacobian_gcg(operator)
        else:
            hierarchy = ctx.hierarchy([int(cfg.get("latent", 4)), graph.n_nodes], cfg.get("gamma", 0.5))
            operator = hierarchy.upsamplers[0]
            closed = spectral.expected_sq_jacobian_gdec(operator)
        for sample_idx, n_samples in enumerate(cfg["sample_counts"]):
            estimate = spectral.monte_carlo_sq_jacobian(
                kind,
                operator,
                int(cfg.get("features", 64)),
                int(n_samples),
                derive_seed(master, ROLE_MODEL, SHARED_SLOT, kind_idx, sample_idx),
            )
            rel = float(
                np.linalg.norm(estimate - closed.matrix) / np.linalg.norm(closed.matrix)
            )
            rows.append((kind, graph.n_nodes, int(n_samples), rel))
    return write_csv(Path(out_dir) / "jacobian_check.csv", JACOBIAN_HEADER, rows)


# ---------------------------------------------------------------------------
# bound-curve


def run_bound_curve(cfg, out_dir, jobs=1):
    """Evaluate the three bound terms along a real gradient-descent fit.

    The subspace-mismatch constant is measured with the Procrustes aligner,
    the step size is step_scale / sigma_1^2, and the observed column is the
    actual ||x0 - estimate|| of the fitted two-layer model at each epoch.
    """
    master = cfg["master_seed"]
    graph, sbm_model = build_graph(cfg["graph"], derive_seed(master, ROLE_GRAPH, SHARED_SLOT))
    ctx = GraphContext(graph, sbm_model)
    x0 = build_signal(cfg["signal"], ctx, derive_seed(master, ROLE_SIGNAL, SHARED_SLOT))
    observed, noise = signals.add_noise(
        x0, noise_spec_from(cfg["noise"]), derive_seed(master, ROLE_NOISE, SHARED_SLOT)
    )

    model_cfg = cfg["model"]
    model = build_model(
        model_cfg,
        ctx,
        derive_seed(master, ROLE_FILTER, SHARED_SLOT),
        derive_seed(master, ROLE_MODEL, SHARED_SLOT),
    )
    squared = spectral.expected_sq_jacobian_gcg(model.operators[0]) if model.kind == "gcg2" \
        else spectral.expected_sq_jacobian_gdec(model.operators[0])
    bandwidth = int(cfg["signal"].get("bandwidth", 4))
    aligner = spectral.procrustes_align(
        ctx.spectrum.leading(bandwidth), squared.spectrum.leading(bandwidth)
    )
    subspace_error = float(
        np.linalg.norm(
            ctx.spectrum.leading(bandwidth) - squared.spectrum.leading(bandwidth) @ aligner,
            "fro",
        )
    )
    step = float(cfg["fit"].get("step_scale", 0.9)) / float(squared.eigenvalues[0] ** 2)
    epochs = int(cfg["fit"].get("epochs", 400))
    inputs = spectral.BoundInputs(
        step_size=step,
        eigenvalues=squared.eigenvalues,
        eigenvectors=squared.eigenvectors,
        bandwidth=bandwidth,
        subspace_error=subspace_error,
        width_tolerance=float(cfg.get("width_tolerance", 0.05)),
        clean_signal=x0,
        observed_signal=observed,
        noise=noise,
    )
    positive = squared.eigenvalues[squared.eigenvalues > 1e-12]
    requirement = spectral.width_requirement(
        float(positive[0]), float(positive[-1]), inputs.width_tolerance, graph.n_nodes
    )
    print(f"worst-case width requirement: 10^{requirement.log10_features:.2f} features")
    fit_cfg = models.FitConfig(
        epochs=epochs, step_size=step, optimizer="plain-gd", record_reference=x0
    )
    trajectory = models.fit(model, observed, fit_cfg)
    norm0 = float(np.linalg.norm(x0))
    rows = []
    for epoch in range(epochs + 1):
        terms = spectral.fit_error_bound(inputs, epoch)
        observed_error = float(np.sqrt(trajectory.nmses[epoch]) * norm0)
        rows.append(
            (
                epoch,
                terms.term_signal,
                terms.term_width,
                terms.term_noise,
                terms.total,
                observed_error,
            )
        )
    return write_csv(Path(out_dir) / "bound_curve.csv", BOUND_HEADER, rows)


# ---------------------------------------------------------------------------
# denoise-file


def _denoise_with_method(name, method_cfg, ctx, observed, master, method_idx, signal_idx):
    kind = method_cfg.get("kind", name)
    if kind == "bl":
        return baselines.bl_denoise(ctx.spectrum, observed, int(method_cfg.get("bandwidth", 8)))
    if kind == "lr":
        return baselines.lr_denoise(ctx.graph, observed, float(method_cfg.get("alpha", 1.0)))
    if kind == "tv":
        return baselines.tv_denoise(
            ctx.graph,
            observed,
            float(method_cfg.get("alpha", 1.0)),
            iters=int(method_cfg.get("iters", 2000)),
            step=float(method_cfg.get("step", 0.5)),
        )
    if kind == "med":
        return baselines.med_denoise(ctx.graph, observed, passes=int(method_cfg.get("passes", 1)))
    if kind in models.MODEL_KINDS:
        model = build_model(
            method_cfg,
            ctx,
            derive_seed(master, ROLE_FILTER, SHARED_SLOT, method_idx),
            derive_seed(master, ROLE_MODEL, SHARED_SLOT, method_idx, signal_idx),
        )
        fit_cfg = fit_config_from(method_cfg.get("fit", {}), model)
        trajectory = models.fit(model, observed, fit_cfg)
        return trajectory.estimate
    raise ConfigError(f"unknown denoising method {kind!r}")


def run_denoise_file(cfg, out_dir, jobs=1):
    """Denoise each signal of a CSV file with every configured method."""
    graph = load_edge_list(cfg["graph_file"])
    ctx = GraphContext(graph)
    names, observed = load_signals(cfg["signal_file"], n_nodes=graph.n_nodes)
    reference = None
    if cfg.get("reference_file"):
        ref_names, reference = load_signals(cfg["reference_file"], n_nodes=graph.n_nodes)
        if reference.shape != observed.shape:
            raise DataFormatError(
                f"{cfg['reference_file']}: expected {observed.shape[1]} reference columns"
            )
    master = cfg["master_seed"]

    rows = []
    estimate_header = ["node"]
    estimate_columns = []
    for signal_idx, signal_name in enumerate(names):
        for method_idx, (method_name, method_cfg) in enumerate(sorted(cfg["methods"].items())):
            estimate = _denoise_with_method(
                method_name, method_cfg, ctx, observed[:, signal_idx],
                master, method_idx, signal_idx,
            )
            estimate_header.append(f"{signal_name}__{method_name}")
            estimate_columns.append(estimate)
            if reference is None:
                rows.append((signal_name, method_name, "", ""))
                continue
            ref = reference[:, signal_idx]
            err = signals.nmse(ref, estimate)
            binary = np.all(np.isin(ref, (0.0, 1.0)))
            rate = signals.error_rate(ref, estimate) if binary else ""
            rows.append((signal_name, method_name, err, rate))
    results_path = write_csv(Path(out_dir) / "denoise_results.csv", DENOISE_HEADER, rows)
    estimate_rows = [
        (node, *(col[node] for col in estimate_columns)) for node in range(graph.n_nodes)
    ]
    estimates_path = write_csv(Path(out_dir) / "estimates.csv", estimate_header, estimate_rows)
    return results_path, estimates_path


# ---------------------------------------------------------------------------
# execution


def _map_trials(trial_fn, cfg, jobs):
    args = [(cfg, trial) for trial in range(cfg["trials"])]
    if jobs <= 1:
        return [trial_fn(a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(trial_fn, args))


def run_experiment(experiment, cfg, out_dir, jobs=1):
    """Dispatch one experiment id; returns the emitted path(s)."""
    runner = {
        "fit-curves": run_fit_curves,
        "eigsim": run_eigsim,
        "compare-bl": run_compare,
        "compare-dw": run_compare,
        "jacobian-check": run_jacobian_check,
        "bound-curve": run_bound_curve,
        "denoise-file": run_denoise_file,
    }[experiment]
    return runner(cfg, out_dir, jobs=jobs)


# ---------------------------------------------------------------------------
# defaults; values with no natural pin are calibration choices (see README)

ALPHA_GRID = [10.0**e for e in (-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0)]

DEFAULT_CONFIGS = {
    "fit-curves": {
        "trials": 100,
        "master_seed": 0,
        "graph": {
            "family": "sbm", "n": 64, "communities": 4,
            "p_in": 0.8, "p_out": 0.05, "per_trial": False,
        },
        "signal": {"kind": "piecewise-constant"},
        "noise": {"distribution": "gaussian", "power": 0.1},
        "models": {
            "gcg2": {"kind": "gcg2", "features": 128, "filter": {"kind": "binomial", "order": 3}},
            "gdec2": {"kind": "gdec2", "features": 128, "latent": 4, "gamma": 0.5},
        },
        "fit": {"epochs": 400, "step_size": 0.02, "optimizer": "adam"},
    },
    "eigsim": {
        "trials": 50,
        "master_seed": 0,
        "sizes": [32, 64, 128, 256],
        "families": [
            {"family": "sbm", "k": 4},
            {"family": "caveman", "k": 4},
            {"family": "regular", "k": 2},
            {"family": "small_world", "k": 2},
            {"family": "powerlaw_cluster", "k": 2},
        ],
        "filter": {"kind": "random-lowpass", "order": 3},
    },
    "compare-bl": {
        "trials": 50,
        "master_seed": 0,
        "graph": {"family": "sbm", "n": 256, "communities": 8, "p_in": 0.8, "p_out": 0.05},
        "signal": {"kind": "bandlimited", "bandwidth": 8},
        "noise": {"distribution": "gaussian", "power": 0.1},
        "baselines": {"alpha_grid": ALPHA_GRID, "bandwidth": 8, "tv_iters": 600, "tv_step": 0.1},
        "models": {
            "gcg2": {
                "kind": "gcg2", "features": 512,
                "filter": {"kind": "binomial", "order": 6},
                "fit": {"epochs": 60},
            },
            "gcg": {
                "kind": "gcg", "features": 64, "layers": 3, "init": "he-scaled",
                "filter": {"kind": "binomial", "order": 4},
                "fit": {"epochs": 200},
            },
            "gdec": {
                "kind": "gdec", "features": 64, "latent": 8, "layers": 3,
                "gamma": 0.3, "init": "he-scaled",
            },
        },
        "fit": {"epochs": 800, "step_size": 0.02, "optimizer": "adam"},
    },
    "compare-dw": {
        "trials": 50,
        "master_seed": 0,
        "graph": {"family": "sbm", "n": 256, "communities": 8, "p_in": 0.8, "p_out": 0.05},
        "signal": {"kind": "diffused-white", "filter": {"kind": "binomial", "order": 8}},
        "noise": {"distribution": "gaussian", "power": 0.1},
        "baselines": {"alpha_grid": ALPHA_GRID, "bandwidth": 8, "tv_iters": 600, "tv_step": 0.1},
        "models": {
            "gcg2": {
                "kind": "gcg2", "features": 512,
                "filter": {"kind": "binomial", "order": 6},
                "fit": {"epochs": 60},
            },
            "gcg": {
                "kind": "gcg", "features": 64, "layers": 3, "init": "he-scaled",
                "filter": {"kind": "binomial", "order": 4},
                "fit": {"epochs": 200},
            },
            "gdec": {
                "kind": "gdec", "features": 64, "latent": 8, "layers": 3,
                "gamma": 0.3, "init": "he-scaled",
            },
        },
        "fit": {"epochs": 800, "step_size": 0.02, "optimizer": "adam"},
    },
    "jacobian-check": {
        "trials": 1,
        "master_seed": 0,
        "graph": {"family": "sbm", "n": 32, "communities": 4, "p_in": 0.8, "p_out": 0.05},
        "kinds": ["gcg", "gdec"],
        "features": 64,
        "latent": 4,
        "gamma": 0.5,
        "sample_counts": [100, 1000, 10000],
        "filter": {"kind": "random-lowpass", "order": 3},
    },
    "bound-curve": {
        "trials": 1,
        "master_seed": 0,
        "graph": {"family": "sbm", "n": 64, "communities": 4, "p_in": 0.8, "p_out": 0.05},
        "signal": {"kind": "bandlimited", "bandwidth": 4},
        "noise": {"distribution": "gaussian", "power": 0.1},
        "model": {"kind": "gcg2", "features": 256, "filter": {"kind": "binomial", "order": 3}},
        "fit": {"epochs": 400, "step_scale": 0.9},
        "width_tolerance": 0.05,
    },
    "denoise-file": {
        "trials": 1,
        "master_seed": 0,
        "graph_file": None,
        "signal_file": None,
        "reference_file": None,
        "methods": {
            "bl": {"kind": "bl", "bandwidth": 8},
            "lr": {"kind": "lr", "alpha": 1.0},
            "gcg": {
                "kind": "gcg", "features": 64, "layers": 3, "init": "he-scaled",
                "filter": {"kind": "binomial", "order": 4},
                "fit": {"epochs": 800, "step_size": 0.02, "optimizer": "adam"},
            },
        },
    },
}
