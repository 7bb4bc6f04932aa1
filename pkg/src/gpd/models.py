"""Untrained graph generator networks and their fitting loop.

Two architectures produce a graph signal from a frozen random input by
alternating a fixed graph-aware linear operator with a learnable feature mix
and a ReLU (omitted in the last layer):

  "gcg"   deep convolutional generator: the operator is one graph filter H
  "gdec"  deep upsampling decoder: the operator at layer l is U(l), growing
          the latent size up to the node count
  "gcg2"  two-layer convolutional form relu(H Theta) b
  "gdec2" two-layer decoder form relu(U Theta) b

The two-layer forms absorb the random input into Theta and fix the output
mix to a balanced sign vector b. Gradients are computed by hand with reverse
accumulation; the ReLU subgradient at 0 is taken as 0.

init_model / mixing_vector: parameter initialization
forward: evaluate the network output
loss_and_gradient: squared-error loss and weight gradients
fit / FitConfig / FitTrajectory: full-batch gradient descent with a fixed
    epoch budget (early stopping = choosing that budget)
output_jacobian: rows of d output / d weights, one per node
save_checkpoint / load_checkpoint: JSON round trip keyed to operator hashes
"""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteLossError
from .signals import nmse

MODEL_KINDS = ("gcg", "gdec", "gcg2", "gdec2")

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class GeneratorModel:
    """Architecture state: fixed operators, frozen input, learnable weights.

    ``operators`` holds [H] repeated per layer for the convolutional kinds
    and the upsampling chain for the decoder kinds. ``z`` is frozen at
    initialization and never touched by fitting; ``mix`` is the fixed output
    vector b of the two-layer kinds (None otherwise).
    """

    kind: str
    operators: list
    weights: list
    z: np.ndarray | None = None
    mix: np.ndarray | None = None

    @property
    def n_outputs(self):
        return self.operators[-1].shape[0]

    @property
    def n_layers(self):
        return len(self.weights)

    @property
    def n_parameters(self):
        return sum(w.size for w in self.weights)

    def copy_weights(self):
        return [w.copy() for w in self.weights]


def mixing_vector(n_features):
    """Fixed output mix b: half the entries +1/sqrt(F), half -1/sqrt(F)."""
    if n_features % 2 != 0:
        raise ValueError("the two-layer forms need an even feature count")
    half = n_features // 2
    scale = 1.0 / np.sqrt(n_features)
    return np.concatenate([np.full(half, scale), np.full(half, -scale)])


def _weight_std(init_mode, fan_in):
    if init_mode == "standard-normal":
        return 1.0
    if init_mode == "he-scaled":
        return np.sqrt(2.0 / fan_in)
    raise ValueError(f"unknown init mode {init_mode!r}")


def init_model(kind, operators, widths, seed, init_mode="standard-normal"):
    """Build a model with Gaussian weights and a frozen Gaussian input.

    ``operators`` is the graph filter (single matrix, convolutional kinds)
    or the list of upsampling matrices (decoder kinds). ``widths`` is the
    per-layer feature chain [F0, ..., FL] for the deep kinds (FL must be 1)
    and a single even [F] for the two-layer kinds. Weight entries are iid
    zero-mean Gaussian with variance 1 ("standard-normal") or 2 / fan_in
    ("he-scaled"). The input z is drawn first, then the weights in layer
    order, so one seed pins the whole model.
    """
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}")
    rng = np.random.default_rng(seed)
    widths = [int(w) for w in widths]

    if kind in ("gcg2", "gdec2"):
        if len(widths) != 1:
            raise ValueError("two-layer kinds take a single feature width")
        (n_features,) = widths
        operator = np.asarray(operators[0] if isinstance(operators, (list, tuple)) else operators)
        mix = mixing_vector(n_features)
        std = _weight_std(init_mode, operator.shape[1])
        theta = rng.standard_normal((operator.shape[1], n_features)) * std
        return GeneratorModel(kind=kind, operators=[operator], weights=[theta], mix=mix)

    if len(widths) < 2:
        raise ValueError("deep kinds need at least input and output widths")
    if widths[-1] != 1:
        raise ValueError("deep kinds emit a single output feature")
    n_layers = len(widths) - 1
    if kind == "gcg":
        h = np.asarray(operators[0] if isinstance(operators, (list, tuple)) else operators)
        if h.shape[0] != h.shape[1]:
            raise ValueError("the graph filter must be square")
        ops = [h] * n_layers
    else:
        ops = [np.asarray(u) for u in operators]
        if len(ops) != n_layers:
            raise ValueError(f"{n_layers} layers need {n_layers} upsampling matrices")
        for a, b in zip(ops, ops[1:]):
            if b.shape[1] != a.shape[0]:
                raise ValueError("upsampling matrices do not chain dimensionally")
    z = rng.standard_normal((ops[0].shape[1], widths[0]))
    weights = []
    for fan_in, fan_out in zip(widths, widths[1:]):
        std = _weight_std(init_mode, fan_in)
        weights.append(rng.standard_normal((fan_in, fan_out)) * std)
    return GeneratorModel(kind=kind, operators=ops, weights=weights, z=z)


def _forward_cache(model):
    """Output plus per-layer (operator @ input, pre-activation) pairs."""
    if model.kind in ("gcg2", "gdec2"):
        pre = model.operators[0] @ model.weights[0]
        return np.maximum(pre, 0.0) @ model.mix, [pre]
    y = model.z
    caches = []
    last = model.n_layers - 1
    for idx, (op, theta) in enumerate(zip(model.operators, model.weights)):
        mixed = op @ y
        pre = mixed @ theta
        caches.append((mixed, pre))
        y = pre if idx == last else np.maximum(pre, 0.0)
    return y[:, 0], caches


def forward(model):
    """Network output as a graph signal (repeatable: no hidden state)."""
    return _forward_cache(model)[0]


def loss_and_gradient(model, x):
    """Loss 0.5 ||x - forward||^2 and its gradient for every weight matrix."""
    _, grads, loss = _evaluate(model, np.asarray(x, dtype=float))
    return loss, grads


def _evaluate(model, x):
    """Fused forward/backward pass: (estimate, gradients, loss)."""
    if model.kind in ("gcg2", "gdec2"):
        op = model.operators[0]
        pre = op @ model.weights[0]
        estimate = np.maximum(pre, 0.0) @ model.mix
        residual = estimate - x
        d_pre = np.outer(residual, model.mix) * (pre > 0.0)
        grads = [op.T @ d_pre]
        return estimate, grads, 0.5 * float(residual @ residual)

    estimate, caches = _forward_cache(model)
    residual = estimate - x
    grads = [None] * model.n_layers
    mixed, _ = caches[-1]
    d_pre = residual[:, None]
    grads[-1] = mixed.T @ d_pre
    d_y = model.operators[-1].T @ d_pre @ model.weights[-1].T
    for idx in range(model.n_layers - 2, -1, -1):
        mixed, pre = caches[idx]
        d_pre = d_y * (pre > 0.0)
        grads[idx] = mixed.T @ d_pre
        d_y = model.operators[idx].T @ d_pre @ model.weights[idx].T
    return estimate, grads, 0.5 * float(residual @ residual)


@dataclass
class FitConfig:
    """Fitting-loop controls.

    ``epochs`` is the fixed step budget T (records include epoch 0, so a fit
    produces T+1 records); ``optimizer`` is "plain-gd" or "adam" (moment
    constants 0.9 / 0.999, eps 1e-8). ``record_reference`` adds an NMSE
    trace against a clean signal. ``seed`` is carried for provenance only:
    the loop itself is deterministic.
    """

    epochs: int
    step_size: float
    optimizer: str = "adam"
    seed: int | None = None
    record_reference: np.ndarray | None = None

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.step_size <= 0.0:
            raise ValueError("step size must be positive")
        if self.optimizer not in ("plain-gd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


@dataclass
class FitTrajectory:
    """Per-epoch records plus the final state of a fit."""

    losses: np.ndarray
    nmses: np.ndarray | None
    estimate: np.ndarray
    final_weights: list = field(repr=False, default_factory=list)


def fit(model, x, cfg):
    """Fit the model to ``x`` with full-batch gradient steps.

    Runs ``cfg.epochs`` updates, recording the loss (and the NMSE against
    ``cfg.record_reference`` when given) before the first update and after
    every following one. The model weights are updated in place; ``z`` and
    the operators are never touched. Raises ``NonFiniteLossError`` as soon
    as the loss stops being finite.
    """
    x = np.asarray(x, dtype=float)
    reference = cfg.record_reference
    losses = np.empty(cfg.epochs + 1)
    nmses = np.empty(cfg.epochs + 1) if reference is not None else None

    if cfg.optimizer == "adam":
        m = [np.zeros_like(w) for w in model.weights]
        v = [np.zeros_like(w) for w in model.weights]

    estimate = None
    for epoch in range(cfg.epochs + 1):
        estimate, grads, loss = _evaluate(model, x)
        if not np.isfinite(loss):
            raise NonFiniteLossError(epoch)
        losses[epoch] = loss
        if reference is not None:
            nmses[epoch] = nmse(reference, estimate)
        if epoch == cfg.epochs:
            break
        if cfg.optimizer == "plain-gd":
            for w, g in zip(model.weights, grads):
                w -= cfg.step_size * g
        else:
            step = epoch + 1
            for w, g, m_w, v_w in zip(model.weights, grads, m, v):
                m_w *= ADAM_BETA1
                m_w += (1.0 - ADAM_BETA1) * g
                v_w *= ADAM_BETA2
                v_w += (1.0 - ADAM_BETA2) * g * g
                m_hat = m_w / (1.0 - ADAM_BETA1**step)
                v_hat = v_w / (1.0 - ADAM_BETA2**step)
                w -= cfg.step_size * m_hat / (np.sqrt(v_hat) + ADAM_EPS)

    return FitTrajectory(
        losses=losses,
        nmses=nmses,
        estimate=estimate,
        final_weights=model.copy_weights(),
    )


def output_jacobian(model):
    """Matrix of d output[i] / d weights, one row per output node.

    Columns follow the C-order flattening of each weight matrix, layer by
    layer. Intended for moderate sizes (the row count is the node count and
    the column count the parameter count).
    """
    if model.kind in ("gcg2", "gdec2"):
        op = model.operators[0]
        pre = op @ model.weights[0]
        gate = (pre > 0.0) * model.mix
        jac = op[:, :, None] * gate[:, None, :]
        return jac.reshape(model.n_outputs, -1)

    _, caches = _forward_cache(model)
    n = model.n_outputs
    blocks = [None] * model.n_layers
    cotangent = np.eye(n)[:, :, None]
    for idx in range(model.n_layers - 1, -1, -1):
        mixed, pre = caches[idx]
        if idx < model.n_layers - 1:
            cotangent = cotangent * (pre > 0.0)[None, :, :]
        blocks[idx] = np.einsum("ra,orb->oab", mixed, cotangent).reshape(n, -1)
        if idx > 0:
            cotangent = np.einsum(
                "rn,orb,cb->onc", model.operators[idx], cotangent, model.weights[idx]
            )
    return np.concatenate(blocks, axis=1)


def output_jacobian_fd(model, step):
    """Central-difference version of ``output_jacobian`` (test oracle)."""
    columns = []
    for w in model.weights:
        flat = w.reshape(-1)
        for k in range(flat.size):
            keep = flat[k]
            flat[k] = keep + step
            plus = forward(model)
            flat[k] = keep - step
            minus = forward(model)
            flat[k] = keep
            columns.append((plus - minus) / (2.0 * step))
    return np.stack(columns, axis=1)


def _operator_hash(matrix):
    data = np.ascontiguousarray(matrix, dtype=float).tobytes()
    return hashlib.sha256(data).hexdigest()


def save_checkpoint(model, path, seed=None):
    """Reproducibility record: weights, fixed vectors, operator hashes.

    Weights and the frozen input are stored as JSON number lists (exact for
    finite doubles); operators are recorded only through their SHA-256 so a
    checkpoint can be validated against the graph it came from.
    """
    payload = {
        "kind": model.kind,
        "seed": seed,
        "operator_sha256": [_operator_hash(op) for op in model.operators],
        "weights": [w.tolist() for w in model.weights],
        "z": None if model.z is None else model.z.tolist(),
        "mix": None if model.mix is None else model.mix.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")
    return path


def load_checkpoint(path, operators):
    """Rebuild a model from a checkpoint, verifying the operator hashes."""
    with open(path) as fh:
        payload = json.load(fh)
    ops = [np.asarray(op, dtype=float) for op in operators]
    hashes = [_operator_hash(op) for op in ops]
    if hashes != payload["operator_sha256"]:
        raise ValueError("operators do not match the checkpoint hashes")
    return GeneratorModel(
        kind=payload["kind"],
        operators=ops,
        weights=[np.asarray(w, dtype=float) for w in payload["weights"]],
        z=None if payload["z"] is None else np.asarray(payload["z"], dtype=float),
        mix=None if payload["mix"] is None else np.asarray(payload["mix"], dtype=float),
    )
