"""Denoising one observation with an untrained generator.

No training set: the network is initialized at random and fitted to the
single noisy signal. Because the architecture is graph-aware, it captures
the structured part quickly and the noise only much later, so stopping
early denoises. The script prints the error trajectory and compares the
early-stopped estimate against classical baselines.
"""

import numpy as np

from gpd import (
    FitConfig,
    NoiseSpec,
    SbmModel,
    add_noise,
    bl_denoise,
    fit,
    graph_filter,
    init_model,
    lr_denoise,
    nmse,
    normalize_adjacency,
    piecewise_constant_signal,
    sample_sbm,
    spectral_decomposition,
    tv_denoise,
)

model_spec = SbmModel.balanced(64, 4, p_in=0.8, p_out=0.05)
graph = sample_sbm(model_spec, seed=1)
adjacency = normalize_adjacency(graph)
spectrum = spectral_decomposition(adjacency)

clean = piecewise_constant_signal(model_spec.assignments)
observed, noise = add_noise(clean, NoiseSpec("gaussian", power=0.1), seed=2)
print(f"observation NMSE (doing nothing): {nmse(clean, observed):.4f}")

# two-layer convolutional generator over a steep low-pass filter
h = graph_filter(adjacency, np.array([1.0, 3.0, 3.0, 1.0]) / 8.0)
network = init_model("gcg2", [h], [128], seed=3)
trajectory = fit(
    network,
    observed,
    FitConfig(epochs=400, step_size=0.02, optimizer="adam", record_reference=clean),
)

best = int(np.argmin(trajectory.nmses))
print("\nNMSE while fitting the noisy observation:")
for epoch in (0, 25, 50, best, 200, 400):
    marker = "  <- early-stopping sweet spot" if epoch == best else ""
    print(f"  epoch {epoch:4d}: {trajectory.nmses[epoch]:.4f}{marker}")
print("fitting longer only reproduces the noise.")

print("\nbaselines on the same observation:")
print(f"  bandlimited projection: {nmse(clean, bl_denoise(spectrum, observed, 4)):.4f}")
print(f"  laplacian reg (alpha=1): {nmse(clean, lr_denoise(graph, observed, 1.0)):.4f}")
print(f"  total variation (alpha=1): {nmse(clean, tv_denoise(graph, observed, 1.0)):.4f}")
print(f"  untrained generator @ {best}: {trajectory.nmses[best]:.4f}")
