"""End-to-end desk-scale experiments: the acceleration study, the calibration
trend across acceleration rates, and the unstructured negative control.

All randomness is seeded, so every run of these functions is reproducible;
scripts/run_baselines.py freezes the resulting margins as regression
thresholds for the acceptance suite.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .calib import SGM, CalibrationError, calc_freq_params, calc_lambda_pair, freq_power_stats, ratio_grid
from .core import ImageDataset
from .filters import DCT, DFT, build_freq_mask
from .sampler import SamplerConfig, sample_batch
from .scores import EmpiricalScore, geometric_levels
from .synthdata import FACE_LIKE, LOW_FREQ_BLOBS, UNSTRUCTURED, SynthSpec, generate
from .validate import sliced_wasserstein, spectral_deviation

SHAPE = (1, 32, 32)
DATASET_SIZE = 500
# Per-cell ratio noise at 200 samples (the calibration default) can push the
# upper quantiles above the kappa plateau on this small grid; 400 keeps the
# radial trend dominant so the quantile crossings exist.
N_SAMPLES = 400
REF_STEPS = 2000
FAST_STEPS = 200
LEVELS = 10
SIGMA_MAX = 2.0
SIGMA_MIN = 0.05
EPS0 = 3.5e-4

STRUCTURED_SPEC = SynthSpec(LOW_FREQ_BLOBS, DATASET_SIZE, SHAPE, spectral_decay=2.0, seed=101)
UNSTRUCTURED_SPEC = SynthSpec(UNSTRUCTURED, DATASET_SIZE, SHAPE, seed=202)

BASELINE_PATH = Path(__file__).resolve().parents[2] / "baselines" / "acceptance_margins.json"


def pipeline_config(total_steps: int) -> SamplerConfig:
    """Schedule for the toy pipeline: step sizes scale with the iteration reduction
    so the accumulated step budget matches the reference run."""
    if total_steps % LEVELS != 0:
        raise ValueError(f"total_steps must be a multiple of {LEVELS}")
    levels = geometric_levels(SIGMA_MAX, SIGMA_MIN, LEVELS, total_steps // LEVELS)
    return SamplerConfig(levels=levels, eps0=EPS0, accel_factor=REF_STEPS / total_steps)


def generate_samples(model, total_steps: int, n_samples: int, master_seed: int,
                     freq=None) -> ImageDataset:
    cfg = pipeline_config(total_steps)
    x = sample_batch(model, cfg, master_seed, n_samples, freq=freq, shape=SHAPE)
    return ImageDataset(x)


def calibrate_from_sets(generated: ImageDataset, reference: ImageDataset,
                        transform: str = DCT, direction: str = SGM):
    g = ratio_grid(freq_power_stats(generated, transform), freq_power_stats(reference, transform))
    return calc_freq_params(g, direction, transform)


def run_acceleration_experiment(spec: SynthSpec = STRUCTURED_SPEC,
                                n_samples: int = N_SAMPLES) -> dict:
    """Reference at T=2000, vanilla and filtered runs at T=200 (10x), filter
    parameters calibrated from the degraded vanilla run. Returns all metrics."""
    ds = generate(spec)
    model = EmpiricalScore(ds)
    reference = generate_samples(model, REF_STEPS, n_samples, master_seed=1000)
    vanilla = generate_samples(model, FAST_STEPS, n_samples, master_seed=2000)
    params = calibrate_from_sets(vanilla, reference, DCT, SGM)
    freq = build_freq_mask(params, spec.shape)
    # Same master seed as the vanilla run: a paired comparison on shared noise.
    filtered = generate_samples(model, FAST_STEPS, n_samples, master_seed=2000, freq=freq)
    result = {
        "params": {"lambda1": params.lambda1, "lambda2": params.lambda2,
                   "r1": params.r1, "r2": params.r2},
        "spectral_deviation_vanilla": spectral_deviation(vanilla, reference, DCT),
        "spectral_deviation_tdas": spectral_deviation(filtered, reference, DCT),
        "sliced_wasserstein_vanilla": sliced_wasserstein(vanilla, reference, 64, seed=7),
        "sliced_wasserstein_tdas": sliced_wasserstein(filtered, reference, 64, seed=7),
    }
    result["spectral_margin"] = (
        result["spectral_deviation_vanilla"] - result["spectral_deviation_tdas"]
    )
    result["sw_margin"] = (
        result["sliced_wasserstein_vanilla"] - result["sliced_wasserstein_tdas"]
    )
    return result


def run_negative_control(n_samples: int = N_SAMPLES) -> dict:
    """Same pipeline on the unstructured dataset; reports the absolute change in
    sliced Wasserstein that filtering causes when the spectral prior is absent.

    On white-noise data the ratio grid is flat, so the radius scan typically
    finds no quantile crossing; calibration then declines to suppress anything
    and the run proceeds with the identity filter.
    """
    ds = generate(UNSTRUCTURED_SPEC)
    model = EmpiricalScore(ds)
    reference = generate_samples(model, REF_STEPS, n_samples, master_seed=1000)
    vanilla = generate_samples(model, FAST_STEPS, n_samples, master_seed=2000)
    try:
        params = calibrate_from_sets(vanilla, reference, DCT, SGM)
        freq = build_freq_mask(params, UNSTRUCTURED_SPEC.shape)
        calibration_failed = False
    except CalibrationError:
        freq = None
        calibration_failed = True
    filtered = generate_samples(model, FAST_STEPS, n_samples, master_seed=2000, freq=freq)
    sw_van = sliced_wasserstein(vanilla, reference, 64, seed=7)
    sw_tdas = sliced_wasserstein(filtered, reference, 64, seed=7)
    return {
        "calibration_failed": calibration_failed,
        "sliced_wasserstein_vanilla": sw_van,
        "sliced_wasserstein_tdas": sw_tdas,
        "sw_change": abs(sw_van - sw_tdas),
    }


def run_calibration_trend(iteration_counts=(400, 200, 100, 50),
                          n_samples: int = N_SAMPLES, transform: str = DFT) -> list[dict]:
    """Calibrated (lambda1, lambda2) per generating iteration count, against a
    shared large-T reference. Fewer iterations mean more high-frequency excess,
    so both lambdas should fall as the counts shrink."""
    ds = generate(STRUCTURED_SPEC)
    model = EmpiricalScore(ds)
    reference = generate_samples(model, REF_STEPS, n_samples, master_seed=1000)
    ref_stats = freq_power_stats(reference, transform)
    rows = []
    for steps in iteration_counts:
        gen = generate_samples(model, steps, n_samples, master_seed=3000 + steps)
        g = ratio_grid(freq_power_stats(gen, transform), ref_stats)
        # The lambda rule stands on the quantiles alone; the mildest runs may
        # legitimately have no radius crossing, which the trend does not need.
        lam1, lam2 = calc_lambda_pair(g, SGM)
        row = {"iterations": steps, "lambda1": lam1, "lambda2": lam2}
        try:
            p = calc_freq_params(g, SGM, transform)
            row.update(r1=p.r1, r2=p.r2)
        except CalibrationError:
            pass
        rows.append(row)
    return rows


def filter_overhead_bench(sizes=(256, 512, 1024), repeats: int = 10, channels: int = 3,
                          transform: str = DFT) -> list[dict]:
    """Median wall time of one filtered-noise application per grid size."""
    import time

    from .core import NoiseSource
    from .filters import FreqFilterParams, apply_tdas, build_freq_mask, identity_space_mask

    src = NoiseSource(0)
    cases = []
    for n in sizes:
        shape = (channels, n, n)
        params = FreqFilterParams(0.9, 0.8, 0.3, 0.45, transform=transform)
        freq = build_freq_mask(params, shape)
        space = identity_space_mask(shape)
        z = src.normal(shape)
        apply_tdas(z, space, freq, transform)  # warm the FFT plan cache
        cases.append((n, z, space, freq, []))
    # Interleave the sizes within each round so machine-load drift during the
    # run affects every size alike and cancels in timing ratios.
    for _ in range(repeats):
        for n, z, space, freq, times in cases:
            t0 = time.perf_counter()
            apply_tdas(z, space, freq, transform)
            times.append(time.perf_counter() - t0)
    return [
        {"size": n, "median_seconds": float(np.median(times))}
        for n, _, _, _, times in cases
    ]


def load_baselines(path=BASELINE_PATH) -> dict:
    return json.loads(Path(path).read_text())


def write_baselines(results: dict, path=BASELINE_PATH) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(results, indent=2) + "\n")
