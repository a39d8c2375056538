"""Spoil-pile segmentation toolkit: terrain preprocessing, three classical
segmenters, Hoover metrics and parameter sweeps.

Images are numpy arrays in row-major (height, width) order. RGB images are
uint8 with a trailing axis of 3; label maps are uint32 with 0 as background.
"""

import json

from ._core import (
    SpoilsegError,
    evaluate,
    hillshade,
    mean_shift_segment,
    normalize_mask,
    otsu_threshold,
    quantize8,
    read_pgm16,
    relabel_connected,
    relief8,
    rgb_to_lab,
    sigmoidal_stretch,
    slic,
    synth_pilefield,
    voronoi_segment,
    write_pgm16,
)
from ._core import run_sweep as _run_sweep
from ._core import run_sweep_arrays as _run_sweep_arrays

__all__ = [
    "SpoilsegError",
    "evaluate",
    "hillshade",
    "mean_shift_segment",
    "normalize_mask",
    "otsu_threshold",
    "quantize8",
    "read_pgm16",
    "relabel_connected",
    "relief8",
    "rgb_to_lab",
    "run_sweep",
    "sigmoidal_stretch",
    "slic",
    "sweep",
    "synth_pilefield",
    "voronoi_segment",
    "write_pgm16",
]


def run_sweep(config_path, threads=0):
    """Run the sweep described by a JSON config file; returns the report as a dict."""
    return json.loads(_run_sweep(str(config_path), threads))


def sweep(algorithm, grid, ground_truth, image=None, hillshade=None, fixed=None, threshold=0.5, threads=0):
    """Run a sweep on in-memory arrays; returns the report as a dict."""
    return json.loads(
        _run_sweep_arrays(algorithm, dict(grid), ground_truth, image, hillshade, dict(fixed or {}), threshold, threads)
    )
