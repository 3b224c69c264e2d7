"""Discrete Kahler geometry: curvature invariants, extremal flows and the Kempf-Ness sandbox."""

import json

from . import _core
from ._core import (
    Grid,
    InvalidInput,
    LinearAction,
    Metric,
    NumericalError,
    chern_numbers,
    command_names,
    kempf_ness_descend,
    kempf_ness_h,
    kernel,
    moment_map,
    perturbed_scalar,
    random_potential,
    run_flow,
    set_workers,
    sigma,
    workers,
)

__all__ = [
    "Grid",
    "InvalidInput",
    "LinearAction",
    "Metric",
    "NumericalError",
    "acceptance",
    "chern_numbers",
    "command_names",
    "kempf_ness_descend",
    "kempf_ness_h",
    "kernel",
    "moment_map",
    "perturbed_scalar",
    "random_potential",
    "run",
    "run_flow",
    "set_workers",
    "sigma",
    "workers",
]


def run(command, config="", out_dir="", write_files=False):
    """Run a CLI command on INI text; returns the report as a dict."""
    return json.loads(_core.run_command(command, config, out_dir, write_files))


def acceptance(only=(), seed=42):
    """Run acceptance criteria (all when only is empty); returns the suite report."""
    return json.loads(_core.run_acceptance(list(only), seed))
