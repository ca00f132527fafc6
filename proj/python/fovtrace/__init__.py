# fovtrace is licensed under the Apache License, Version 2.0.
# SPDX: Apache-2.0
"""Gaze-contingent foveated path tracer."""

from ._core import (
    DisplayGeometry,
    FoveationConfig,
    IoError,
    Region,
    RenderConfig,
    RenderMode,
    UsageError,
    ValidationError,
    build_task_list,
    classify_pixel,
    compute_budget,
    eccentricity_to_radius,
    error_map,
    load_render_config,
    postprocess,
    region_radii,
    render,
    run_cli,
    srgb_to_byte,
)

__all__ = [
    "DisplayGeometry",
    "FoveationConfig",
    "IoError",
    "Region",
    "RenderConfig",
    "RenderMode",
    "UsageError",
    "ValidationError",
    "build_task_list",
    "classify_pixel",
    "compute_budget",
    "eccentricity_to_radius",
    "error_map",
    "load_render_config",
    "postprocess",
    "region_radii",
    "render",
    "run_cli",
    "srgb_to_byte",
]
