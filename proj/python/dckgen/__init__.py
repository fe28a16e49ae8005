"""Python bindings for the dynamic-kernel talking-face core."""

from ._core import (
    Model,
    activation,
    blend,
    conv2d,
    dck_param_count,
    dynamic_conv,
    init_checkpoint,
    instance_norm,
    linear,
    lp_norm,
    nonexpansive_violations,
    output_bound_violations,
    psnr,
    render_face,
    signal_windows,
    ssim,
    tconv2d,
    to_unit,
    visualize_kernels,
)

__all__ = [
    "Model",
    "activation",
    "blend",
    "conv2d",
    "dck_param_count",
    "dynamic_conv",
    "init_checkpoint",
    "instance_norm",
    "linear",
    "lp_norm",
    "nonexpansive_violations",
    "output_bound_violations",
    "psnr",
    "render_face",
    "signal_windows",
    "ssim",
    "tconv2d",
    "to_unit",
    "visualize_kernels",
]
