#pragma once

// Image quality metrics. PSNR/SSIM operate on [0,1] images; use to_unit to
// map the [-1,1] frame convention first.

#include "dckgen/synthdata.hpp"
#include "dckgen/tensor.hpp"

namespace dckgen {

// (v+1)/2, clamped to [0,1]
Tensor to_unit(const Tensor& img);

// 10*log10(1/MSE) over all elements; capped at 99 dB when MSE < 1e-10.
double psnr(const Tensor& a, const Tensor& b);

// Mean SSIM over 8x8 windows with stride 4 (and over channels for (C,H,W)
// inputs); c1 = 0.01^2, c2 = 0.03^2. Requires H,W >= 8.
double ssim(const Tensor& a, const Tensor& b);

// |measured mouth semi-axis - truth_aperture * mouth_max_px| in pixels.
double aperture_distance(const Tensor& frame, float truth_aperture, const Identity& id,
                         const PoseFrame& pose, int resolution);

}  // namespace dckgen
