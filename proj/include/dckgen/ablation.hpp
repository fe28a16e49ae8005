#pragma once

// Translation-sensitivity probe: shift the input frames vertically, rerun the
// generator with the same driving windows, shift the output back, and measure
// the deviation from the unshifted run inside a central interior region.

#include <vector>

#include "dckgen/generator.hpp"
#include "dckgen/synthdata.hpp"

namespace dckgen {

// Interior margin in px for probe comparisons; exceeds the largest probe
// shift (20% of a 64 px frame) so the compared region never contains
// rows vacated by the shift.
constexpr int kProbeInteriorMargin = 14;

// Shift (N,C,H,W) frames vertically by dy pixels (positive = up), filling
// vacated rows with the background value 0. |dy| must be < H.
Tensor shift_frames(const Tensor& frames, int dy);

struct TranslationProbeRow {
    double rate = 0;             // shift as a fraction of frame height
    int shift_px = 0;            // round(rate * H)
    double interior_delta = 0;   // mean |unshifted output - baseline| in the interior
    double aperture_err_px = 0;  // mean aperture error vs the clip's own track
};

// Reconstruction-mode probe (the clip drives itself). Every rate must lie in
// [0, 0.2]; rate 0 reproduces the baseline exactly.
std::vector<TranslationProbeRow> translation_probe(const Generator& gen, const SyntheticClip& clip,
                                                   const std::vector<double>& rates);

}  // namespace dckgen
