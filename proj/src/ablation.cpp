#include "dckgen/ablation.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "dckgen/metrics.hpp"

namespace dckgen {

Tensor shift_frames(const Tensor& frames, int dy) {
    if (frames.rank() != 4)
        throw std::invalid_argument("shift_frames: want (N,C,H,W), got " +
                                    shape_str(frames.shape()));
    int64_t h = frames.dim(2), w = frames.dim(3);
    if (std::abs(dy) >= h)
        throw std::invalid_argument("shift_frames: |dy| must be < height");
    Tensor out(frames.shape());  // zero-filled: vacated rows keep the background
    int64_t planes = frames.dim(0) * frames.dim(1);
    for (int64_t pl = 0; pl < planes; ++pl)
        for (int64_t oy = 0; oy < h; ++oy) {
            int64_t sy = oy + dy;
            if (sy < 0 || sy >= h) continue;
            std::memcpy(out.data() + (pl * h + oy) * w, frames.data() + (pl * h + sy) * w,
                        sizeof(float) * w);
        }
    return out;
}

namespace {

double interior_mean_abs_diff(const Tensor& a, const Tensor& b, int margin) {
    int64_t h = a.dim(2), w = a.dim(3);
    if (2 * margin >= h || 2 * margin >= w)
        throw std::invalid_argument("translation_probe: frame smaller than interior margin");
    double acc = 0;
    int64_t count = 0;
    int64_t planes = a.dim(0) * a.dim(1);
    for (int64_t pl = 0; pl < planes; ++pl)
        for (int64_t y = margin; y < h - margin; ++y) {
            const float* pa = a.data() + (pl * h + y) * w;
            const float* pb = b.data() + (pl * h + y) * w;
            for (int64_t x = margin; x < w - margin; ++x) acc += std::fabs(pa[x] - pb[x]);
            count += w - 2 * margin;
        }
    return acc / (double)count;
}

}  // namespace

std::vector<TranslationProbeRow> translation_probe(const Generator& gen, const SyntheticClip& clip,
                                                   const std::vector<double>& rates) {
    int r = gen.spec().resolution;
    if (clip.frames.rank() != 4 || clip.frames.dim(2) != r)
        throw std::invalid_argument("translation_probe: clip resolution mismatch");
    int t_count = (int)clip.frames.dim(0);
    Tensor windows = signal_windows(clip.signal);
    Tensor base = gen.generate(clip.frames, windows);

    std::vector<TranslationProbeRow> rows;
    for (double rate : rates) {
        if (rate < 0.0 || rate > 0.2 + 1e-12)
            throw std::invalid_argument("translation_probe: rate must be in [0, 0.2]");
        TranslationProbeRow row;
        row.rate = rate;
        row.shift_px = (int)std::lround(rate * r);
        Tensor out = gen.generate(shift_frames(clip.frames, row.shift_px), windows);
        Tensor back = shift_frames(out, -row.shift_px);
        row.interior_delta = interior_mean_abs_diff(back, base, kProbeInteriorMargin);
        double ap = 0;
        for (int t = 0; t < t_count; ++t)
            ap += aperture_distance(slice_outer(back, t), clip.signal.aperture[t], clip.identity,
                                    clip.pose[t], r);
        row.aperture_err_px = ap / t_count;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace dckgen
