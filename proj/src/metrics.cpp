#include "dckgen/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace dckgen {

Tensor to_unit(const Tensor& img) {
    Tensor out(img.shape());
    for (int64_t i = 0; i < img.numel(); ++i) {
        float v = (img[i] + 1.0f) * 0.5f;
        out[i] = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
    }
    return out;
}

double psnr(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("psnr: shape mismatch " + shape_str(a.shape()) + " vs " +
                                    shape_str(b.shape()));
    if (a.numel() == 0) throw std::invalid_argument("psnr: empty tensors");
    double mse = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i) {
        double d = (double)a[i] - (double)b[i];
        mse += d * d;
    }
    mse /= (double)a.numel();
    if (mse < 1e-10) return 99.0;
    return 10.0 * std::log10(1.0 / mse);
}

namespace {

double ssim_plane(const float* a, const float* b, int64_t H, int64_t W) {
    constexpr int win = 8, stride = 4;
    constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    if (H < win || W < win)
        throw std::invalid_argument("ssim: image smaller than the 8x8 window");
    double acc = 0.0;
    int64_t count = 0;
    for (int64_t y = 0; y + win <= H; y += stride)
        for (int64_t x = 0; x + win <= W; x += stride) {
            double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
            for (int64_t i = 0; i < win; ++i)
                for (int64_t j = 0; j < win; ++j) {
                    double va = a[(y + i) * W + x + j];
                    double vb = b[(y + i) * W + x + j];
                    sa += va;
                    sb += vb;
                    saa += va * va;
                    sbb += vb * vb;
                    sab += va * vb;
                }
            const double n = win * win;
            double ma = sa / n, mb = sb / n;
            double va = saa / n - ma * ma, vb = sbb / n - mb * mb;
            double cov = sab / n - ma * mb;
            double s = ((2 * ma * mb + c1) * (2 * cov + c2)) /
                       ((ma * ma + mb * mb + c1) * (va + vb + c2));
            acc += s;
            ++count;
        }
    return acc / (double)count;
}

}  // namespace

double ssim(const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("ssim: shape mismatch " + shape_str(a.shape()) + " vs " +
                                    shape_str(b.shape()));
    if (a.rank() == 2) return ssim_plane(a.data(), b.data(), a.dim(0), a.dim(1));
    if (a.rank() == 3) {
        int64_t C = a.dim(0), H = a.dim(1), W = a.dim(2);
        double acc = 0.0;
        for (int64_t c = 0; c < C; ++c)
            acc += ssim_plane(a.data() + c * H * W, b.data() + c * H * W, H, W);
        return acc / (double)C;
    }
    throw std::invalid_argument("ssim: want (H,W) or (C,H,W), got " + shape_str(a.shape()));
}

double aperture_distance(const Tensor& frame, float truth_aperture, const Identity& id,
                         const PoseFrame& pose, int resolution) {
    double measured = measure_aperture_px(frame, id, pose, resolution);
    double truth = (double)truth_aperture * mouth_max_px(resolution);
    return std::fabs(measured - truth);
}

}  // namespace dckgen
