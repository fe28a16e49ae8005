#pragma once

// U-net generator with a dynamic-kernel middle stack, attention/motion output
// heads, and a patch discriminator. A concat-conditioning variant of the same
// net serves as the translation-sensitivity baseline.

#include <vector>

#include "dckgen/dck.hpp"

namespace dckgen {

// Half-open pixel rectangle [x0,x1) x [y0,y1).
struct Box {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
};

enum class Conditioning { DynamicKernels, ConcatAttention };

struct GeneratorSpec {
    int resolution = 64;
    int base_channels = 8;
    int feature_dim = 64;
    int down_layers = 5;
    int middle_layers = 4;
    int up_layers = 5;
    Conditioning conditioning = Conditioning::DynamicKernels;
    ops::PadMode pad = ops::PadMode::Zero;

    int mid_channels() const { return 4 * base_channels; }
    int down_out_channels(int i) const;  // i in [0, down_layers)
    int up_out_channels(int i) const;    // i in [0, up_layers)
    std::vector<DckLayerSpec> middle_specs() const;
    void validate() const;
};

struct GeneratorOut {
    Var alpha;   // (T,1,R,R) in (0,1)
    Var motion;  // (T,3,R,R) in (-1,1)
    Var blended; // (T,3,R,R)
    std::vector<Var> kernel_flat;  // dynamic-kernel mode: per middle layer (T, param_count)
};

// I' = I*(1-alpha) + M*alpha, alpha broadcast over channels.
Tensor blend(const Tensor& frames, const Tensor& alpha, const Tensor& motion);
Var blend(const Var& frames, const Var& alpha, const Var& motion);

// Paste the generated face region into the original frame: output equals
// `generated` inside the box and `original` outside it.
Tensor cover_background(const Tensor& generated, const Tensor& original, const Box& face_box);

class Generator {
public:
    Generator(GeneratorSpec spec, uint64_t seed);

    const GeneratorSpec& spec() const { return spec_; }
    ParamStore& params() { return ps_; }
    const ParamStore& params() const { return ps_; }

    // frames (T,3,R,R), windows (T,1,16,16)
    GeneratorOut forward(const Var& frames, const Var& windows) const;

    // Inference: returns the blended output (no gradient graph kept alive).
    Tensor generate(const Tensor& frames, const Tensor& windows) const;

    // Dynamic kernels for the given windows (DynamicKernels mode only).
    KernelBank infer_bank(const Tensor& windows) const;

    const SignalEncoder& encoder() const { return enc_; }
    const KernelHead& kernel_head() const { return head_; }

private:
    struct ConvLayer {
        Var w, b, gain, offset;
        bool norm = true;
    };

    GeneratorSpec spec_;
    ParamStore ps_;
    SignalEncoder enc_;
    KernelHead head_;                      // DynamicKernels mode
    Var audio_w_, audio_b_;           // ConcatAttention audio-map projection
    std::vector<Var> mid_w_, mid_b_;  // ConcatAttention static middles
    std::vector<ConvLayer> down_, up_;
    Var alpha_w_, alpha_b_, motion_w_, motion_b_;
};

// Patch discriminator: (N,3,R,R) -> (N,1,R/16,R/16); 4 stride-2 convs
// (instance norm except the first) + final 1x1 conv.
class Discriminator {
public:
    Discriminator(int resolution, int base_channels, uint64_t seed);

    ParamStore& params() { return ps_; }
    const ParamStore& params() const { return ps_; }
    Var forward(const Var& frames) const;

private:
    struct ConvLayer {
        Var w, b, gain, offset;
        bool norm = true;
    };
    int resolution_;
    ParamStore ps_;
    std::vector<ConvLayer> layers_;
    Var head_w_, head_b_;
};

}  // namespace dckgen
