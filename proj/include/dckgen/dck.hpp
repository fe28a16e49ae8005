#pragma once

// Dynamic convolution kernels: a small signal encoder produces a per-frame
// feature, a kernel head maps the feature to per-frame conv weights + biases,
// and dynamic_conv applies those kernels to that frame's activations.

#include "dckgen/autodiff.hpp"
#include "dckgen/params.hpp"
#include "dckgen/rng.hpp"
#include "dckgen/tensor.hpp"

namespace dckgen {

struct DckLayerSpec {
    int c1 = 0;        // out channels
    int c2 = 0;        // in channels
    int ks = 1;        // square kernel, odd (same padding)
    int position = 0;  // index within the middle stack

    // flattened parameters per frame: weights + one bias per out channel
    int64_t param_count() const { return (int64_t)c1 * ((int64_t)c2 * ks * ks + 1); }
};

// Per-frame kernels for one layer: weights (T,c1,c2,ks,ks), bias (T,c1).
struct KernelBankLayer {
    DckLayerSpec spec;
    Tensor weights;
    Tensor bias;
};

struct KernelBank {
    std::vector<KernelBankLayer> layers;
};

// Split a flat head output (T, param_count) into weights/bias tensors.
KernelBankLayer split_dynamic_params(const Tensor& flat, const DckLayerSpec& spec);

// Apply per-frame kernels: x (T,c2,H,W) -> (T,c1,H,W), stride 1, same padding.
// Realized as one grouped convolution with groups = T.
Tensor dynamic_conv(const Tensor& x, const KernelBankLayer& layer);
// Autodiff variant taking the flat head output (T, param_count).
Var dynamic_conv(const Var& x, const Var& flat, const DckLayerSpec& spec,
                 ops::PadMode pad = ops::PadMode::Zero);

// 1x1 kernels of one frame, (c1,c2,1,1) -> grayscale (c1,c2) min-max
// normalized to [0,1]; a constant tensor maps to mid-gray 0.5. ks>1 rejected.
Tensor visualize_kernels(const Tensor& weights_one_frame);

// Signal encoder ("h1" stand-in): (N,1,16,16) window -> (N,feature_dim).
// Three stride-2 convs + global average pool + linear.
struct SignalEncoder {
    int feature_dim = 64;
    Var w1, b1, w2, b2, w3, b3, wl, bl;

    void init(ParamStore& ps, Rng& rng, const std::string& prefix, int feature_dim_);
    Var forward(const Var& windows) const;
};

// Kernel head ("h2"): shared hidden linear (256, leaky 0.2), then one linear
// head per DCK layer. The head bias encodes a near-identity kernel (diagonal
// taps 1, dynamic-conv bias slots at init_dyn_bias) and the head weights carry
// a small random projection, so kernels vary with the signal from step 0.
struct KernelHead {
    std::vector<DckLayerSpec> specs;
    Var hidden_w, hidden_b;
    std::vector<Var> head_w, head_b;

    void init(ParamStore& ps, Rng& rng, const std::string& prefix, int feature_dim,
              std::vector<DckLayerSpec> specs_, float init_dyn_bias);
    // one flat (N, param_count) output per DCK layer
    std::vector<Var> forward(const Var& feature) const;
};

// Convenience non-autodiff path: windows -> KernelBank.
KernelBank infer_kernels(const SignalEncoder& enc, const KernelHead& head, const Tensor& windows);

}  // namespace dckgen
