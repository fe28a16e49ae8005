#pragma once

// Raw neural-net ops on Tensor (forward + explicit backward). The autodiff
// layer wraps these; bound-verification code calls them directly.

#include "dckgen/tensor.hpp"

namespace dckgen::ops {

enum class PadMode { Zero, Circular };
enum class ActKind { LeakyRelu, Tanh, Sigmoid };

const char* act_name(ActKind k);
float act_eval(ActKind k, float slope, float x);
// Lipschitz constant of the activation (1, 1, 0.25).
double act_lipschitz(ActKind k, float slope);

struct Conv2dSpec {
    int stride = 1;
    int padding = 0;
    int groups = 1;
    PadMode pad = PadMode::Zero;
};

// x (N,C,H,W), w (OC, C/groups, KH, KW), bias (OC) or null.
// out (N, OC, HO, WO), HO = floor((H + 2p - KH)/s) + 1.
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor* bias, const Conv2dSpec& spec);
void conv2d_backward(const Tensor& x, const Tensor& w, const Conv2dSpec& spec, const Tensor& gout,
                     Tensor* gx, Tensor* gw, Tensor* gb);

// Transposed conv. w (IC, OC, KH, KW); out HO = (H-1)*s - 2p + KH.
Tensor tconv2d(const Tensor& x, const Tensor& w, const Tensor* bias, int stride, int padding,
               PadMode pad);
void tconv2d_backward(const Tensor& x, const Tensor& w, int stride, int padding, PadMode pad,
                      const Tensor& gout, Tensor* gx, Tensor* gw, Tensor* gb);

// Elementwise activation. slope only used by LeakyRelu and must be in [0,1].
Tensor activation(const Tensor& x, ActKind kind, float slope = 0.0f);
// gx = gout * act'(x); y is the forward output (used for tanh/sigmoid).
Tensor activation_backward(const Tensor& x, const Tensor& y, ActKind kind, float slope,
                           const Tensor& gout);

// Per-(n,c) normalization over spatial dims, x (N,C,H,W), gain/offset (C).
Tensor instance_norm(const Tensor& x, const Tensor& gain, const Tensor& offset, float eps = 1e-5f);
void instance_norm_backward(const Tensor& x, const Tensor& gain, float eps, const Tensor& gout,
                            Tensor* gx, Tensor* ggain, Tensor* goffset);

// x (N, IN), w (OUT, IN), bias (OUT) or null -> (N, OUT).
Tensor linear(const Tensor& x, const Tensor& w, const Tensor* bias);
void linear_backward(const Tensor& x, const Tensor& w, const Tensor& gout, Tensor* gx, Tensor* gw,
                     Tensor* gb);

// (N,C,H,W) -> (N,C), mean over spatial dims.
Tensor global_avg_pool(const Tensor& x);
Tensor global_avg_pool_backward(const Tensor& x, const Tensor& gout);

// Nearest-neighbor upsampling by integer factor.
Tensor upsample_nearest(const Tensor& x, int factor);
Tensor upsample_nearest_backward(const Tensor& x, int factor, const Tensor& gout);

}  // namespace dckgen::ops
