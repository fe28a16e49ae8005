// numpy-bridged bindings for the core operations plus a checkpoint-backed
// Model wrapper. Arrays are copied at the boundary (tensors are small).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "dckgen/bounds.hpp"
#include "dckgen/checkpoint.hpp"
#include "dckgen/dck.hpp"
#include "dckgen/metrics.hpp"
#include "dckgen/nn_ops.hpp"
#include "dckgen/synthdata.hpp"
#include "dckgen/training.hpp"

namespace py = pybind11;
using namespace dckgen;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

Tensor from_array(const FloatArray& a) {
    std::vector<int64_t> shape(a.ndim());
    for (py::ssize_t i = 0; i < a.ndim(); ++i) shape[(size_t)i] = a.shape(i);
    Tensor t(std::move(shape));
    std::copy(a.data(), a.data() + a.size(), t.data());
    return t;
}

py::array_t<float> to_array(const Tensor& t) {
    std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
    py::array_t<float> a(shape);
    std::copy(t.data(), t.data() + t.numel(), a.mutable_data());
    return a;
}

const Tensor* opt_ptr(const std::optional<Tensor>& t) { return t ? &*t : nullptr; }

std::optional<Tensor> opt_tensor(const std::optional<FloatArray>& a) {
    if (!a) return std::nullopt;
    return from_array(*a);
}

ops::ActKind act_from_name(const std::string& name) {
    if (name == "leaky_relu") return ops::ActKind::LeakyRelu;
    if (name == "tanh") return ops::ActKind::Tanh;
    if (name == "sigmoid") return ops::ActKind::Sigmoid;
    throw std::invalid_argument("unknown activation: " + name);
}

// Generator restored from a checkpoint directory.
class Model {
public:
    explicit Model(const std::string& checkpoint_dir)
        : cfg_(load_checkpoint_config(checkpoint_dir)),
          gen_(generator_spec_from_config(cfg_), cfg_.seed) {
        load_checkpoint_params(checkpoint_dir, gen_.params());
    }

    py::array_t<float> generate(const FloatArray& frames, const FloatArray& windows) const {
        return to_array(gen_.generate(from_array(frames), from_array(windows)));
    }

    int resolution() const { return cfg_.resolution; }
    std::string kind() const { return cfg_.model; }
    int64_t param_count() const { return gen_.params().total_count(); }

private:
    TrainConfig cfg_;
    Generator gen_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "dynamic-kernel talking-face core operations";

    m.def(
        "conv2d",
        [](const FloatArray& x, const FloatArray& w, const std::optional<FloatArray>& bias,
           int stride, int padding, int groups, bool circular) {
            ops::Conv2dSpec spec;
            spec.stride = stride;
            spec.padding = padding;
            spec.groups = groups;
            spec.pad = circular ? ops::PadMode::Circular : ops::PadMode::Zero;
            auto b = opt_tensor(bias);
            return to_array(ops::conv2d(from_array(x), from_array(w), opt_ptr(b), spec));
        },
        py::arg("x"), py::arg("w"), py::arg("bias") = std::nullopt, py::arg("stride") = 1,
        py::arg("padding") = 0, py::arg("groups") = 1, py::arg("circular") = false);

    m.def(
        "tconv2d",
        [](const FloatArray& x, const FloatArray& w, const std::optional<FloatArray>& bias,
           int stride, int padding, bool circular) {
            auto b = opt_tensor(bias);
            return to_array(ops::tconv2d(from_array(x), from_array(w), opt_ptr(b), stride,
                                         padding,
                                         circular ? ops::PadMode::Circular : ops::PadMode::Zero));
        },
        py::arg("x"), py::arg("w"), py::arg("bias") = std::nullopt, py::arg("stride") = 1,
        py::arg("padding") = 0, py::arg("circular") = false);

    m.def(
        "activation",
        [](const FloatArray& x, const std::string& kind, float slope) {
            return to_array(ops::activation(from_array(x), act_from_name(kind), slope));
        },
        py::arg("x"), py::arg("kind") = "leaky_relu", py::arg("slope") = 0.0f);

    m.def(
        "instance_norm",
        [](const FloatArray& x, const FloatArray& gain, const FloatArray& offset) {
            return to_array(ops::instance_norm(from_array(x), from_array(gain),
                                               from_array(offset)));
        },
        py::arg("x"), py::arg("gain"), py::arg("offset"));

    m.def(
        "linear",
        [](const FloatArray& x, const FloatArray& w, const std::optional<FloatArray>& bias) {
            auto b = opt_tensor(bias);
            return to_array(ops::linear(from_array(x), from_array(w), opt_ptr(b)));
        },
        py::arg("x"), py::arg("w"), py::arg("bias") = std::nullopt);

    m.def(
        "lp_norm", [](const FloatArray& x, int p) { return lp_norm(from_array(x), p); },
        py::arg("x"), py::arg("p") = 2);

    m.def(
        "dynamic_conv",
        [](const FloatArray& x, const FloatArray& flat, int c1, int c2, int ks) {
            DckLayerSpec spec{c1, c2, ks, 0};
            KernelBankLayer layer = split_dynamic_params(from_array(flat), spec);
            return to_array(dynamic_conv(from_array(x), layer));
        },
        py::arg("x"), py::arg("flat"), py::arg("c1"), py::arg("c2"), py::arg("ks") = 1);

    m.def("dck_param_count", [](int c1, int c2, int ks) {
        return DckLayerSpec{c1, c2, ks, 0}.param_count();
    });

    m.def(
        "visualize_kernels",
        [](const FloatArray& w) { return to_array(visualize_kernels(from_array(w))); },
        py::arg("weights_one_frame"));

    m.def(
        "blend",
        [](const FloatArray& frames, const FloatArray& alpha, const FloatArray& motion) {
            return to_array(blend(from_array(frames), from_array(alpha), from_array(motion)));
        },
        py::arg("frames"), py::arg("alpha"), py::arg("motion"));

    m.def(
        "to_unit", [](const FloatArray& x) { return to_array(to_unit(from_array(x))); },
        py::arg("x"));
    m.def(
        "psnr", [](const FloatArray& a, const FloatArray& b) {
            return psnr(from_array(a), from_array(b));
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "ssim", [](const FloatArray& a, const FloatArray& b) {
            return ssim(from_array(a), from_array(b));
        },
        py::arg("a"), py::arg("b"));

    m.def(
        "render_face",
        [](uint64_t identity_seed, int resolution, float aperture, float dx, float dy,
           float theta) {
            Identity id = make_identity(identity_seed, resolution);
            return to_array(render_face(id, PoseFrame{dx, dy, theta}, aperture, resolution));
        },
        py::arg("identity_seed"), py::arg("resolution") = 64, py::arg("aperture") = 0.5f,
        py::arg("dx") = 0.0f, py::arg("dy") = 0.0f, py::arg("theta") = 0.0f);

    m.def(
        "signal_windows",
        [](uint64_t seed, int frames) {
            return to_array(signal_windows(make_signal(seed, frames)));
        },
        py::arg("seed"), py::arg("frames"));

    m.def(
        "nonexpansive_violations",
        [](const std::string& kind, int trials, int p, uint64_t seed) {
            return bounds::check_nonexpansive(act_from_name(kind), trials, p, seed)
                .violations_young();
        },
        py::arg("kind"), py::arg("trials") = 100, py::arg("p") = 2, py::arg("seed") = 1);

    m.def(
        "output_bound_violations",
        [](int trials, int n_min, int n_max, uint64_t seed) {
            auto rep = bounds::verify_output_bound(trials, n_min, n_max, {1, 2}, seed);
            return py::make_tuple(rep.violations_paper(), rep.violations_young());
        },
        py::arg("trials") = 50, py::arg("n_min") = 1, py::arg("n_max") = 3, py::arg("seed") = 1);

    m.def(
        "init_checkpoint",
        [](const std::string& dir, int resolution, int base_channels, int feature_dim,
           const std::string& model, uint64_t seed) {
            TrainConfig cfg;
            cfg.resolution = resolution;
            cfg.base_channels = base_channels;
            cfg.feature_dim = feature_dim;
            cfg.model = model;
            cfg.seed = seed;
            cfg.validate();
            Generator gen(generator_spec_from_config(cfg), seed);
            save_checkpoint(dir, cfg, gen.params());
        },
        py::arg("dir"), py::arg("resolution") = 64, py::arg("base_channels") = 8,
        py::arg("feature_dim") = 64, py::arg("model") = "dck", py::arg("seed") = 1,
        "Write an untrained-generator checkpoint (config + init parameters).");

    py::class_<Model>(m, "Model")
        .def(py::init<const std::string&>(), py::arg("checkpoint_dir"))
        .def("generate", &Model::generate, py::arg("frames"), py::arg("windows"))
        .def_property_readonly("resolution", &Model::resolution)
        .def_property_readonly("kind", &Model::kind)
        .def_property_readonly("param_count", &Model::param_count);
}
