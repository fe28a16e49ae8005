#include "dckgen/checkpoint.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dckgen/tensor_io.hpp"

namespace dckgen {

namespace fs = std::filesystem;

void save_checkpoint(const std::string& dir, const TrainConfig& cfg, const ParamStore& params) {
    fs::create_directories(dir);
    save_config((fs::path(dir) / "config.txt").string(), cfg);
    std::ofstream man(fs::path(dir) / "manifest.txt");
    if (!man) throw std::runtime_error("cannot write checkpoint manifest in " + dir);
    std::ofstream bin(fs::path(dir) / "params.dckt", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot write checkpoint payload in " + dir);
    for (const auto& p : params.items()) {
        man << p->name;
        for (int i = 0; i < p->value.rank(); ++i) man << " " << p->value.dim(i);
        man << "\n";
        write_dckt(bin, p->value);
    }
}

TrainConfig load_checkpoint_config(const std::string& dir) {
    return load_config((fs::path(dir) / "config.txt").string());
}

void load_checkpoint_params(const std::string& dir, ParamStore& params) {
    std::ifstream man(fs::path(dir) / "manifest.txt");
    if (!man) throw std::runtime_error("cannot open checkpoint manifest in " + dir);
    std::ifstream bin(fs::path(dir) / "params.dckt", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot open checkpoint payload in " + dir);
    std::string line;
    size_t idx = 0;
    const auto& items = params.items();
    while (std::getline(man, line)) {
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string name;
        is >> name;
        std::vector<int64_t> shape;
        int64_t d;
        while (is >> d) shape.push_back(d);
        if (idx >= items.size())
            throw std::runtime_error("checkpoint has more parameters than the model (at '" +
                                     name + "')");
        const Var& p = items[idx];
        if (p->name != name)
            throw std::runtime_error("checkpoint parameter order mismatch: expected '" + p->name +
                                     "', manifest has '" + name + "'");
        if (p->value.shape() != shape)
            throw std::runtime_error("checkpoint shape mismatch for '" + name + "': model " +
                                     shape_str(p->value.shape()) + ", manifest " +
                                     shape_str(shape));
        Tensor t = read_dckt(bin);
        if (t.shape() != shape)
            throw std::runtime_error("checkpoint payload shape mismatch for '" + name + "'");
        p->value = std::move(t);
        ++idx;
    }
    if (idx != items.size())
        throw std::runtime_error("checkpoint has fewer parameters than the model: " +
                                 std::to_string(idx) + " vs " + std::to_string(items.size()));
}

}  // namespace dckgen
