#include "dckgen/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dckgen {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

template <typename T>
T parse_num(const std::string& v, const std::string& key, const std::string& origin) {
    std::istringstream is(v);
    T out;
    is >> out;
    if (is.fail() || !is.eof())
        throw std::invalid_argument(origin + ": bad value '" + v + "' for key '" + key + "'");
    return out;
}

}  // namespace

void TrainConfig::validate() const {
    if (resolution < 32) throw std::invalid_argument("config: resolution must be >= 32");
    if (base_channels < 1) throw std::invalid_argument("config: base_channels must be >= 1");
    if (feature_dim < 1) throw std::invalid_argument("config: feature_dim must be >= 1");
    if (lambda_rec < 0) throw std::invalid_argument("config: lambda_rec must be >= 0");
    if (lr <= 0) throw std::invalid_argument("config: lr must be > 0");
    if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1)
        throw std::invalid_argument("config: betas must be in [0,1)");
    if (batch < 1) throw std::invalid_argument("config: batch must be >= 1");
    if (steps < 0) throw std::invalid_argument("config: steps must be >= 0");
    if (model != "dck" && model != "concat")
        throw std::invalid_argument("config: model must be 'dck' or 'concat', got '" + model + "'");
    if (train_signals < 0) throw std::invalid_argument("config: train_signals must be >= 0");
}

TrainConfig parse_config_text(const std::string& text, const std::string& origin) {
    TrainConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                        ": expected 'key = value', got '" + s + "'");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key == "resolution") cfg.resolution = parse_num<int>(val, key, origin);
        else if (key == "base_channels") cfg.base_channels = parse_num<int>(val, key, origin);
        else if (key == "feature_dim") cfg.feature_dim = parse_num<int>(val, key, origin);
        else if (key == "lambda_rec") cfg.lambda_rec = parse_num<double>(val, key, origin);
        else if (key == "lr") cfg.lr = parse_num<double>(val, key, origin);
        else if (key == "beta1") cfg.beta1 = parse_num<double>(val, key, origin);
        else if (key == "beta2") cfg.beta2 = parse_num<double>(val, key, origin);
        else if (key == "batch") cfg.batch = parse_num<int>(val, key, origin);
        else if (key == "steps") cfg.steps = parse_num<int>(val, key, origin);
        else if (key == "seed") cfg.seed = parse_num<uint64_t>(val, key, origin);
        else if (key == "dataset_dir") cfg.dataset_dir = val;
        else if (key == "out_dir") cfg.out_dir = val;
        else if (key == "model") cfg.model = val;
        else if (key == "train_signals") cfg.train_signals = parse_num<int>(val, key, origin);
        else
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

TrainConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), path);
}

void save_config(const std::string& path, const TrainConfig& cfg) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write config: " + path);
    f << "resolution = " << cfg.resolution << "\n";
    f << "base_channels = " << cfg.base_channels << "\n";
    f << "feature_dim = " << cfg.feature_dim << "\n";
    f << "lambda_rec = " << cfg.lambda_rec << "\n";
    f << "lr = " << cfg.lr << "\n";
    f << "beta1 = " << cfg.beta1 << "\n";
    f << "beta2 = " << cfg.beta2 << "\n";
    f << "batch = " << cfg.batch << "\n";
    f << "steps = " << cfg.steps << "\n";
    f << "seed = " << cfg.seed << "\n";
    f << "dataset_dir = " << cfg.dataset_dir << "\n";
    f << "out_dir = " << cfg.out_dir << "\n";
    f << "model = " << cfg.model << "\n";
    f << "train_signals = " << cfg.train_signals << "\n";
}

}  // namespace dckgen
