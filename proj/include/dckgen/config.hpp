#pragma once

// key = value training configuration ('#' comments, blank lines ignored;
// unknown keys rejected).

#include <cstdint>
#include <string>

namespace dckgen {

struct TrainConfig {
    int resolution = 64;
    int base_channels = 8;
    int feature_dim = 64;
    double lambda_rec = 10.0;
    double lr = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    int batch = 2;
    int steps = 2000;
    uint64_t seed = 1;
    std::string dataset_dir = "data";
    std::string out_dir = "out";
    std::string model = "dck";  // dck | concat
    int train_signals = 0;      // signals per identity used for training; 0 = all

    void validate() const;
};

TrainConfig parse_config_text(const std::string& text, const std::string& origin);
TrainConfig load_config(const std::string& path);
void save_config(const std::string& path, const TrainConfig& cfg);

}  // namespace dckgen
