#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dckgen/checkpoint.hpp"
#include "dckgen/config.hpp"
#include "dckgen/generator.hpp"
#include "dckgen/params.hpp"
#include "dckgen/rng.hpp"

using namespace dckgen;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("config");

TEST_CASE("defaults are valid") {
    TrainConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.lambda_rec == 10.0);
    CHECK(cfg.lr == 2e-4);
    CHECK(cfg.beta1 == 0.5);
    CHECK(cfg.model == "dck");
}

TEST_CASE("parse key = value text") {
    TrainConfig cfg = parse_config_text(
        "# comment line\n"
        "resolution = 32\n"
        "\n"
        "base_channels=4\n"       // spaces around '=' optional
        "lambda_rec = 2.5\n"
        "seed = 77\n"
        "model = concat\n"
        "dataset_dir = /tmp/ds\n"
        "train_signals = 3\n",
        "test");
    CHECK(cfg.resolution == 32);
    CHECK(cfg.base_channels == 4);
    CHECK(cfg.lambda_rec == 2.5);
    CHECK(cfg.seed == 77);
    CHECK(cfg.model == "concat");
    CHECK(cfg.dataset_dir == "/tmp/ds");
    CHECK(cfg.train_signals == 3);
    // untouched keys keep defaults
    CHECK(cfg.lr == 2e-4);
}

TEST_CASE("unknown keys and malformed lines are rejected") {
    CHECK_THROWS(parse_config_text("learning_rate = 1e-3\n", "test"));
    CHECK_THROWS(parse_config_text("resolution 32\n", "test"));
    CHECK_THROWS(parse_config_text("resolution = abc\n", "test"));
    CHECK_THROWS(parse_config_text("model = vae\n", "test"));
    CHECK_THROWS(parse_config_text("resolution = 16\n", "test"));  // validate() fails
}

TEST_CASE("save/load roundtrip preserves every field") {
    fs::path dir = fs::temp_directory_path() / "dckgen_cfg_test";
    fs::create_directories(dir);
    std::string path = (dir / "cfg.txt").string();
    TrainConfig cfg;
    cfg.resolution = 32;
    cfg.base_channels = 4;
    cfg.feature_dim = 16;
    cfg.lambda_rec = 7.5;
    cfg.lr = 1e-3;
    cfg.beta1 = 0.4;
    cfg.beta2 = 0.99;
    cfg.batch = 3;
    cfg.steps = 123;
    cfg.seed = 99;
    cfg.dataset_dir = "somewhere";
    cfg.out_dir = "elsewhere";
    cfg.model = "concat";
    cfg.train_signals = 5;
    save_config(path, cfg);
    TrainConfig back = load_config(path);
    CHECK(back.resolution == cfg.resolution);
    CHECK(back.base_channels == cfg.base_channels);
    CHECK(back.feature_dim == cfg.feature_dim);
    CHECK(back.lambda_rec == cfg.lambda_rec);
    CHECK(back.lr == cfg.lr);
    CHECK(back.beta1 == cfg.beta1);
    CHECK(back.beta2 == cfg.beta2);
    CHECK(back.batch == cfg.batch);
    CHECK(back.steps == cfg.steps);
    CHECK(back.seed == cfg.seed);
    CHECK(back.dataset_dir == cfg.dataset_dir);
    CHECK(back.out_dir == cfg.out_dir);
    CHECK(back.model == cfg.model);
    CHECK(back.train_signals == cfg.train_signals);
    fs::remove_all(dir);
}

TEST_CASE("checkpoint roundtrip restores parameters bit-exactly") {
    fs::path dir = fs::temp_directory_path() / "dckgen_ckpt_test";
    fs::remove_all(dir);
    GeneratorSpec spec;
    spec.resolution = 32;
    spec.base_channels = 4;
    spec.feature_dim = 16;
    Generator a(spec, 21);
    TrainConfig cfg;
    cfg.resolution = 32;
    cfg.base_channels = 4;
    cfg.feature_dim = 16;
    save_checkpoint(dir.string(), cfg, a.params());

    CHECK(fs::exists(dir / "manifest.txt"));
    CHECK(fs::exists(dir / "params.dckt"));
    CHECK(fs::exists(dir / "config.txt"));

    TrainConfig cfg_back = load_checkpoint_config(dir.string());
    CHECK(cfg_back.resolution == 32);

    // load into a differently-seeded model of the same shape
    Generator b(spec, 22);
    double before = 0;
    for (size_t i = 0; i < a.params().items().size(); ++i)
        before += mean_abs_diff(a.params().items()[i]->value, b.params().items()[i]->value);
    CHECK(before > 0.0);
    load_checkpoint_params(dir.string(), b.params());
    for (size_t i = 0; i < a.params().items().size(); ++i)
        CHECK(mean_abs_diff(a.params().items()[i]->value, b.params().items()[i]->value) == 0.0);

    // shape mismatch is rejected
    GeneratorSpec other = spec;
    other.base_channels = 8;
    Generator c(other, 23);
    CHECK_THROWS(load_checkpoint_params(dir.string(), c.params()));
    fs::remove_all(dir);
}

TEST_CASE("validate rejects bad numerics") {
    TrainConfig cfg;
    cfg.lr = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = TrainConfig{};
    cfg.batch = 0;
    CHECK_THROWS(cfg.validate());
    cfg = TrainConfig{};
    cfg.lambda_rec = -1;
    CHECK_THROWS(cfg.validate());
    cfg = TrainConfig{};
    cfg.beta1 = 1.0;
    CHECK_THROWS(cfg.validate());
    cfg = TrainConfig{};
    cfg.train_signals = -2;
    CHECK_THROWS(cfg.validate());
}

TEST_SUITE_END();
