#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dckgen/cli.hpp"
#include "dckgen/synthdata.hpp"

using namespace dckgen;
namespace fs = std::filesystem;

namespace {

int run_cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv = {"dckgen"};
    argv.insert(argv.end(), args);
    return cli_main((int)argv.size(), argv.data());
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("help and usage errors") {
    CHECK(run_cli({"--help"}) == 0);
    CHECK(run_cli({}) == 2);                    // missing subcommand
    CHECK(run_cli({"no-such-command"}) == 2);   // unknown subcommand
    CHECK(run_cli({"train", "--bogus"}) == 2);  // unknown flag
}

TEST_CASE("missing inputs exit with code 1") {
    CHECK(run_cli({"train", "--config", "/nonexistent/cfg.txt"}) == 1);
    CHECK(run_cli({"generate", "--checkpoint", "/nonexistent/ckpt", "--out", "/tmp/x"}) == 1);
}

TEST_CASE("gradcheck subcommand") {
    fs::path dir = fs::temp_directory_path() / "dckgen_cli_gc";
    fs::remove_all(dir);
    CHECK(run_cli({"gradcheck", "--seed", "1", "--out", dir.string().c_str()}) == 0);
    CHECK(fs::exists(dir / "gradcheck.txt"));
    std::ifstream in(dir / "gradcheck.txt");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("PASS") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("synth-data subcommand writes a loadable dataset") {
    fs::path dir = fs::temp_directory_path() / "dckgen_cli_sd";
    fs::remove_all(dir);
    CHECK(run_cli({"synth-data", "--identities", "1", "--signals", "1", "--frames", "3",
                   "--seed", "4", "--out", dir.string().c_str()}) == 0);
    Dataset ds = load_dataset(dir.string());
    CHECK(ds.clips.size() == 2);
    CHECK(ds.pairs.size() == 1);
    CHECK(ds.clips[0].frames.dim(0) == 3);
    fs::remove_all(dir);
}

TEST_SUITE_END();
