// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line with
// its measured numbers; the process exits nonzero if any criterion fails.
//
// usage: dckgen_acceptance <path-to-cli-binary> [scratch-dir]

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dckgen/ablation.hpp"
#include "dckgen/bounds.hpp"
#include "dckgen/cli.hpp"
#include "dckgen/dck.hpp"
#include "dckgen/generator.hpp"
#include "dckgen/metrics.hpp"
#include "dckgen/rng.hpp"
#include "dckgen/synthdata.hpp"
#include "dckgen/training.hpp"

namespace fs = std::filesystem;
using namespace dckgen;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("C%d %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// ---- criterion 1: activation non-expansiveness ----------------------------

void criterion1() {
    Timer timer;
    int violations = 0;
    int64_t trials = 0;
    for (auto kind : {ops::ActKind::LeakyRelu, ops::ActKind::Tanh, ops::ActKind::Sigmoid})
        for (int p : {1, 2}) {
            auto rep = bounds::check_nonexpansive(kind, 10000, p, 1);
            violations += rep.violations_young();
            trials += (int64_t)rep.trials.size();
        }
    double secs = timer.seconds();
    report(1, violations == 0 && secs < 10.0,
           fmt("non-expansiveness: %lld trials, %d violations, %.1f s (budget 10 s)",
               (long long)trials, violations, secs));
}

// ---- criterion 2: output-difference bound ----------------------------------

void criterion2() {
    Timer timer;
    auto rep = bounds::verify_output_bound(1000, 1, 5, {1, 2}, 1);
    double secs = timer.seconds();
    double paper_rate = (double)rep.violations_paper() / (double)rep.trials.size();
    report(2, rep.violations_young() == 0 && secs < 120.0,
           fmt("output bound: %zu rows, rigorous violations %d, heuristic-variant rate %.4f "
               "(reported only), max rigorous ratio %.3f, %.1f s (budget 120 s)",
               rep.trials.size(), rep.violations_young(), paper_rate, rep.max_ratio_young(),
               secs));
}

// ---- criterion 3: loss-difference bounds -----------------------------------

void criterion3() {
    Timer timer;
    auto adv = bounds::verify_adv_loss_bound(250, 1);
    auto feat = bounds::verify_perceptual_bound(250, 1);
    auto cyc = bounds::verify_cycle_bound(250, 1);
    double secs = timer.seconds();

    int violations = adv.violations_young() + feat.violations_young() + cyc.violations_young();
    // identical-pair rows must come out exactly 0 <= 0
    int ident_rows = 0;
    bool ident_exact = true;
    for (const auto* rep : {&adv, &feat, &cyc})
        for (const auto& t : rep->trials)
            if (t.rhs_young == 0.0) {
                ++ident_rows;
                ident_exact = ident_exact && t.lhs == 0.0 && !t.violation_young;
            }
    report(3,
           violations == 0 && ident_rows > 0 && ident_exact && secs < 300.0,
           fmt("loss bounds: adv/feature/cycle 250 trials each, %d violations, %d identical-pair "
               "rows all exactly 0<=0: %s, %.1f s (budget 300 s)",
               violations, ident_rows, ident_exact ? "yes" : "NO", secs));
}

// ---- criterion 4: finite-difference gradient checks ------------------------

void criterion4() {
    Timer timer;
    std::ostringstream os;
    bool ok = run_gradcheck_suite(1, os);
    double secs = timer.seconds();
    // keep the per-case lines visible in the acceptance log
    std::fputs(os.str().c_str(), stdout);
    report(4, ok && secs < 120.0, fmt("gradient checks: %s, %.1f s (budget 120 s)",
                                      ok ? "all cases pass" : "FAILED cases above", secs));
}

// ---- criterion 5: dynamic conv == static conv + parameter formula ----------

void criterion5() {
    Rng rng(1234);
    double max_diff = 0.0;
    bool formula_ok = true;
    for (int t = 0; t < 100; ++t) {
        DckLayerSpec spec;
        spec.c1 = (int)rng.uniform_int(1, 8);
        spec.c2 = (int)rng.uniform_int(1, 8);
        spec.ks = rng.uniform() < 0.5 ? 1 : 3;
        int64_t frames = rng.uniform_int(1, 4);
        int64_t hw = rng.uniform_int(spec.ks, 12);
        formula_ok = formula_ok &&
                     spec.param_count() == (int64_t)spec.c1 * (spec.c2 * spec.ks * spec.ks + 1);

        Tensor flat = rng.normal_tensor({frames, spec.param_count()}, 0.0, 1.0);
        Tensor x = rng.normal_tensor({frames, spec.c2, hw, hw}, 0.0, 1.0);
        KernelBankLayer layer = split_dynamic_params(flat, spec);
        Tensor dyn = dynamic_conv(x, layer);

        ops::Conv2dSpec conv;
        conv.padding = spec.ks / 2;
        for (int64_t f = 0; f < frames; ++f) {
            Tensor xf = slice_outer(x, f).reshaped({1, spec.c2, hw, hw});
            Tensor wf = slice_outer(layer.weights, f);
            Tensor bf = slice_outer(layer.bias, f);
            Tensor want = ops::conv2d(xf, wf, &bf, conv);
            Tensor got = slice_outer(dyn, f).reshaped(want.shape());
            max_diff = std::max(max_diff, max_abs(sub(got, want)));
        }
    }
    int64_t paper_count = DckLayerSpec{256, 256, 1, 0}.param_count();
    report(5, max_diff <= 1e-6 && formula_ok && paper_count == 65792,
           fmt("dynamic conv vs static: 100 configs, max |diff| %.3g (tol 1e-6); "
               "param formula ok: %s; 256-channel 1x1 count %lld (expect 65792)",
               max_diff, formula_ok ? "yes" : "NO", (long long)paper_count));
}

// ---- criterion 6: blending and background-cover identities -----------------

void criterion6() {
    Rng rng(99);
    Tensor frames = rng.uniform_tensor({3, 3, 32, 32}, -1.0, 1.0);
    Tensor motion = rng.uniform_tensor({3, 3, 32, 32}, -1.0, 1.0);
    Tensor a0({3, 1, 32, 32});
    Tensor a1 = Tensor::full({3, 1, 32, 32}, 1.0f);

    auto equal = [](const Tensor& x, const Tensor& y) {
        if (!x.same_shape(y)) return false;
        for (int64_t i = 0; i < x.numel(); ++i)
            if (x[i] != y[i]) return false;
        return true;
    };
    bool alpha0_ok = equal(blend(frames, a0, motion), frames);
    bool alpha1_ok = equal(blend(frames, a1, motion), motion);

    Tensor generated = rng.uniform_tensor({3, 3, 32, 32}, -1.0, 1.0);
    Box box{8, 10, 24, 30};
    Tensor covered = cover_background(generated, frames, box);
    bool outside_ok = true, inside_ok = true;
    for (int64_t n = 0; n < 3; ++n)
        for (int64_t c = 0; c < 3; ++c)
            for (int64_t y = 0; y < 32; ++y)
                for (int64_t x = 0; x < 32; ++x) {
                    bool in = x >= box.x0 && x < box.x1 && y >= box.y0 && y < box.y1;
                    float got = covered.at4(n, c, y, x);
                    if (in)
                        inside_ok = inside_ok && got == generated.at4(n, c, y, x);
                    else
                        outside_ok = outside_ok && got == frames.at4(n, c, y, x);
                }
    report(6, alpha0_ok && alpha1_ok && outside_ok && inside_ok,
           fmt("blending: alpha=0 returns input %s, alpha=1 returns motion %s; "
               "cover_background outside %s / inside %s (all bit-exact)",
               alpha0_ok ? "yes" : "NO", alpha1_ok ? "yes" : "NO", outside_ok ? "yes" : "NO",
               inside_ok ? "yes" : "NO"));
}

// ---- criteria 7 + 8: desk-scale training and translation probe -------------

TrainConfig accept_config(const fs::path& scratch, const std::string& model) {
    TrainConfig cfg;
    cfg.resolution = 64;
    cfg.base_channels = 8;
    cfg.feature_dim = 64;
    cfg.lambda_rec = 10.0;
    cfg.lr = 2e-4;
    cfg.beta1 = 0.5;
    cfg.beta2 = 0.999;
    cfg.batch = 2;
    cfg.steps = 2000;
    cfg.seed = 1;
    cfg.train_signals = 6;  // signals 7..8 of each identity are held out
    cfg.model = model;
    cfg.dataset_dir = (scratch / "data").string();
    cfg.out_dir = (scratch / ("out_" + model)).string();
    return cfg;
}

void criteria78(const fs::path& scratch) {
    Timer timer;
    Dataset ds = build_pairs(8, 8, 32, 64, 1);

    TrainConfig cfg = accept_config(scratch, "dck");
    Trainer trainer(cfg, ds);
    double rec0 = trainer.eval_rec(trainer.holdout_pairs());
    fs::create_directories(cfg.out_dir);
    std::ofstream log(fs::path(cfg.out_dir) / "train_log.csv");
    trainer.train(&log);
    double rec1 = trainer.eval_rec(trainer.holdout_pairs());
    bool drop_ok = rec1 > 0 && rec0 / rec1 >= 5.0;

    // (b) generated aperture vs the input clip's aperture, per held-out frame
    const Generator& gen = trainer.generator();
    float mm = mouth_max_px(ds.resolution);
    int64_t frames_total = 0, frames_better = 0;
    double alpha_in_sum = 0, alpha_out_sum = 0;
    int64_t alpha_frames = 0;
    for (auto [ia, ib] : trainer.holdout_pairs()) {
        for (int dir = 0; dir < 2; ++dir) {
            const SyntheticClip& vin = ds.clips[dir == 0 ? ia : ib];
            const SyntheticClip& vtg = ds.clips[dir == 0 ? ib : ia];
            Tensor windows = signal_windows(vtg.signal);
            Tensor out = gen.generate(vin.frames, windows);
            for (int64_t t = 0; t < out.dim(0); ++t) {
                Tensor frame = slice_outer(out, t);
                double ap_gen = measure_aperture_px(frame, vin.identity, vin.pose[t],
                                                    ds.resolution);
                double err_gen = std::fabs(ap_gen - (double)vtg.signal.aperture[t] * mm);
                double err_base =
                    std::fabs((double)vin.signal.aperture[t] - (double)vtg.signal.aperture[t]) *
                    mm;
                ++frames_total;
                if (err_gen < err_base) ++frames_better;
            }
            // (c) attention mass inside vs outside the mouth box
            if (dir == 0) {
                GeneratorOut fwd = gen.forward(constant(vin.frames), constant(windows));
                const Tensor& alpha = fwd.alpha->value;
                for (int64_t t = 0; t < alpha.dim(0); ++t) {
                    Box mb = mouth_box(vin.identity, vin.pose[t], ds.resolution);
                    double in_sum = 0, out_sum = 0;
                    int64_t in_n = 0, out_n = 0;
                    for (int64_t y = 0; y < alpha.dim(2); ++y)
                        for (int64_t x = 0; x < alpha.dim(3); ++x) {
                            bool in = x >= mb.x0 && x < mb.x1 && y >= mb.y0 && y < mb.y1;
                            (in ? in_sum : out_sum) += alpha.at4(t, 0, y, x);
                            ++(in ? in_n : out_n);
                        }
                    alpha_in_sum += in_sum / (double)in_n;
                    alpha_out_sum += out_sum / (double)out_n;
                    ++alpha_frames;
                }
            }
        }
    }
    double better_frac = (double)frames_better / (double)frames_total;
    double alpha_in = alpha_in_sum / (double)alpha_frames;
    double alpha_out = alpha_out_sum / (double)alpha_frames;
    bool aperture_ok = better_frac >= 0.90;
    bool alpha_ok = alpha_in >= 2.0 * alpha_out;
    double secs = timer.seconds();
    report(7, drop_ok && aperture_ok && alpha_ok && secs < 1800.0,
           fmt("desk-scale training: holdout rec %.5f -> %.5f (drop %.1fx, need >=5x); "
               "aperture beats input baseline on %.1f%% of %lld held-out frames (need >=90%%); "
               "mean alpha in-mouth %.4f vs outside %.4f (%.1fx, need >=2x); %.0f s "
               "(budget 1800 s)",
               rec0, rec1, rec1 > 0 ? rec0 / rec1 : 0.0, 100.0 * better_frac,
               (long long)frames_total, alpha_in, alpha_out,
               alpha_out > 0 ? alpha_in / alpha_out : 0.0, secs));

    // ---- criterion 8: translation probe, DCK vs concat baseline ----
    TrainConfig ccfg = accept_config(scratch, "concat");
    Trainer ctrainer(ccfg, ds);
    fs::create_directories(ccfg.out_dir);
    std::ofstream clog(fs::path(ccfg.out_dir) / "train_log.csv");
    ctrainer.train(&clog);

    std::vector<double> rates = {0.05, 0.10, 0.15, 0.20};
    auto dck_rows = translation_probe(trainer.generator(), ds.clips[0], rates);
    auto cat_rows = translation_probe(ctrainer.generator(), ds.clips[0], rates);
    double dck_005 = dck_rows.front().interior_delta;
    double dck_max = 0;
    for (const auto& r : dck_rows) dck_max = std::max(dck_max, r.interior_delta);
    double dck_020 = dck_rows.back().interior_delta;
    double cat_020 = cat_rows.back().interior_delta;
    bool stable_ok = dck_005 > 0 && dck_max <= 3.0 * dck_005;
    bool concat_ok = cat_020 >= 2.0 * dck_020;
    std::string detail = "translation probe deltas:";
    for (size_t i = 0; i < rates.size(); ++i)
        detail += fmt(" r=%.2f dck=%.5f concat=%.5f;", rates[i], dck_rows[i].interior_delta,
                      cat_rows[i].interior_delta);
    detail += fmt(" dck max/0.05 = %.2f (need <=3); concat/dck at 0.20 = %.2f (need >=2)",
                  dck_max / dck_005, dck_020 > 0 ? cat_020 / dck_020 : 0.0);
    report(8, stable_ok && concat_ok, detail);
}

// ---- criterion 9: CLI determinism ------------------------------------------

int run_in(const fs::path& dir, const std::string& cmd) {
    fs::create_directories(dir);
    std::string full = "cd " + dir.string() + " && " + cmd;
    int rc = std::system(full.c_str());
    return rc == -1 ? -1 : WEXITSTATUS(rc);
}

bool compare_trees(const fs::path& a, const fs::path& b, std::string& first_diff) {
    std::vector<fs::path> rel;
    for (auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) rel.push_back(fs::relative(e.path(), a));
    std::sort(rel.begin(), rel.end());
    std::vector<fs::path> relb;
    for (auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) relb.push_back(fs::relative(e.path(), b));
    std::sort(relb.begin(), relb.end());
    if (rel != relb) {
        first_diff = "file lists differ";
        return false;
    }
    for (const auto& r : rel) {
        std::ifstream fa(a / r, std::ios::binary), fb(b / r, std::ios::binary);
        std::string ca((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
        std::string cb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
        if (ca != cb) {
            first_diff = r.string();
            return false;
        }
    }
    return true;
}

void criterion9(const fs::path& scratch, const std::string& cli) {
    fs::path root = scratch / "determinism";
    fs::create_directories(root);
    {
        std::ofstream cfg(root / "cfg.txt");
        cfg << "resolution = 32\nbase_channels = 4\nfeature_dim = 16\nsteps = 6\nbatch = 2\n"
               "seed = 5\ndataset_dir = data\nout_dir = out\n";
    }
    std::vector<std::string> cmds = {
        " synth-data --config ../cfg.txt --identities 2 --signals 2 --frames 6 --out data",
        " train --config ../cfg.txt",
        " generate --checkpoint out/checkpoint --input-clip 0 --driving-clip 1 --out gen",
        " verify-bounds --out vb",
        " gradcheck --out gc",
        " eval --checkpoint out/checkpoint --out ev",
        " ablate --checkpoint out/checkpoint --clip 0 --out ab",
    };
    bool ran_ok = true;
    for (const auto& run : {"a", "b"})
        for (size_t i = 0; i < cmds.size(); ++i) {
            int rc = run_in(root / run,
                            cli + cmds[i] + " >> log_" + std::to_string(i) + ".txt 2>&1");
            ran_ok = ran_ok && rc == 0;
        }
    std::string diff;
    bool same = compare_trees(root / "a", root / "b", diff);
    report(9, ran_ok && same,
           fmt("CLI determinism: 7 subcommands re-run with the same seed; all exit 0: %s; "
               "trees byte-identical: %s%s",
               ran_ok ? "yes" : "NO", same ? "yes" : "NO",
               same ? "" : (" (first difference: " + diff + ")").c_str()));
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <cli-binary> [scratch-dir]\n", argv[0]);
        return 2;
    }
    std::string cli = fs::absolute(argv[1]).string();
    fs::path scratch = argc > 2 ? argv[2] : "acceptance_scratch";
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    try {
        criterion1();
        criterion2();
        criterion3();
        criterion4();
        criterion5();
        criterion6();
        criteria78(scratch);
        criterion9(scratch, cli);
    } catch (const std::exception& e) {
        std::printf("FATAL %s\n", e.what());
        return 1;
    }
    std::printf("%s\n", g_failures == 0 ? "acceptance: ALL PASS" : "acceptance: FAILURES");
    return g_failures == 0 ? 0 : 1;
}
