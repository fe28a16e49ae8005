#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dckgen/rng.hpp"
#include "dckgen/synthdata.hpp"

using namespace dckgen;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("synthdata");

TEST_CASE("rendered frames are well-formed") {
    Identity id = make_identity(42, 64);
    Tensor f = render_face(id, PoseFrame{0, 0, 0}, 0.5f, 64);
    CHECK(f.shape() == std::vector<int64_t>{3, 64, 64});
    CHECK(f.all_finite());
    for (int64_t i = 0; i < f.numel(); ++i) {
        CHECK(f[i] >= -1.0f);
        CHECK(f[i] <= 1.0f);
    }
    // background stays exactly zero in the corners
    for (int64_t c = 0; c < 3; ++c) {
        CHECK(f.at3(c, 0, 0) == 0.0f);
        CHECK(f.at3(c, 63, 63) == 0.0f);
    }
    // a solid face-interior pixel (left of eyes and mouth) carries the identity color
    CHECK(f.at3(0, 32, 18) == doctest::Approx(id.color[0]).epsilon(1e-5));
}

TEST_CASE("measured aperture tracks the requested aperture within a pixel") {
    Rng rng(77);
    int misses = 0;
    for (int t = 0; t < 100; ++t) {
        Identity id = make_identity(rng.next_u64(), 64);
        PoseFrame pose{(float)rng.uniform(-3, 3), (float)rng.uniform(-3, 3),
                       (float)rng.uniform(-0.15, 0.15)};
        float aperture = (float)rng.uniform(0.05, 1.0);
        Tensor f = render_face(id, pose, aperture, 64);
        double measured = measure_aperture_px(f, id, pose, 64);
        double want = (double)aperture * mouth_max_px(64);
        if (std::fabs(measured - want) >= 1.0) ++misses;
    }
    CHECK(misses == 0);
}

TEST_CASE("closed mouth measures near zero") {
    Identity id = make_identity(5, 64);
    Tensor f = render_face(id, PoseFrame{0, 0, 0}, 0.0f, 64);
    CHECK(measure_aperture_px(f, id, PoseFrame{0, 0, 0}, 64) <= 1.0);
}

TEST_CASE("driving signal and windows") {
    DrivingSignal sig = make_signal(9, 12);
    CHECK(sig.samples.size() == 12 * kSamplesPerFrame);
    CHECK(sig.aperture.size() == 12);
    for (float s : sig.samples) {
        CHECK(s >= -1.0f);
        CHECK(s <= 1.0f);
    }
    for (float a : sig.aperture) {
        CHECK(a >= 0.0f);
        CHECK(a <= 1.0f);
    }
    CHECK(aperture_from_samples(sig.samples) == sig.aperture);

    Tensor w = signal_window(sig, 3);
    CHECK(w.shape() == std::vector<int64_t>{1, 16, 16});
    for (int64_t i = 0; i < w.numel(); ++i) {
        CHECK(w[i] >= 0.0f);
        CHECK(w[i] <= 1.0f);
    }
    Tensor ws = signal_windows(sig);
    CHECK(ws.shape() == std::vector<int64_t>{12, 1, 16, 16});
    // stacked windows match the single-frame call
    Tensor w3 = slice_outer(ws, 3);
    CHECK(mean_abs_diff(w3, w) == 0.0);
    CHECK_THROWS(signal_window(sig, 12));
}

TEST_CASE("windows differ across frames and signals") {
    DrivingSignal a = make_signal(1, 8);
    DrivingSignal b = make_signal(2, 8);
    CHECK(mean_abs_diff(signal_window(a, 0), signal_window(a, 4)) > 0.0);
    CHECK(mean_abs_diff(signal_window(a, 0), signal_window(b, 0)) > 0.0);
}

TEST_CASE("mouth_box sits inside face_box inside the frame") {
    Rng rng(88);
    for (int t = 0; t < 50; ++t) {
        Identity id = make_identity(rng.next_u64(), 64);
        PoseFrame pose{(float)rng.uniform(-3, 3), (float)rng.uniform(-3, 3),
                       (float)rng.uniform(-0.15, 0.15)};
        Box mb = mouth_box(id, pose, 64);
        Box fb = face_box(id, pose, 64);
        CHECK(mb.x0 >= fb.x0);
        CHECK(mb.y0 >= fb.y0);
        CHECK(mb.x1 <= fb.x1);
        CHECK(mb.y1 <= fb.y1);
        CHECK(fb.x0 >= 0);
        CHECK(fb.y0 >= 0);
        CHECK(fb.x1 <= 64);
        CHECK(fb.y1 <= 64);
        CHECK(mb.width() > 0);
        CHECK(mb.height() > 0);
    }
}

TEST_CASE("build_pairs structure") {
    Dataset ds = build_pairs(2, 3, 5, 32, 1);
    // each identity: one base clip + 3 driven clips
    CHECK(ds.clips.size() == 2 * 4);
    CHECK(ds.pairs.size() == 2 * 3);
    CHECK(ds.resolution == 32);
    for (auto [a, b] : ds.pairs) {
        CHECK(ds.clips[a].identity_id == ds.clips[b].identity_id);
        CHECK(ds.clips[a].signal_id != ds.clips[b].signal_id);
        // pose tracks are shared within an identity
        CHECK(ds.clips[a].pose.size() == ds.clips[b].pose.size());
        CHECK(ds.clips[a].pose[2].dx == ds.clips[b].pose[2].dx);
    }
    for (const auto& clip : ds.clips) {
        CHECK(clip.frames.shape() == std::vector<int64_t>{5, 3, 32, 32});
        CHECK((int)clip.signal.aperture.size() == 5);
    }
    // distinct identities render differently
    CHECK(mean_abs_diff(ds.clips[0].frames, ds.clips[4].frames) > 0.0);
}

TEST_CASE("dataset save/load roundtrip with manifest format") {
    fs::path dir = fs::temp_directory_path() / "dckgen_ds_test";
    fs::remove_all(dir);
    Dataset ds = build_pairs(2, 2, 3, 32, 7);
    save_dataset(dir.string(), ds);

    // manifest lines: "clip_id identity_id signal_id frames path"
    std::ifstream man(dir / "manifest.txt");
    REQUIRE(man.good());
    std::string line;
    int lines = 0;
    while (std::getline(man, line)) {
        if (line.empty()) continue;
        std::istringstream is(line);
        int clip_id, identity_id, signal_id, frames;
        std::string path;
        REQUIRE((is >> clip_id >> identity_id >> signal_id >> frames >> path));
        CHECK(clip_id == lines);
        CHECK(frames == 3);
        CHECK(fs::exists(dir / path));
        ++lines;
    }
    CHECK(lines == (int)ds.clips.size());

    Dataset back = load_dataset(dir.string());
    REQUIRE(back.clips.size() == ds.clips.size());
    CHECK(back.resolution == ds.resolution);
    CHECK(back.pairs == ds.pairs);
    for (size_t i = 0; i < ds.clips.size(); ++i) {
        const auto& a = ds.clips[i];
        const auto& b = back.clips[i];
        CHECK(a.clip_id == b.clip_id);
        CHECK(a.identity_id == b.identity_id);
        CHECK(a.signal_id == b.signal_id);
        CHECK(mean_abs_diff(a.frames, b.frames) == 0.0);
        CHECK(a.signal.samples == b.signal.samples);
        CHECK(a.signal.aperture == b.signal.aperture);
        for (size_t t = 0; t < a.pose.size(); ++t) {
            CHECK(a.pose[t].dx == b.pose[t].dx);
            CHECK(a.pose[t].theta == b.pose[t].theta);
        }
        CHECK(a.identity.axis_x == b.identity.axis_x);
        CHECK(a.identity.mouth_width == b.identity.mouth_width);
    }
    fs::remove_all(dir);
}

TEST_CASE("build_pairs is deterministic in the seed") {
    Dataset a = build_pairs(1, 2, 3, 32, 9);
    Dataset b = build_pairs(1, 2, 3, 32, 9);
    Dataset c = build_pairs(1, 2, 3, 32, 10);
    CHECK(mean_abs_diff(a.clips[1].frames, b.clips[1].frames) == 0.0);
    CHECK(mean_abs_diff(a.clips[1].frames, c.clips[1].frames) > 0.0);
}

TEST_SUITE_END();
