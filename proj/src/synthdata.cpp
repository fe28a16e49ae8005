#include "dckgen/synthdata.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dckgen/rng.hpp"
#include "dckgen/tensor_io.hpp"

namespace dckgen {

namespace fs = std::filesystem;

float mouth_max_px(int resolution) { return (float)resolution / 8.0f; }

namespace {

constexpr double kTau = 2.0 * M_PI;

inline float eye_radius(int resolution) { return (float)resolution / 24.0f; }

struct Frame2 {
    // rotation by theta plus translation to the face center
    float cx, cy, c, s;
    Frame2(const PoseFrame& p, int R) {
        cx = (float)R / 2.0f + p.dx;
        cy = (float)R / 2.0f + p.dy;
        c = std::cos(p.theta);
        s = std::sin(p.theta);
    }
    // image point -> face-local coordinates
    inline void to_local(float px, float py, float& lx, float& ly) const {
        float ux = px - cx, uy = py - cy;
        lx = c * ux + s * uy;
        ly = -s * ux + c * uy;
    }
    // face-local point -> image coordinates
    inline void to_image(float lx, float ly, float& px, float& py) const {
        px = cx + c * lx - s * ly;
        py = cy + s * lx + c * ly;
    }
};

inline float mouth_offset_y(const Identity& id) { return 0.45f * id.axis_y; }
inline float eye_offset_y(const Identity& id) { return -0.35f * id.axis_y; }

// region code at one sample point: 0 bg, 1 face, 2 eye, 3 mouth
inline int classify_point(const Identity& id, const Frame2& f, float av, float er, float px,
                          float py) {
    float lx, ly;
    f.to_local(px, py, lx, ly);
    float fx = lx / id.axis_x, fy = ly / id.axis_y;
    if (fx * fx + fy * fy > 1.0f) return 0;
    if (av > 0.0f) {
        float mx = lx / (0.5f * id.mouth_width), my = (ly - mouth_offset_y(id)) / av;
        if (mx * mx + my * my <= 1.0f) return 3;
    }
    float ey = ly - eye_offset_y(id);
    float exl = lx + 0.5f * id.eye_spacing, exr = lx - 0.5f * id.eye_spacing;
    if (exl * exl + ey * ey <= er * er || exr * exr + ey * ey <= er * er) return 2;
    return 1;
}

}  // namespace

Identity make_identity(uint64_t seed, int resolution) {
    Rng rng(seed);
    Identity id;
    float R = (float)resolution;
    id.color[0] = (float)rng.uniform(0.30, 0.80);
    id.color[1] = (float)rng.uniform(0.10, 0.60);
    id.color[2] = (float)rng.uniform(-0.10, 0.40);
    id.axis_x = (float)rng.uniform(0.28, 0.38) * R;
    id.axis_y = (float)rng.uniform(0.33, 0.43) * R;
    id.eye_spacing = (float)rng.uniform(0.14, 0.20) * R;
    id.mouth_width = (float)rng.uniform(0.16, 0.22) * R;
    id.seed = seed;
    // face fits with a margin of at least 4 px at zero translation
    float margin = R / 2.0f - 4.0f;
    id.axis_x = std::min(id.axis_x, margin);
    id.axis_y = std::min(id.axis_y, margin);
    return id;
}

std::vector<PoseFrame> make_pose_track(uint64_t seed, int frames, int resolution) {
    Rng rng(seed);
    float R = (float)resolution;
    // two sine components per degree of freedom, amplitudes bounded so the
    // mouth box stays inside the frame at every pose
    auto comp = [&](double a1max, double a2max) {
        struct {
            double a1, f1, p1, a2, f2, p2;
        } c;
        c.a1 = rng.uniform(0.3 * a1max, a1max);
        c.f1 = rng.uniform(0.5, 1.5);
        c.p1 = rng.uniform(0.0, kTau);
        c.a2 = rng.uniform(0.2 * a2max, a2max);
        c.f2 = rng.uniform(1.5, 3.0);
        c.p2 = rng.uniform(0.0, kTau);
        return c;
    };
    auto cx = comp(0.06 * R, 0.04 * R);
    auto cy = comp(0.05 * R, 0.03 * R);
    auto ct = comp(0.12, 0.08);
    std::vector<PoseFrame> track(frames);
    for (int t = 0; t < frames; ++t) {
        double u = frames > 1 ? (double)t / (double)(frames - 1) : 0.0;
        PoseFrame p;
        p.dx = (float)(cx.a1 * std::sin(kTau * cx.f1 * u + cx.p1) +
                       cx.a2 * std::sin(kTau * cx.f2 * u + cx.p2));
        p.dy = (float)(cy.a1 * std::sin(kTau * cy.f1 * u + cy.p1) +
                       cy.a2 * std::sin(kTau * cy.f2 * u + cy.p2));
        p.theta = (float)(ct.a1 * std::sin(kTau * ct.f1 * u + ct.p1) +
                          ct.a2 * std::sin(kTau * ct.f2 * u + ct.p2));
        track[t] = p;
    }
    return track;
}

std::vector<float> aperture_from_samples(const std::vector<float>& samples) {
    if (samples.size() % kSamplesPerFrame != 0)
        throw std::invalid_argument("aperture_from_samples: sample count not a frame multiple");
    int frames = (int)(samples.size() / kSamplesPerFrame);
    std::vector<double> energy(frames);
    for (int t = 0; t < frames; ++t) {
        double acc = 0.0;
        for (int k = 0; k < kSamplesPerFrame; ++k)
            acc += std::fabs(samples[(size_t)t * kSamplesPerFrame + k]);
        energy[t] = acc / kSamplesPerFrame;
    }
    // 5-tap binomial smoothing with edge replication, then a fixed gain
    const double kKernel[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    std::vector<float> aperture(frames);
    for (int t = 0; t < frames; ++t) {
        double acc = 0.0;
        for (int k = -2; k <= 2; ++k) {
            int idx = std::min(frames - 1, std::max(0, t + k));
            acc += kKernel[k + 2] * energy[idx];
        }
        double a = 2.2 * acc;
        aperture[t] = (float)std::min(1.0, std::max(0.0, a));
    }
    return aperture;
}

DrivingSignal make_signal(uint64_t seed, int frames) {
    Rng rng(seed);
    int S = frames * kSamplesPerFrame;
    // envelope: a few smooth bumps, silence in between
    int nb = std::max(2, frames / 6);
    std::vector<double> bc(nb), bw(nb), ba(nb);
    for (int i = 0; i < nb; ++i) {
        bc[i] = rng.uniform(0.0, (double)frames);
        bw[i] = rng.uniform(1.5, 4.5);
        ba[i] = rng.uniform(0.35, 1.0);
    }
    double carrier_f = rng.uniform(2.0, 5.0);
    double carrier_p = rng.uniform(0.0, kTau);
    double fm_f = rng.uniform(0.2, 0.8);
    double fm_p = rng.uniform(0.0, kTau);
    DrivingSignal sig;
    sig.samples.resize(S);
    for (int u = 0; u < S; ++u) {
        double tf = (double)u / kSamplesPerFrame;  // fractional frame index
        double env = 0.0;
        for (int i = 0; i < nb; ++i) {
            double d = (tf - bc[i]) / bw[i];
            env += ba[i] * std::exp(-0.5 * d * d);
        }
        env = std::min(1.0, env);
        double f = carrier_f + 1.5 * std::sin(kTau * fm_f * tf / frames + fm_p);
        double v = env * std::sin(kTau * f * tf + carrier_p) + 0.03 * (rng.uniform() - 0.5);
        sig.samples[u] = (float)std::max(-1.0, std::min(1.0, v));
    }
    sig.aperture = aperture_from_samples(sig.samples);
    return sig;
}

Tensor render_face(const Identity& id, const PoseFrame& pose, float aperture, int resolution) {
    if (aperture < 0.0f || aperture > 1.0f)
        throw std::invalid_argument("render_face: aperture must be in [0,1], got " +
                                    std::to_string(aperture));
    int R = resolution;
    Frame2 f(pose, R);
    float av = aperture * mouth_max_px(R);
    float er = eye_radius(R);
    const float* palette[4] = {nullptr, id.color, kEyeColor, kMouthColor};
    static constexpr float kZero[3] = {0.0f, 0.0f, 0.0f};
    palette[0] = kZero;
    Tensor img({3, R, R});
    // 2x2 supersampling at (0.25, 0.75) pixel offsets
    for (int y = 0; y < R; ++y)
        for (int x = 0; x < R; ++x) {
            float acc[3] = {0, 0, 0};
            for (int sy = 0; sy < 2; ++sy)
                for (int sx = 0; sx < 2; ++sx) {
                    int r = classify_point(id, f, av, er, (float)x + 0.25f + 0.5f * sx,
                                           (float)y + 0.25f + 0.5f * sy);
                    const float* col = palette[r];
                    acc[0] += col[0];
                    acc[1] += col[1];
                    acc[2] += col[2];
                }
            for (int c = 0; c < 3; ++c) img.at3(c, y, x) = acc[c] * 0.25f;
        }
    return img;
}

Tensor render_clip(const Identity& id, const std::vector<PoseFrame>& pose,
                   const std::vector<float>& aperture, int resolution) {
    if (pose.size() != aperture.size())
        throw std::invalid_argument("render_clip: pose/aperture length mismatch");
    int T = (int)pose.size();
    Tensor clip({T, 3, resolution, resolution});
    int64_t fsz = (int64_t)3 * resolution * resolution;
    for (int t = 0; t < T; ++t) {
        Tensor frame = render_face(id, pose[t], aperture[t], resolution);
        std::copy(frame.data(), frame.data() + fsz, clip.data() + t * fsz);
    }
    return clip;
}

Tensor signal_window(const DrivingSignal& sig, int frame) {
    int frames = (int)sig.aperture.size();
    if (frame < 0 || frame >= frames)
        throw std::invalid_argument("signal_window: frame out of range");
    Tensor win({1, 16, 16});
    // 16 consecutive segments of kSamplesPerFrame samples centered on the
    // frame; 16 DFT magnitude bins per segment
    for (int seg = 0; seg < 16; ++seg) {
        int base = (frame - 8 + seg) * kSamplesPerFrame;
        float x[kSamplesPerFrame];
        for (int n = 0; n < kSamplesPerFrame; ++n) {
            int idx = base + n;
            x[n] = (idx >= 0 && idx < (int)sig.samples.size()) ? sig.samples[idx] : 0.0f;
        }
        for (int k = 0; k < 16; ++k) {
            double re = 0.0, im = 0.0;
            for (int n = 0; n < kSamplesPerFrame; ++n) {
                double ph = kTau * k * n / kSamplesPerFrame;
                re += x[n] * std::cos(ph);
                im -= x[n] * std::sin(ph);
            }
            double mag = std::sqrt(re * re + im * im) / kSamplesPerFrame;
            win.at3(0, seg, k) = (float)std::min(1.0, mag);
        }
    }
    return win;
}

Tensor signal_windows(const DrivingSignal& sig) {
    int T = (int)sig.aperture.size();
    Tensor out({T, 1, 16, 16});
    for (int t = 0; t < T; ++t) {
        Tensor w = signal_window(sig, t);
        std::copy(w.data(), w.data() + 256, out.data() + (int64_t)t * 256);
    }
    return out;
}

Box mouth_box(const Identity& id, const PoseFrame& pose, int resolution) {
    Frame2 f(pose, resolution);
    float mm = mouth_max_px(resolution);
    float mcx, mcy;
    f.to_image(0.0f, mouth_offset_y(id), mcx, mcy);
    // conservative axis-aligned bound of the rotated max-aperture mouth
    float hw = 0.5f * id.mouth_width;
    float hx = hw * std::fabs(f.c) + mm * std::fabs(f.s) + 1.0f;
    float hy = hw * std::fabs(f.s) + mm * std::fabs(f.c) + 1.0f;
    Box b;
    b.x0 = (int)std::floor(mcx - hx);
    b.x1 = (int)std::ceil(mcx + hx);
    b.y0 = (int)std::floor(mcy - hy);
    b.y1 = (int)std::ceil(mcy + hy);
    return b;
}

Box face_box(const Identity& id, const PoseFrame& pose, int resolution) {
    Frame2 f(pose, resolution);
    float hx = id.axis_x * std::fabs(f.c) + id.axis_y * std::fabs(f.s) + 1.0f;
    float hy = id.axis_x * std::fabs(f.s) + id.axis_y * std::fabs(f.c) + 1.0f;
    Box b;
    b.x0 = std::max(0, (int)std::floor(f.cx - hx));
    b.x1 = std::min(resolution, (int)std::ceil(f.cx + hx));
    b.y0 = std::max(0, (int)std::floor(f.cy - hy));
    b.y1 = std::min(resolution, (int)std::ceil(f.cy + hy));
    return b;
}

double measure_aperture_px(const Tensor& frame, const Identity& id, const PoseFrame& pose,
                           int resolution) {
    if (frame.rank() != 3 || frame.dim(0) != 3 || frame.dim(1) != resolution ||
        frame.dim(2) != resolution)
        throw std::invalid_argument("measure_aperture_px: want (3,R,R) frame, got " +
                                    shape_str(frame.shape()));
    Box b = mouth_box(id, pose, resolution);
    if (b.x0 < 0 || b.y0 < 0 || b.x1 > resolution || b.y1 > resolution)
        throw std::invalid_argument("measure_aperture_px: mouth box outside the frame");
    Frame2 f(pose, resolution);
    float mm = mouth_max_px(resolution);
    float mcx, mcy;
    f.to_image(0.0f, mouth_offset_y(id), mcx, mcy);
    // scan along the local vertical axis through the mouth center
    float dirx = -f.s, diry = f.c;
    const float step = 0.25f;
    int nsteps = (int)std::ceil(2.0f * (mm + 2.0f) / step);
    const float* ref[3] = {id.color, kEyeColor, kMouthColor};
    int run = 0, best = 0;
    for (int i = 0; i <= nsteps; ++i) {
        float t = -(mm + 2.0f) + i * step;
        int px = (int)std::lround(mcx + t * dirx);
        int py = (int)std::lround(mcy + t * diry);
        float v[3];
        for (int c = 0; c < 3; ++c) v[c] = frame.at3(c, py, px);
        // nearest color among {face, eye, mouth, background}
        double dbg = 0.0, dmin;
        int cls = 3;  // background
        for (int c = 0; c < 3; ++c) dbg += (double)v[c] * v[c];
        dmin = dbg;
        for (int r = 0; r < 3; ++r) {
            double d = 0.0;
            for (int c = 0; c < 3; ++c) {
                double e = (double)v[c] - ref[r][c];
                d += e * e;
            }
            if (d < dmin) {
                dmin = d;
                cls = r;
            }
        }
        bool is_mouth = cls == 2 && dmin <= 0.5;
        if (is_mouth) {
            ++run;
            best = std::max(best, run);
        } else {
            run = 0;
        }
    }
    return 0.5 * best * step;  // vertical semi-axis
}

Dataset build_pairs(int n_identities, int signals_per_identity, int frames_per_clip,
                    int resolution, uint64_t seed) {
    if (n_identities < 1 || signals_per_identity < 1 || frames_per_clip < 1)
        throw std::invalid_argument("build_pairs: counts must be positive");
    Dataset ds;
    ds.resolution = resolution;
    int per_id = signals_per_identity + 1;
    for (int i = 0; i < n_identities; ++i) {
        Identity id = make_identity(mix_seed(seed, 1000 + i), resolution);
        std::vector<PoseFrame> pose =
            make_pose_track(mix_seed(seed, 2000 + i), frames_per_clip, resolution);
        int base_index = (int)ds.clips.size();
        for (int j = 0; j < per_id; ++j) {
            SyntheticClip clip;
            clip.clip_id = i * per_id + j;
            clip.identity_id = i;
            clip.signal_id = clip.clip_id;
            clip.identity = id;
            clip.pose = pose;
            clip.signal = make_signal(mix_seed(seed, 3000 + clip.signal_id), frames_per_clip);
            clip.frames = render_clip(id, pose, clip.signal.aperture, resolution);
            ds.clips.push_back(std::move(clip));
            if (j > 0) ds.pairs.push_back({base_index, base_index + j});
        }
    }
    return ds;
}

void save_dataset(const std::string& dir, const Dataset& ds) {
    fs::create_directories(fs::path(dir) / "clips");
    std::ofstream man(fs::path(dir) / "manifest.txt");
    if (!man) throw std::runtime_error("cannot write manifest in " + dir);
    for (const auto& clip : ds.clips) {
        char name[64];
        std::snprintf(name, sizeof(name), "clips/clip_%04d.dckt", clip.clip_id);
        man << clip.clip_id << " " << clip.identity_id << " " << clip.signal_id << " "
            << clip.pose.size() << " " << name << "\n";
        int T = (int)clip.pose.size();
        Tensor samples({(int64_t)clip.signal.samples.size()},
                       std::vector<float>(clip.signal.samples));
        Tensor aperture({T}, std::vector<float>(clip.signal.aperture));
        Tensor pose({T, 3});
        for (int t = 0; t < T; ++t) {
            pose.at2(t, 0) = clip.pose[t].dx;
            pose.at2(t, 1) = clip.pose[t].dy;
            pose.at2(t, 2) = clip.pose[t].theta;
        }
        Tensor ident({7}, {clip.identity.color[0], clip.identity.color[1], clip.identity.color[2],
                           clip.identity.axis_x, clip.identity.axis_y, clip.identity.eye_spacing,
                           clip.identity.mouth_width});
        save_dckt((fs::path(dir) / name).string(), {clip.frames, samples, aperture, pose, ident});
    }
}

Dataset load_dataset(const std::string& dir) {
    std::ifstream man(fs::path(dir) / "manifest.txt");
    if (!man) throw std::runtime_error("cannot open manifest in " + dir);
    Dataset ds;
    std::string line;
    int lineno = 0;
    while (std::getline(man, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream is(line);
        SyntheticClip clip;
        std::string path;
        int64_t frames = 0;
        if (!(is >> clip.clip_id >> clip.identity_id >> clip.signal_id >> frames >> path))
            throw std::runtime_error("manifest: bad line " + std::to_string(lineno));
        std::vector<Tensor> parts = load_dckt_all((fs::path(dir) / path).string());
        if (parts.size() != 5)
            throw std::runtime_error("clip file " + path + ": want 5 tensors, got " +
                                     std::to_string(parts.size()));
        clip.frames = std::move(parts[0]);
        if (clip.frames.rank() != 4 || clip.frames.dim(0) != frames)
            throw std::runtime_error("clip file " + path + ": frame count mismatch");
        const Tensor& samples = parts[1];
        const Tensor& aperture = parts[2];
        const Tensor& pose = parts[3];
        const Tensor& ident = parts[4];
        if (ident.numel() != 7 || pose.rank() != 2 || pose.dim(0) != frames || pose.dim(1) != 3 ||
            aperture.numel() != frames || samples.numel() != frames * kSamplesPerFrame)
            throw std::runtime_error("clip file " + path + ": malformed payload");
        clip.signal.samples.assign(samples.data(), samples.data() + samples.numel());
        clip.signal.aperture.assign(aperture.data(), aperture.data() + aperture.numel());
        clip.pose.resize(frames);
        for (int64_t t = 0; t < frames; ++t)
            clip.pose[t] = {pose.at2(t, 0), pose.at2(t, 1), pose.at2(t, 2)};
        clip.identity.color[0] = ident[0];
        clip.identity.color[1] = ident[1];
        clip.identity.color[2] = ident[2];
        clip.identity.axis_x = ident[3];
        clip.identity.axis_y = ident[4];
        clip.identity.eye_spacing = ident[5];
        clip.identity.mouth_width = ident[6];
        clip.identity.seed = 0;
        if (ds.resolution == 0)
            ds.resolution = (int)clip.frames.dim(2);
        else if (ds.resolution != clip.frames.dim(2))
            throw std::runtime_error("dataset: mixed resolutions");
        ds.clips.push_back(std::move(clip));
    }
    if (ds.clips.empty()) throw std::runtime_error("dataset: empty manifest in " + dir);
    // first clip of each identity (in manifest order) is the pairing base
    for (size_t i = 0; i < ds.clips.size(); ++i) {
        size_t base = i;
        while (base > 0 && ds.clips[base - 1].identity_id == ds.clips[i].identity_id) --base;
        if (base != i) ds.pairs.push_back({(int)base, (int)i});
    }
    return ds;
}

}  // namespace dckgen
