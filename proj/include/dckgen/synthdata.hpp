#pragma once

// Procedural face dataset: ellipse faces with eyes and a mouth whose vertical
// opening follows a 1-D driving signal. Clips sharing an identity also share
// the pose track, so clips of one identity differ only in mouth motion.

#include <string>
#include <utility>
#include <vector>

#include "dckgen/generator.hpp"
#include "dckgen/tensor.hpp"

namespace dckgen {

constexpr int kSamplesPerFrame = 16;

// fixed palette (background is zero)
constexpr float kEyeColor[3] = {-0.85f, -0.85f, -0.80f};
constexpr float kMouthColor[3] = {-0.20f, -0.90f, -0.90f};

struct Identity {
    float color[3];     // face color, each channel in [-1,1]
    float axis_x;       // face semi-axes in px
    float axis_y;
    float eye_spacing;  // px between eye centers
    float mouth_width;  // px
    uint64_t seed;
};

struct PoseFrame {
    float dx, dy;  // translation of the face center, px
    float theta;   // rotation, radians
};

struct DrivingSignal {
    std::vector<float> samples;   // kSamplesPerFrame per frame, in [-1,1]
    std::vector<float> aperture;  // per frame in [0,1], derived from samples
};

struct SyntheticClip {
    int clip_id = 0;
    int identity_id = 0;
    int signal_id = 0;
    Identity identity;
    std::vector<PoseFrame> pose;
    DrivingSignal signal;
    Tensor frames;  // (T,3,R,R) in [-1,1]
};

struct Dataset {
    int resolution = 0;
    std::vector<SyntheticClip> clips;
    std::vector<std::pair<int, int>> pairs;  // (input clip index, target clip index)
};

// Maximum vertical mouth semi-axis in px (aperture 1.0).
float mouth_max_px(int resolution);

Identity make_identity(uint64_t seed, int resolution);
std::vector<PoseFrame> make_pose_track(uint64_t seed, int frames, int resolution);
DrivingSignal make_signal(uint64_t seed, int frames);
// Aperture track from raw samples (what make_signal uses internally).
std::vector<float> aperture_from_samples(const std::vector<float>& samples);

Tensor render_face(const Identity& id, const PoseFrame& pose, float aperture, int resolution);
Tensor render_clip(const Identity& id, const std::vector<PoseFrame>& pose,
                   const std::vector<float>& aperture, int resolution);

// 16x16 time/frequency window centered on the frame, values in [0,1].
Tensor signal_window(const DrivingSignal& sig, int frame);
Tensor signal_windows(const DrivingSignal& sig);  // (T,1,16,16)

// Axis-aligned boxes in image coordinates.
Box mouth_box(const Identity& id, const PoseFrame& pose, int resolution);
Box face_box(const Identity& id, const PoseFrame& pose, int resolution);

// Measured vertical mouth semi-axis in px, read off the rendered (or
// generated) frame by scanning through the mouth center. Throws if the mouth
// search box leaves the frame.
double measure_aperture_px(const Tensor& frame, const Identity& id, const PoseFrame& pose,
                           int resolution);

// n_identities base clips, each cross-paired with signals_per_identity other
// clips of the same identity+pose but different driving signals.
Dataset build_pairs(int n_identities, int signals_per_identity, int frames_per_clip,
                    int resolution, uint64_t seed);

void save_dataset(const std::string& dir, const Dataset& ds);
Dataset load_dataset(const std::string& dir);

}  // namespace dckgen
