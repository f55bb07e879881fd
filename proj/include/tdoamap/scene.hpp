#pragma once

#include "tdoamap/types.hpp"

#include <cstdint>

namespace tdoamap {

/// Ground truth of an asynchronous recording setup.
///
/// `delta[i]` is the recording start time of microphone i and `eta[j]` the
/// emission time of source j, both in seconds. Positions are in meters and
/// `c` is the speed of sound in m/s.
struct Scene {
    Points mics;
    Points srcs;
    Eigen::VectorXd delta;
    Eigen::VectorXd eta;
    double c = 340.0;

    std::size_t num_mics() const noexcept { return mics.size(); }
    std::size_t num_srcs() const noexcept { return srcs.size(); }
};

struct SceneConfig {
    std::size_t num_mics = 20;
    std::size_t num_srcs = 20;
    Eigen::Vector3d room{10.0, 10.0, 3.0};
    double offset_range = 1.0;
    double speed = 340.0;
    std::uint64_t seed = 0;
};

// Throws ConfigError when the config breaks its invariants.
void validate(const SceneConfig& config);

// Throws ConfigError when the scene breaks its invariants.
void validate(const Scene& scene);

// Draws positions uniformly in [0, room] and offsets uniformly in
// [-offset_range, offset_range]. Draw order: mics (x, y, z each), srcs, delta, eta.
Scene generate_scene(const SceneConfig& config);

// Translates every position by -srcs[0]. Offsets and c are untouched.
Scene normalize_scene(const Scene& scene);

// Max pairwise distance over mics and sources together.
double scene_diameter(const Scene& scene);

}  // namespace tdoamap
