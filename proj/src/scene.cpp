#include "tdoamap/scene.hpp"

#include "tdoamap/rng.hpp"

#include <algorithm>
#include <cmath>

namespace tdoamap {

namespace {

bool all_finite(const Points& points) {
    return std::all_of(points.begin(), points.end(),
                       [](const Point& p) { return p.allFinite(); });
}

}  // namespace

void validate(const SceneConfig& config) {
    if (config.num_mics < 1 || config.num_srcs < 1) {
        throw ConfigError("scene config: microphone and source counts must be >= 1");
    }
    if (!config.room.allFinite() || (config.room.array() <= 0.0).any()) {
        throw ConfigError("scene config: room sides must be finite and > 0");
    }
    if (!std::isfinite(config.offset_range) || config.offset_range < 0.0) {
        throw ConfigError("scene config: offset range must be finite and >= 0");
    }
    if (!std::isfinite(config.speed) || config.speed <= 0.0) {
        throw ConfigError("scene config: speed of sound must be finite and > 0");
    }
}

void validate(const Scene& scene) {
    if (scene.mics.empty() || scene.srcs.empty()) {
        throw ConfigError("scene: needs at least one microphone and one source");
    }
    if (static_cast<std::size_t>(scene.delta.size()) != scene.mics.size() ||
        static_cast<std::size_t>(scene.eta.size()) != scene.srcs.size()) {
        throw ShapeError("scene: offset vectors do not match position counts");
    }
    if (!std::isfinite(scene.c) || scene.c <= 0.0) {
        throw ConfigError("scene: speed of sound must be finite and > 0");
    }
    if (!all_finite(scene.mics) || !all_finite(scene.srcs) || !scene.delta.allFinite() ||
        !scene.eta.allFinite()) {
        throw ConfigError("scene: positions and offsets must be finite");
    }
}

Scene generate_scene(const SceneConfig& config) {
    validate(config);
    Rng rng(config.seed);

    auto draw_points = [&](std::size_t count) {
        Points points(count);
        for (auto& p : points) {
            for (int axis = 0; axis < 3; ++axis) {
                p[axis] = rng.uniform(0.0, config.room[axis]);
            }
        }
        return points;
    };
    auto draw_offsets = [&](std::size_t count) {
        Eigen::VectorXd offsets(static_cast<Eigen::Index>(count));
        for (Eigen::Index k = 0; k < offsets.size(); ++k) {
            offsets[k] = rng.uniform(-config.offset_range, config.offset_range);
        }
        return offsets;
    };

    Scene scene;
    scene.mics = draw_points(config.num_mics);
    scene.srcs = draw_points(config.num_srcs);
    scene.delta = draw_offsets(config.num_mics);
    scene.eta = draw_offsets(config.num_srcs);
    scene.c = config.speed;
    return scene;
}

Scene normalize_scene(const Scene& scene) {
    Scene out = scene;
    if (scene.srcs.empty()) {
        return out;
    }
    const Point origin = scene.srcs.front();
    for (auto& p : out.mics) p -= origin;
    for (auto& p : out.srcs) p -= origin;
    return out;
}

double scene_diameter(const Scene& scene) {
    Points all = scene.mics;
    all.insert(all.end(), scene.srcs.begin(), scene.srcs.end());
    double diameter = 0.0;
    for (std::size_t a = 0; a < all.size(); ++a) {
        for (std::size_t b = a + 1; b < all.size(); ++b) {
            diameter = std::max(diameter, (all[a] - all[b]).norm());
        }
    }
    return diameter;
}

}  // namespace tdoamap
