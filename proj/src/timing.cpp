#include "tdoamap/timing.hpp"

#include "tdoamap/rng.hpp"

#include <cmath>
#include <string>

namespace tdoamap {

std::string_view to_string(TimingKind kind) noexcept {
    return kind == TimingKind::toa ? "TOA" : "TDOA";
}

namespace {

Grid propagation_times(const Scene& scene) {
    const auto m = static_cast<Eigen::Index>(scene.num_mics());
    const auto n = static_cast<Eigen::Index>(scene.num_srcs());
    Grid times(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            times(i, j) = (scene.mics[i] - scene.srcs[j]).norm() / scene.c;
        }
    }
    return times;
}

void check_ref_mic(std::size_t ref_mic, std::size_t rows) {
    if (ref_mic >= rows) {
        throw IndexError("reference microphone " + std::to_string(ref_mic) +
                         " out of range for " + std::to_string(rows) + " microphones");
    }
}

}  // namespace

TimingMatrix synth_toa(const Scene& scene) {
    validate(scene);
    TimingMatrix out{TimingKind::toa, propagation_times(scene), 0};
    for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
            out.values(i, j) = out.values(i, j) + scene.eta[j] - scene.delta[i];
        }
    }
    return out;
}

TimingMatrix synth_tdoa(const Scene& scene, std::size_t ref_mic) {
    validate(scene);
    check_ref_mic(ref_mic, scene.num_mics());
    const Grid times = propagation_times(scene);
    const auto ref = static_cast<Eigen::Index>(ref_mic);

    TimingMatrix out{TimingKind::tdoa, Grid(times.rows(), times.cols()), ref_mic};
    for (Eigen::Index i = 0; i < times.rows(); ++i) {
        for (Eigen::Index j = 0; j < times.cols(); ++j) {
            out.values(i, j) =
                times(i, j) - times(ref, j) + scene.delta[ref] - scene.delta[i];
        }
    }
    return out;
}

TimingMatrix tdoa_from_toa(const TimingMatrix& toa, std::size_t ref_mic) {
    if (toa.kind != TimingKind::toa) {
        throw KindError("tdoa_from_toa expects a TOA matrix");
    }
    check_ref_mic(ref_mic, toa.rows());
    const auto ref = static_cast<Eigen::Index>(ref_mic);

    TimingMatrix out{TimingKind::tdoa, Grid(toa.values.rows(), toa.values.cols()), ref_mic};
    for (Eigen::Index i = 0; i < toa.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < toa.values.cols(); ++j) {
            out.values(i, j) = toa.values(i, j) - toa.values(ref, j);
        }
    }
    return out;
}

TimingMatrix add_noise(const TimingMatrix& m, double sigma, std::uint64_t seed) {
    if (!std::isfinite(sigma) || sigma < 0.0) {
        throw ConfigError("noise sigma must be finite and >= 0");
    }
    TimingMatrix out = m;
    if (sigma == 0.0) {
        return out;
    }
    Rng rng(seed);
    for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
        // The reference row of a TDOA matrix stays exactly zero.
        if (out.kind == TimingKind::tdoa && static_cast<std::size_t>(i) == out.ref_mic) {
            continue;
        }
        for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
            out.values(i, j) += sigma * rng.normal();
        }
    }
    return out;
}

}  // namespace tdoamap
