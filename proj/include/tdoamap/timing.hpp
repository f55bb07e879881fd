#pragma once

#include "tdoamap/scene.hpp"
#include "tdoamap/types.hpp"

#include <cstdint>
#include <string_view>

namespace tdoamap {

enum class TimingKind { toa, tdoa };

std::string_view to_string(TimingKind kind) noexcept;

/// M x N timing matrix in seconds.
///
/// For TDOA matrices, `ref_mic` is the microphone every row was differenced
/// against and its row is identically zero.
struct TimingMatrix {
    TimingKind kind = TimingKind::toa;
    Grid values;
    std::size_t ref_mic = 0;

    std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

// t[i][j] = |r_i - s_j| / c + eta_j - delta_i
TimingMatrix synth_toa(const Scene& scene);

// tau[i][j] = |r_i - s_j| / c - |r_ref - s_j| / c + delta_ref - delta_i
// Emission times never enter, so the result is independent of scene.eta.
TimingMatrix synth_tdoa(const Scene& scene, std::size_t ref_mic = 0);

// Row subtraction tau[i][j] = t[i][j] - t[ref][j] on measured TOA.
TimingMatrix tdoa_from_toa(const TimingMatrix& toa, std::size_t ref_mic = 0);

// Adds i.i.d. N(0, sigma^2) to every entry (except the reference row of a
// TDOA matrix). sigma == 0 returns the input unchanged.
TimingMatrix add_noise(const TimingMatrix& m, double sigma, std::uint64_t seed);

}  // namespace tdoamap
