#pragma once

#include "tdoamap/scene.hpp"
#include "tdoamap/timing.hpp"
#include "tdoamap/types.hpp"

#include <string_view>

namespace tdoamap {

enum class MapSource { from_toa, from_tdoa, closed_form };

std::string_view to_string(MapSource source) noexcept;

/// Offset-free mapped matrix f, in seconds.
///
/// Column `ref_src` is exactly zero and every column averages to zero over
/// the microphones (up to rounding).
struct MappedMatrix {
    Grid values;
    MapSource source_kind = MapSource::closed_form;

    std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

/// Geometry-only quantities that put f in TOA-like form:
///   f[i][j] = y[i][j] - delta_dot[i] + eta_dot[j]
struct DerivedOffsets {
    Eigen::VectorXd delta_dot;  // |r_i - s_ref| / c
    Eigen::VectorXd eta_dot;    // mean_i (|r_i - s_ref| - |r_i - s_j|) / c
    Eigen::VectorXd x;          // |r_i - s_ref| / c
    Grid y;                     // |r_i - s_j| / c
};

/// Applies the mapping to a measured TOA or TDOA matrix:
///
///   d[i][j]   = m[i][j] - m[i][ref_src]
///   out[i][j] = d[i][j] - (1/M) sum_k d[k][j]
///
/// The arithmetic is identical for both kinds; the kind only sets the
/// provenance tag. Column means are summed left to right in row order.
MappedMatrix map_timing(const TimingMatrix& m, std::size_t ref_src = 0);

// (y[i][j] - mean_i y[i][j]) - (x[i] - mean_i x[i]) from candidate positions.
// Never touches clock offsets.
MappedMatrix closed_form_from_positions(const Points& mics, const Points& srcs, double c,
                                        std::size_t ref_src = 0);

MappedMatrix closed_form_map(const Scene& scene, std::size_t ref_src = 0);

DerivedOffsets derived_offsets(const Scene& scene, std::size_t ref_src = 0);

// Elementwise a - b. Throws ShapeError on mismatched dimensions.
Grid residual(const MappedMatrix& a, const MappedMatrix& b);

Eigen::VectorXd column_means(const MappedMatrix& m);
Eigen::VectorXd column_means(const Grid& m);

double max_abs(const Grid& m);
double max_abs(const Eigen::VectorXd& v);

}  // namespace tdoamap
