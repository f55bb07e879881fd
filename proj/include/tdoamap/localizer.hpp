#pragma once

#include "tdoamap/mapping.hpp"
#include "tdoamap/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tdoamap {

// Distances below this (meters) contribute zero derivative.
inline constexpr double kCoincidentDistance = 1e-9;

struct Geometry {
    Points mics;
    Points srcs;
};

struct GeometryEstimate {
    Points mics;
    Points srcs;
    double final_cost = 0.0;  // squared seconds
    std::size_t iterations = 0;
    bool converged = false;
    // Cost at the start and after every accepted step of the winning restart.
    std::vector<double> cost_history;
    std::size_t restart_index = 0;
    // (M-1)(N-1) >= 3(M+N)-6; geometry may be underdetermined otherwise.
    bool identifiable = true;
};

struct SolveOptions {
    std::size_t max_iterations = 200;
    // Converged once an accepted step lowers the cost by less than this fraction.
    double cost_tolerance = 1e-12;
    // Converged once |step| <= step_tolerance * (|params| + step_tolerance), meters.
    double step_tolerance = 1e-10;
    // Initial damping relative to the largest diagonal entry of J^T J.
    double initial_damping = 1e-3;
    std::size_t num_restarts = 1;
    std::uint64_t seed = 0;
    std::size_t ref_src = 0;
    // Restarts after the first perturb the given init by N(0, restart_sigma^2) per coordinate.
    double restart_sigma = 0.1;
    // Without an init, restarts draw positions uniformly in [0, init_box].
    Eigen::Vector3d init_box{10.0, 10.0, 3.0};
};

// Flattened parameter layout: mics (x, y, z each) then sources.
Eigen::VectorXd flatten(const Points& mics, const Points& srcs);
Geometry unflatten(const Eigen::VectorXd& params, std::size_t num_mics, std::size_t num_srcs);

// Closed-form mapped matrix of candidate positions.
MappedMatrix model_f(const Points& mics, const Points& srcs, double c, std::size_t ref_src = 0);

struct CostAndGradient {
    double cost = 0.0;  // sum of squared residuals, s^2
    Eigen::VectorXd gradient;
};

// cost = sum_ij (f_obs[i][j] - model_f[i][j])^2 with its exact gradient.
// Throws NumericError on non-finite params, ShapeError on a length mismatch.
CostAndGradient objective_and_gradient(const Eigen::VectorXd& params, const MappedMatrix& f_obs,
                                       double c, std::size_t ref_src = 0);

// d model_f / d params; row i*N + j holds the derivative of f[i][j].
Eigen::MatrixXd model_jacobian(const Eigen::VectorXd& params, std::size_t num_mics,
                               std::size_t num_srcs, double c, std::size_t ref_src = 0);

bool is_identifiable(std::size_t num_mics, std::size_t num_srcs) noexcept;

/// Fits microphone and source positions to an observed mapped matrix.
///
/// Damped Gauss-Newton (Levenberg-Marquardt): the damping grows on rejected
/// steps and shrinks on accepted ones, so the accepted cost sequence is
/// non-increasing. Each restart is seeded with mix_seed(opts.seed, restart);
/// the lowest final cost wins, ties going to the lower restart index.
/// Running out of iterations returns the best iterate with converged=false.
GeometryEstimate solve(const MappedMatrix& f_obs, double c, const std::optional<Geometry>& init,
                       const SolveOptions& opts);

// RMSE after the best rigid alignment of est onto truth (rotation,
// reflection and translation). Throws ShapeError on empty or unequal clouds.
double procrustes_rmse(const Points& est, const Points& truth);

nlohmann::json estimate_to_json(const GeometryEstimate& est);

}  // namespace tdoamap
