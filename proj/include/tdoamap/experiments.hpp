#pragma once

#include "tdoamap/scene.hpp"
#include "tdoamap/timing.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace tdoamap {

inline constexpr double kDefaultTolerance = 1e-12;

// Statistics of one Monte Carlo trial, all in seconds.
struct TrialResult {
    std::size_t trial_index = 0;
    double max_abs_residual_toa_tdoa = 0.0;        // max |f(TOA) - f(TDOA)|
    double max_abs_residual_vs_closed_form = 0.0;  // max |f(TOA) - closed form|
    double max_abs_column_mean_toa = 0.0;
    double max_abs_column_mean_tdoa = 0.0;
    double max_abs_column_mean_closed_form = 0.0;
    double max_abs_column_mean = 0.0;  // max of the three above
    double f_min = 0.0;                // over f(TOA) and f(TDOA)
    double f_max = 0.0;
    double f_bound = 0.0;  // 2 * scene_diameter / c
};

struct ValidationReport {
    SceneConfig config;
    std::size_t num_trials = 0;
    double tolerance = kDefaultTolerance;
    std::size_t data_points = 0;  // num_trials * M * N

    double max_abs_residual_toa_tdoa = 0.0;
    double max_abs_residual_vs_closed_form = 0.0;
    double max_abs_column_mean_toa = 0.0;
    double max_abs_column_mean_tdoa = 0.0;
    double max_abs_column_mean_closed_form = 0.0;
    double max_abs_column_mean = 0.0;
    double f_min = 0.0;
    double f_max = 0.0;

    // 2 * room diagonal / c, the bound every trial's |f| must respect.
    double analytic_bound = 0.0;
    std::size_t bound_violations = 0;  // trials with max|f| > 2 * diameter / c

    bool pass = false;  // every aggregate residual / mean max < tolerance
    bool bound_ok() const noexcept { return bound_violations == 0; }
};

struct MonteCarloRun {
    ValidationReport report;
    std::vector<TrialResult> trials;
    // Entries of every f(TOA) matrix, trial-major then row-major. Filled only on request.
    std::vector<double> f_values;
};

struct MonteCarloOptions {
    std::size_t num_trials = 1000;
    double tolerance = kDefaultTolerance;
    unsigned threads = 1;
    bool keep_f_values = false;
};

// Scene config of trial `index`: the master config with seed mix_seed(master, index).
SceneConfig trial_config(const SceneConfig& master, std::size_t index);

TrialResult run_trial(const SceneConfig& master, std::size_t index);

/// Runs every trial and aggregates worst-case statistics.
///
/// Each trial's randomness derives only from (config.seed, trial index) and
/// results are stored by index before a sequential reduction, so the report
/// is bit-identical for any thread count.
MonteCarloRun run_monte_carlo(const SceneConfig& config, const MonteCarloOptions& options);

ValidationReport run_monte_carlo(const SceneConfig& config, std::size_t num_trials,
                                 double tolerance);

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    std::size_t count = 0;
};

// Uniform bins over [lo, hi]; the last bin is closed on the right. Values
// outside the range (and NaN) are dropped.
std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t num_bins,
                                    double lo, double hi);

nlohmann::json to_json(const ValidationReport& report);

/// Identity and zero-mean checks on a measured TOA matrix: the TDOA matrix is
/// derived by row subtraction and both are mapped with the same reference source.
struct TimingValidation {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t data_points = 0;
    std::size_t ref_mic = 0;
    std::size_t ref_src = 0;
    double tolerance = kDefaultTolerance;
    double max_abs_residual_toa_tdoa = 0.0;
    double max_abs_column_mean_toa = 0.0;
    double max_abs_column_mean_tdoa = 0.0;
    double f_min = 0.0;
    double f_max = 0.0;
    bool pass = false;
};

TimingValidation validate_toa(const TimingMatrix& toa, std::size_t ref_mic, std::size_t ref_src,
                              double tolerance);

nlohmann::json to_json(const TimingValidation& v);

}  // namespace tdoamap
