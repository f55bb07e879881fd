#include "tdoamap/experiments.hpp"
#include "tdoamap/ingest.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace tdoamap {
namespace {

SceneConfig small_config(std::uint64_t seed) {
    SceneConfig config;
    config.num_mics = 8;
    config.num_srcs = 6;
    config.seed = seed;
    return config;
}

TEST(MonteCarlo, DefaultConfigPasses) {
    SceneConfig config;
    config.seed = 42;
    const ValidationReport rep = run_monte_carlo(config, 1000, 1e-12);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.data_points, 400000u);
    EXPECT_LT(rep.max_abs_residual_toa_tdoa, 1e-12);
    EXPECT_LT(rep.max_abs_residual_vs_closed_form, 1e-12);
    EXPECT_LT(rep.max_abs_column_mean, 1e-12);
    EXPECT_EQ(rep.bound_violations, 0u);
    EXPECT_NEAR(rep.analytic_bound, 2.0 * std::sqrt(209.0) / 340.0, 1e-15);
    EXPECT_GE(rep.f_min, -rep.analytic_bound);
    EXPECT_LE(rep.f_max, rep.analytic_bound);
}

TEST(MonteCarlo, SingleCellTrialIsAllZero) {
    SceneConfig config;
    config.num_mics = 1;
    config.num_srcs = 1;
    config.seed = 1;
    const ValidationReport rep = run_monte_carlo(config, 1, 1e-12);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.data_points, 1u);
    EXPECT_EQ(rep.max_abs_residual_toa_tdoa, 0.0);
    EXPECT_EQ(rep.max_abs_residual_vs_closed_form, 0.0);
    EXPECT_EQ(rep.max_abs_column_mean, 0.0);
    EXPECT_EQ(rep.f_min, 0.0);
    EXPECT_EQ(rep.f_max, 0.0);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeReport) {
    MonteCarloOptions options;
    options.num_trials = 64;
    options.keep_f_values = true;
    options.threads = 1;
    const MonteCarloRun serial = run_monte_carlo(small_config(9), options);
    options.threads = 8;
    const MonteCarloRun parallel = run_monte_carlo(small_config(9), options);
    EXPECT_EQ(to_json(serial.report).dump(), to_json(parallel.report).dump());
    EXPECT_EQ(serial.f_values, parallel.f_values);
}

TEST(MonteCarlo, MoreTrialsNeverLowerTheMaxima) {
    const ValidationReport small = run_monte_carlo(small_config(5), 50, 1e-12);
    const ValidationReport large = run_monte_carlo(small_config(5), 100, 1e-12);
    EXPECT_GE(large.max_abs_residual_toa_tdoa, small.max_abs_residual_toa_tdoa);
    EXPECT_GE(large.max_abs_residual_vs_closed_form, small.max_abs_residual_vs_closed_form);
    EXPECT_GE(large.max_abs_column_mean, small.max_abs_column_mean);
    EXPECT_GE(large.f_max, small.f_max);
    EXPECT_LE(large.f_min, small.f_min);
}

TEST(MonteCarlo, TrialsMatchStandaloneEvaluation) {
    MonteCarloOptions options;
    options.num_trials = 5;
    const MonteCarloRun run = run_monte_carlo(small_config(3), options);
    for (std::size_t t = 0; t < 5; ++t) {
        const TrialResult r = run_trial(small_config(3), t);
        EXPECT_EQ(r.trial_index, t);
        EXPECT_EQ(r.f_min, run.trials[t].f_min);
        EXPECT_EQ(r.max_abs_residual_toa_tdoa, run.trials[t].max_abs_residual_toa_tdoa);
    }
}

TEST(MonteCarlo, TinyToleranceFails) {
    const ValidationReport rep = run_monte_carlo(small_config(2), 20, 1e-30);
    EXPECT_FALSE(rep.pass);
}

TEST(MonteCarlo, RejectsBadArguments) {
    EXPECT_THROW(run_monte_carlo(small_config(1), 0, 1e-12), ConfigError);
    EXPECT_THROW(run_monte_carlo(small_config(1), 10, 0.0), ConfigError);
    SceneConfig bad = small_config(1);
    bad.num_mics = 0;
    EXPECT_THROW(run_monte_carlo(bad, 10, 1e-12), ConfigError);
}

TEST(MonteCarlo, ReportJsonCarriesConfigAndCounts) {
    SceneConfig config = small_config(77);
    const nlohmann::json j = to_json(run_monte_carlo(config, 10, 1e-12));
    EXPECT_EQ(j.at("data_points").get<std::size_t>(), 480u);
    EXPECT_EQ(j.at("num_trials").get<std::size_t>(), 10u);
    EXPECT_EQ(j.at("config").at("seed").get<std::uint64_t>(), 77u);
    EXPECT_TRUE(j.at("pass").get<bool>());
    EXPECT_EQ(j.at("f_range").size(), 2u);
}

TEST(Histogram, CountsDirectly) {
    const std::vector<double> values{0.1, 0.1, 0.9};
    const auto bins = histogram(values, 2, 0.0, 1.0);
    ASSERT_EQ(bins.size(), 2u);
    EXPECT_EQ(bins[0].count, 2u);
    EXPECT_EQ(bins[1].count, 1u);
    EXPECT_EQ(bins[0].left, 0.0);
    EXPECT_EQ(bins[0].right, 0.5);
    EXPECT_EQ(bins[1].right, 1.0);
}

TEST(Histogram, EmptyInputGivesZeroCounts) {
    const auto bins = histogram({}, 4, -1.0, 1.0);
    ASSERT_EQ(bins.size(), 4u);
    for (const auto& b : bins) EXPECT_EQ(b.count, 0u);
}

TEST(Histogram, EndpointsAndOutOfRange) {
    const std::vector<double> values{-1.0, 1.0, 1.0000001, -2.0, std::nan("")};
    const auto bins = histogram(values, 4, -1.0, 1.0);
    EXPECT_EQ(bins.front().count, 1u);
    EXPECT_EQ(bins.back().count, 1u);
}

TEST(Histogram, RejectsBadArguments) {
    EXPECT_THROW(histogram({}, 0, 0.0, 1.0), ConfigError);
    EXPECT_THROW(histogram({}, 3, 1.0, 1.0), ConfigError);
}

TEST(Histogram, ConservesInRangeSamplesOfDefaultRun) {
    SceneConfig config;
    config.seed = 42;
    MonteCarloOptions options;
    options.keep_f_values = true;
    const MonteCarloRun run = run_monte_carlo(config, options);
    ASSERT_EQ(run.f_values.size(), 400000u);

    const auto bins = histogram(run.f_values, 100, -0.1, 0.1);
    std::size_t total = 0;
    for (const auto& b : bins) total += b.count;
    const auto in_range = static_cast<std::size_t>(std::count_if(
        run.f_values.begin(), run.f_values.end(), [](double v) { return v >= -0.1 && v <= 0.1; }));
    EXPECT_EQ(total, in_range);

    // Each bin against a direct filter count on its own edges.
    for (std::size_t k = 0; k < bins.size(); ++k) {
        const bool last = k + 1 == bins.size();
        const auto direct = static_cast<std::size_t>(
            std::count_if(run.f_values.begin(), run.f_values.end(), [&](double v) {
                return v >= bins[k].left && (last ? v <= bins[k].right : v < bins[k].right);
            }));
        EXPECT_EQ(bins[k].count, direct) << "bin " << k;
    }
}

TEST(ValidateToa, MeasuredMatrixPasses) {
    SceneConfig config;
    config.num_mics = 12;
    config.num_srcs = 65;
    config.seed = 8;
    TimingMatrix toa = synth_toa(generate_scene(config));
    toa = inject_offsets(toa, 1.0, 3).toa;
    const TimingValidation v = validate_toa(toa, 0, 0, 1e-12);
    EXPECT_TRUE(v.pass);
    EXPECT_EQ(v.data_points, 780u);
    EXPECT_LT(v.max_abs_residual_toa_tdoa, 1e-12);
    EXPECT_THROW(validate_toa(toa, 12, 0, 1e-12), IndexError);
    EXPECT_THROW(validate_toa(toa, 0, 65, 1e-12), IndexError);
}

}  // namespace
}  // namespace tdoamap
