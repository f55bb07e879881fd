#include "tdoamap/experiments.hpp"

#include "tdoamap/mapping.hpp"
#include "tdoamap/rng.hpp"
#include "tdoamap/timing.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace tdoamap {

SceneConfig trial_config(const SceneConfig& master, std::size_t index) {
    SceneConfig config = master;
    config.seed = mix_seed(master.seed, index);
    return config;
}

namespace {

// f_out, when non-empty, receives f(TOA) in row-major order.
TrialResult evaluate_trial(const SceneConfig& master, std::size_t index, std::span<double> f_out) {
    const Scene scene = generate_scene(trial_config(master, index));

    const MappedMatrix f_toa = map_timing(synth_toa(scene));
    const MappedMatrix f_tdoa = map_timing(synth_tdoa(scene, 0));
    const MappedMatrix f_closed = closed_form_map(scene);

    TrialResult r;
    r.trial_index = index;
    r.max_abs_residual_toa_tdoa = max_abs(residual(f_toa, f_tdoa));
    r.max_abs_residual_vs_closed_form = max_abs(residual(f_toa, f_closed));
    r.max_abs_column_mean_toa = max_abs(column_means(f_toa));
    r.max_abs_column_mean_tdoa = max_abs(column_means(f_tdoa));
    r.max_abs_column_mean_closed_form = max_abs(column_means(f_closed));
    r.max_abs_column_mean = std::max(
        {r.max_abs_column_mean_toa, r.max_abs_column_mean_tdoa, r.max_abs_column_mean_closed_form});
    r.f_min = std::min(f_toa.values.minCoeff(), f_tdoa.values.minCoeff());
    r.f_max = std::max(f_toa.values.maxCoeff(), f_tdoa.values.maxCoeff());
    r.f_bound = 2.0 * scene_diameter(scene) / scene.c;
    if (!f_out.empty()) {
        std::copy(f_toa.values.data(), f_toa.values.data() + f_toa.values.size(), f_out.begin());
    }
    return r;
}

}  // namespace

TrialResult run_trial(const SceneConfig& master, std::size_t index) {
    return evaluate_trial(master, index, {});
}

MonteCarloRun run_monte_carlo(const SceneConfig& config, const MonteCarloOptions& options) {
    validate(config);
    if (options.num_trials < 1) {
        throw ConfigError("monte carlo: num_trials must be >= 1");
    }
    if (!(options.tolerance > 0.0)) {
        throw ConfigError("monte carlo: tolerance must be > 0");
    }

    const std::size_t cells = config.num_mics * config.num_srcs;
    MonteCarloRun run;
    run.trials.resize(options.num_trials);
    if (options.keep_f_values) {
        run.f_values.resize(options.num_trials * cells);
    }

    auto work = [&](std::size_t t) {
        std::span<double> f_out;
        if (options.keep_f_values) {
            f_out = std::span<double>(run.f_values).subspan(t * cells, cells);
        }
        run.trials[t] = evaluate_trial(config, t, f_out);
    };

    const unsigned threads =
        std::max(1u, std::min<unsigned>(options.threads,
                                        static_cast<unsigned>(options.num_trials)));
    if (threads == 1) {
        for (std::size_t t = 0; t < options.num_trials; ++t) work(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        {
            std::vector<std::jthread> pool;
            pool.reserve(threads);
            for (unsigned w = 0; w < threads; ++w) {
                pool.emplace_back([&] {
                    try {
                        for (std::size_t t = next++; t < options.num_trials; t = next++) work(t);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                });
            }
        }
        if (failure) std::rethrow_exception(failure);
    }

    ValidationReport& rep = run.report;
    rep.config = config;
    rep.num_trials = options.num_trials;
    rep.tolerance = options.tolerance;
    rep.data_points = options.num_trials * cells;
    rep.analytic_bound = 2.0 * config.room.norm() / config.speed;
    rep.f_min = run.trials.front().f_min;
    rep.f_max = run.trials.front().f_max;
    for (const TrialResult& r : run.trials) {
        rep.max_abs_residual_toa_tdoa = std::max(rep.max_abs_residual_toa_tdoa, r.max_abs_residual_toa_tdoa);
        rep.max_abs_residual_vs_closed_form =
            std::max(rep.max_abs_residual_vs_closed_form, r.max_abs_residual_vs_closed_form);
        rep.max_abs_column_mean_toa = std::max(rep.max_abs_column_mean_toa, r.max_abs_column_mean_toa);
        rep.max_abs_column_mean_tdoa = std::max(rep.max_abs_column_mean_tdoa, r.max_abs_column_mean_tdoa);
        rep.max_abs_column_mean_closed_form =
            std::max(rep.max_abs_column_mean_closed_form, r.max_abs_column_mean_closed_form);
        rep.max_abs_column_mean = std::max(rep.max_abs_column_mean, r.max_abs_column_mean);
        rep.f_min = std::min(rep.f_min, r.f_min);
        rep.f_max = std::max(rep.f_max, r.f_max);
        if (std::max(std::abs(r.f_min), std::abs(r.f_max)) > r.f_bound) {
            ++rep.bound_violations;
        }
    }
    rep.pass = rep.max_abs_residual_toa_tdoa < rep.tolerance &&
               rep.max_abs_residual_vs_closed_form < rep.tolerance &&
               rep.max_abs_column_mean < rep.tolerance;
    return run;
}

ValidationReport run_monte_carlo(const SceneConfig& config, std::size_t num_trials,
                                 double tolerance) {
    MonteCarloOptions options;
    options.num_trials = num_trials;
    options.tolerance = tolerance;
    return run_monte_carlo(config, options).report;
}

std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t num_bins,
                                    double lo, double hi) {
    if (num_bins < 1) {
        throw ConfigError("histogram: num_bins must be >= 1");
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw ConfigError("histogram: range must satisfy lo < hi");
    }
    const double width = (hi - lo) / static_cast<double>(num_bins);
    std::vector<HistogramBin> bins(num_bins);
    for (std::size_t k = 0; k < num_bins; ++k) {
        bins[k].left = lo + width * static_cast<double>(k);
        bins[k].right = k + 1 == num_bins ? hi : lo + width * static_cast<double>(k + 1);
    }
    for (const double v : values) {
        if (!(v >= lo && v <= hi)) continue;
        auto k = static_cast<std::size_t>((v - lo) / width);
        k = std::min(k, num_bins - 1);
        // Rounding in the division can land one bin off the stored edges.
        while (k > 0 && v < bins[k].left) --k;
        while (k + 1 < num_bins && v >= bins[k + 1].left) ++k;
        ++bins[k].count;
    }
    return bins;
}

nlohmann::json to_json(const ValidationReport& report) {
    const SceneConfig& c = report.config;
    return nlohmann::json{
        {"config",
         {{"num_mics", c.num_mics},
          {"num_srcs", c.num_srcs},
          {"room", {c.room.x(), c.room.y(), c.room.z()}},
          {"offset_range", c.offset_range},
          {"speed", c.speed},
          {"seed", c.seed}}},
        {"num_trials", report.num_trials},
        {"data_points", report.data_points},
        {"tolerance", report.tolerance},
        {"max_abs_residual_toa_tdoa", report.max_abs_residual_toa_tdoa},
        {"max_abs_residual_vs_closed_form", report.max_abs_residual_vs_closed_form},
        {"max_abs_column_mean", report.max_abs_column_mean},
        {"max_abs_column_mean_toa", report.max_abs_column_mean_toa},
        {"max_abs_column_mean_tdoa", report.max_abs_column_mean_tdoa},
        {"max_abs_column_mean_closed_form", report.max_abs_column_mean_closed_form},
        {"f_range", {report.f_min, report.f_max}},
        {"analytic_bound", report.analytic_bound},
        {"bound_violations", report.bound_violations},
        {"pass", report.pass},
    };
}

TimingValidation validate_toa(const TimingMatrix& toa, std::size_t ref_mic, std::size_t ref_src,
                              double tolerance) {
    if (!(tolerance > 0.0)) {
        throw ConfigError("validate: tolerance must be > 0");
    }
    const MappedMatrix f_toa = map_timing(toa, ref_src);
    const MappedMatrix f_tdoa = map_timing(tdoa_from_toa(toa, ref_mic), ref_src);

    TimingValidation v;
    v.rows = toa.rows();
    v.cols = toa.cols();
    v.data_points = v.rows * v.cols;
    v.ref_mic = ref_mic;
    v.ref_src = ref_src;
    v.tolerance = tolerance;
    v.max_abs_residual_toa_tdoa = max_abs(residual(f_toa, f_tdoa));
    v.max_abs_column_mean_toa = max_abs(column_means(f_toa));
    v.max_abs_column_mean_tdoa = max_abs(column_means(f_tdoa));
    v.f_min = std::min(f_toa.values.minCoeff(), f_tdoa.values.minCoeff());
    v.f_max = std::max(f_toa.values.maxCoeff(), f_tdoa.values.maxCoeff());
    v.pass = v.max_abs_residual_toa_tdoa < tolerance && v.max_abs_column_mean_toa < tolerance &&
             v.max_abs_column_mean_tdoa < tolerance;
    return v;
}

nlohmann::json to_json(const TimingValidation& v) {
    return nlohmann::json{
        {"rows", v.rows},
        {"cols", v.cols},
        {"data_points", v.data_points},
        {"ref_mic", v.ref_mic},
        {"ref_src", v.ref_src},
        {"tolerance", v.tolerance},
        {"max_abs_residual_toa_tdoa", v.max_abs_residual_toa_tdoa},
        {"max_abs_column_mean_toa", v.max_abs_column_mean_toa},
        {"max_abs_column_mean_tdoa", v.max_abs_column_mean_tdoa},
        {"f_range", {v.f_min, v.f_max}},
        {"pass", v.pass},
    };
}

}  // namespace tdoamap
