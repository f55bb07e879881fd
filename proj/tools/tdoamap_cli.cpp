// tdoamap command-line front end.
//
//   tdoamap simulate  Monte Carlo identity check on random scenes
//   tdoamap validate  identity check on a measured TOA CSV
//   tdoamap ingest    inject random clock offsets into a TOA CSV
//   tdoamap localize  fit geometry to a mapped-matrix CSV
//
// Exit codes: 0 success, 1 tolerance check failed, 2 usage / input error.

#include "tdoamap/experiments.hpp"
#include "tdoamap/ingest.hpp"
#include "tdoamap/io.hpp"
#include "tdoamap/localizer.hpp"
#include "tdoamap/mapping.hpp"
#include "tdoamap/scene.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailed = 1;
constexpr int kExitUsage = 2;

// "LxWxH" with a lowercase x; floats allowed.
Eigen::Vector3d parse_room(const std::string& text) {
    Eigen::Vector3d room;
    std::size_t pos = 0;
    for (int axis = 0; axis < 3; ++axis) {
        const auto sep = text.find('x', pos);
        if ((axis < 2) == (sep == std::string::npos)) {
            throw tdoamap::ConfigError("--room must look like LxWxH, got '" + text + "'");
        }
        const std::string part = text.substr(pos, sep == std::string::npos ? sep : sep - pos);
        std::size_t used = 0;
        try {
            room[axis] = std::stod(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (part.empty() || used != part.size()) {
            throw tdoamap::ConfigError("--room must look like LxWxH, got '" + text + "'");
        }
        pos = sep + 1;
    }
    return room;
}

struct SimulateArgs {
    std::size_t mics = 20;
    std::size_t srcs = 20;
    std::size_t trials = 1000;
    std::string room = "10x10x3";
    double speed = 340.0;
    double offset_range = 1.0;
    std::uint64_t seed = 0;
    double tol = tdoamap::kDefaultTolerance;
    std::string report;
    std::string hist;
    std::size_t bins = 100;
    double hist_min = -0.1;
    double hist_max = 0.1;
    unsigned threads = 0;
    std::string scene_out;
    std::string mapped_out;
};

int run_simulate(const SimulateArgs& a) {
    tdoamap::SceneConfig config;
    config.num_mics = a.mics;
    config.num_srcs = a.srcs;
    config.room = parse_room(a.room);
    config.speed = a.speed;
    config.offset_range = a.offset_range;
    config.seed = a.seed;

    tdoamap::MonteCarloOptions options;
    options.num_trials = a.trials;
    options.tolerance = a.tol;
    options.threads = a.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : a.threads;
    options.keep_f_values = !a.hist.empty();
    const tdoamap::MonteCarloRun run = tdoamap::run_monte_carlo(config, options);
    const tdoamap::ValidationReport& rep = run.report;

    tdoamap::write_json_file(a.report, tdoamap::to_json(rep));
    if (!a.hist.empty()) {
        const auto bins = tdoamap::histogram(run.f_values, a.bins, a.hist_min, a.hist_max);
        tdoamap::write_text_file(a.hist, tdoamap::histogram_to_csv(bins));
    }
    if (!a.scene_out.empty() || !a.mapped_out.empty()) {
        const tdoamap::Scene scene = tdoamap::generate_scene(tdoamap::trial_config(config, 0));
        if (!a.scene_out.empty()) {
            tdoamap::write_json_file(a.scene_out, tdoamap::scene_to_json(scene));
        }
        if (!a.mapped_out.empty()) {
            tdoamap::write_mapped_csv(a.mapped_out, tdoamap::map_timing(tdoamap::synth_toa(scene)));
        }
    }

    const bool ok = rep.pass && rep.bound_ok();
    std::printf("simulate: %s  trials=%zu points=%zu max|df|=%.3e max|mean f|=%.3e "
                "max|f-closed|=%.3e f in [%.4f, %.4f] s (bound %.4f)\n",
                ok ? "PASS" : "FAIL", rep.num_trials, rep.data_points,
                rep.max_abs_residual_toa_tdoa, rep.max_abs_column_mean,
                rep.max_abs_residual_vs_closed_form, rep.f_min, rep.f_max, rep.analytic_bound);
    return ok ? kExitOk : kExitValidationFailed;
}

struct CsvArgs {
    std::string toa;
    double scale = 1.0;
    bool header = false;

    tdoamap::CsvOptions options() const { return {header, scale}; }
};

struct ValidateArgs {
    CsvArgs csv;
    std::size_t ref_mic = 0;
    std::size_t ref_src = 0;
    double tol = tdoamap::kDefaultTolerance;
    std::string report;
};

int run_validate(const ValidateArgs& a) {
    const tdoamap::TimingMatrix toa = tdoamap::load_toa_csv(a.csv.toa, a.csv.options());
    const tdoamap::TimingValidation v = tdoamap::validate_toa(toa, a.ref_mic, a.ref_src, a.tol);
    nlohmann::json j = tdoamap::to_json(v);
    j["source_path"] = a.csv.toa;
    tdoamap::write_json_file(a.report, j);
    std::printf("validate: %s  %zux%zu points=%zu max|df|=%.3e max|mean f|=%.3e f in [%.4f, %.4f] s\n",
                v.pass ? "PASS" : "FAIL", v.rows, v.cols, v.data_points,
                v.max_abs_residual_toa_tdoa,
                std::max(v.max_abs_column_mean_toa, v.max_abs_column_mean_tdoa), v.f_min, v.f_max);
    return v.pass ? kExitOk : kExitValidationFailed;
}

struct IngestArgs {
    CsvArgs csv;
    double offset_range = 1.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string audit;
};

int run_ingest(const IngestArgs& a) {
    const tdoamap::RealDataset data = tdoamap::load_real_dataset(a.csv.toa, a.csv.options());
    const tdoamap::InjectedToa injected = tdoamap::inject_offsets(data.toa, a.offset_range, a.seed);
    tdoamap::write_text_file(a.out, tdoamap::grid_to_csv(injected.toa.values));
    tdoamap::write_json_file(a.audit, tdoamap::audit_json(injected));
    std::printf("ingest: %zux%zu TOA from %s, offsets in [-%g, %g] s injected (seed %llu)\n",
                data.toa.rows(), data.toa.cols(), data.source_path.c_str(), a.offset_range,
                a.offset_range, static_cast<unsigned long long>(a.seed));
    return kExitOk;
}

struct LocalizeArgs {
    std::string mapped;
    double speed = 340.0;
    std::size_t restarts = 8;
    std::uint64_t seed = 0;
    std::size_t ref_src = 0;
    std::size_t max_iterations = 200;
    std::string room = "10x10x3";
    std::string init;
    std::string truth;
    std::string out;
};

int run_localize(const LocalizeArgs& a) {
    const tdoamap::MappedMatrix f_obs = tdoamap::read_mapped_csv(a.mapped);
    tdoamap::SolveOptions opts;
    opts.num_restarts = a.restarts;
    opts.seed = a.seed;
    opts.ref_src = a.ref_src;
    opts.max_iterations = a.max_iterations;
    opts.init_box = parse_room(a.room);

    std::optional<tdoamap::Geometry> init;
    if (!a.init.empty()) {
        const tdoamap::Scene s = tdoamap::scene_from_json(tdoamap::read_json_file(a.init));
        init = tdoamap::Geometry{s.mics, s.srcs};
    }
    if (!tdoamap::is_identifiable(f_obs.rows(), f_obs.cols())) {
        std::fprintf(stderr,
                     "warning: %zu mics x %zu sources give fewer independent entries than "
                     "geometry unknowns; the fit may be underdetermined\n",
                     f_obs.rows(), f_obs.cols());
    }
    const tdoamap::GeometryEstimate est = tdoamap::solve(f_obs, a.speed, init, opts);
    tdoamap::write_json_file(a.out, tdoamap::estimate_to_json(est));

    std::printf("localize: %s  cost=%.3e s^2 iterations=%zu restart=%zu",
                est.converged ? "converged" : "not converged", est.final_cost, est.iterations,
                est.restart_index);
    if (!a.truth.empty()) {
        const tdoamap::Scene truth = tdoamap::scene_from_json(tdoamap::read_json_file(a.truth));
        tdoamap::Points est_cloud = est.mics;
        est_cloud.insert(est_cloud.end(), est.srcs.begin(), est.srcs.end());
        tdoamap::Points truth_cloud = truth.mics;
        truth_cloud.insert(truth_cloud.end(), truth.srcs.begin(), truth.srcs.end());
        std::printf(" procrustes_rmse=%.6e m", tdoamap::procrustes_rmse(est_cloud, truth_cloud));
    }
    std::printf("\n");
    return kExitOk;
}

void add_csv_flags(CLI::App* cmd, CsvArgs& csv) {
    cmd->add_option("--toa", csv.toa, "TOA matrix CSV (rows = microphones)")->required();
    cmd->add_option("--scale", csv.scale, "multiply every value on load");
    cmd->add_flag("--header", csv.header, "skip the first line");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Offset-free mapping of TOA/TDOA matrices for microphone array self-calibration"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo identity check on random scenes");
    simulate->add_option("--mics", sim.mics, "microphones per scene")->check(CLI::PositiveNumber);
    simulate->add_option("--srcs", sim.srcs, "sources per scene")->check(CLI::PositiveNumber);
    simulate->add_option("--trials", sim.trials, "number of scenes")->check(CLI::PositiveNumber);
    simulate->add_option("--room", sim.room, "room size LxWxH in meters");
    simulate->add_option("--speed", sim.speed, "speed of sound, m/s")->check(CLI::PositiveNumber);
    simulate->add_option("--offset-range", sim.offset_range, "clock offsets drawn in [-r, r] s")
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--seed", sim.seed, "master seed")->required();
    simulate->add_option("--tol", sim.tol, "tolerance in seconds")->check(CLI::PositiveNumber);
    simulate->add_option("--report", sim.report, "report JSON path")->required();
    simulate->add_option("--hist", sim.hist, "histogram CSV of f(TOA) values");
    simulate->add_option("--bins", sim.bins, "histogram bins")->check(CLI::PositiveNumber);
    simulate->add_option("--hist-min", sim.hist_min, "histogram lower edge, s");
    simulate->add_option("--hist-max", sim.hist_max, "histogram upper edge, s");
    simulate->add_option("--threads", sim.threads, "worker threads (0 = hardware)");
    simulate->add_option("--scene-out", sim.scene_out, "write trial 0 scene JSON");
    simulate->add_option("--mapped-out", sim.mapped_out, "write trial 0 mapped matrix CSV");

    ValidateArgs val;
    auto* validate = app.add_subcommand("validate", "identity check on a measured TOA CSV");
    add_csv_flags(validate, val.csv);
    validate->add_option("--ref-mic", val.ref_mic, "reference microphone for TDOA");
    validate->add_option("--ref-src", val.ref_src, "reference source for the mapping");
    validate->add_option("--tol", val.tol, "tolerance in seconds")->check(CLI::PositiveNumber);
    validate->add_option("--report", val.report, "report JSON path")->required();

    IngestArgs ing;
    auto* ingest = app.add_subcommand("ingest", "inject random clock offsets into a TOA CSV");
    add_csv_flags(ingest, ing.csv);
    ingest->add_option("--offset-range", ing.offset_range, "offsets drawn in [-r, r] s")
        ->required()
        ->check(CLI::NonNegativeNumber);
    ingest->add_option("--seed", ing.seed, "seed")->required();
    ingest->add_option("--out", ing.out, "injected TOA CSV path")->required();
    ingest->add_option("--audit", ing.audit, "drawn offsets JSON path")->required();

    LocalizeArgs loc;
    auto* localize = app.add_subcommand("localize", "fit geometry to a mapped-matrix CSV");
    localize->add_option("--mapped", loc.mapped, "mapped matrix CSV")->required();
    localize->add_option("--speed", loc.speed, "speed of sound, m/s")->check(CLI::PositiveNumber);
    localize->add_option("--restarts", loc.restarts, "number of restarts")->check(CLI::PositiveNumber);
    localize->add_option("--seed", loc.seed, "seed")->required();
    localize->add_option("--ref-src", loc.ref_src, "reference source of the mapped matrix");
    localize->add_option("--max-iterations", loc.max_iterations)->check(CLI::PositiveNumber);
    localize->add_option("--room", loc.room, "box LxWxH for random initialization");
    localize->add_option("--init", loc.init, "initial geometry JSON (scene format)");
    localize->add_option("--truth", loc.truth, "true scene JSON; prints Procrustes RMSE");
    localize->add_option("--out", loc.out, "estimate JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*simulate) return run_simulate(sim);
        if (*validate) return run_validate(val);
        if (*ingest) return run_ingest(ing);
        if (*localize) return run_localize(loc);
    } catch (const tdoamap::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
