#include "tdoamap/localizer.hpp"

#include "tdoamap/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tdoamap {

namespace {

// Unit vector (a - b) / |a - b|, or zero at coincident points.
Point unit_or_zero(const Point& a, const Point& b) {
    const Point d = a - b;
    const double norm = d.norm();
    return norm < kCoincidentDistance ? Point::Zero() : Point(d / norm);
}

void check_params(const Eigen::VectorXd& params, std::size_t num_mics, std::size_t num_srcs) {
    if (static_cast<std::size_t>(params.size()) != 3 * (num_mics + num_srcs)) {
        throw ShapeError("params length " + std::to_string(params.size()) + " != 3(M+N) = " +
                         std::to_string(3 * (num_mics + num_srcs)));
    }
    for (const double p : params) {
        if (!std::isfinite(p)) {
            throw NumericError("params contain a non-finite value");
        }
    }
}

double sum_of_squares(const Grid& residual) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < residual.size(); ++k) {
        sum += residual.data()[k] * residual.data()[k];
    }
    return sum;
}

struct RunResult {
    Eigen::VectorXd params;
    double cost = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> history;
};

RunResult levenberg_marquardt(const MappedMatrix& f_obs, double c, Eigen::VectorXd params,
                              const SolveOptions& opts) {
    const std::size_t m = f_obs.rows();
    const std::size_t n = f_obs.cols();
    const auto residual_of = [&](const Eigen::VectorXd& p) {
        const Geometry g = unflatten(p, m, n);
        return Grid(f_obs.values - model_f(g.mics, g.srcs, c, opts.ref_src).values);
    };

    RunResult run;
    Grid res = residual_of(params);
    run.cost = sum_of_squares(res);
    run.history.push_back(run.cost);

    double damping = -1.0;
    double growth = 2.0;
    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
        run.iterations = it;
        const Eigen::MatrixXd jac = model_jacobian(params, m, n, c, opts.ref_src);
        const Eigen::Map<const Eigen::VectorXd> e(res.data(), res.size());
        const Eigen::MatrixXd normal = jac.transpose() * jac;
        const Eigen::VectorXd rhs = jac.transpose() * e;
        if (run.cost == 0.0 || rhs.lpNorm<Eigen::Infinity>() == 0.0) {
            run.converged = true;
            break;
        }
        if (damping < 0.0) {
            const double scale = normal.diagonal().maxCoeff();
            damping = opts.initial_damping * (scale > 0.0 ? scale : 1.0);
        }

        Eigen::MatrixXd damped = normal;
        damped.diagonal().array() += damping;
        const Eigen::VectorXd step = damped.ldlt().solve(rhs);
        if (!step.allFinite()) {
            break;
        }
        if (step.norm() <= opts.step_tolerance * (params.norm() + opts.step_tolerance)) {
            run.converged = true;
            break;
        }

        const Eigen::VectorXd candidate = params + step;
        Grid candidate_res = residual_of(candidate);
        const double candidate_cost = sum_of_squares(candidate_res);
        if (candidate_cost < run.cost) {
            const double predicted = step.dot(damping * step + rhs);
            const double gain = predicted > 0.0 ? (run.cost - candidate_cost) / predicted : 1.0;
            const double relative_drop = (run.cost - candidate_cost) / run.cost;
            params = candidate;
            res = std::move(candidate_res);
            run.cost = candidate_cost;
            run.history.push_back(run.cost);
            damping *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * gain - 1.0, 3));
            growth = 2.0;
            if (relative_drop < opts.cost_tolerance) {
                run.converged = true;
                break;
            }
        } else {
            damping *= growth;
            growth *= 2.0;
            if (!std::isfinite(damping)) {
                break;
            }
        }
    }
    run.params = std::move(params);
    return run;
}

}  // namespace

Eigen::VectorXd flatten(const Points& mics, const Points& srcs) {
    Eigen::VectorXd params(static_cast<Eigen::Index>(3 * (mics.size() + srcs.size())));
    Eigen::Index k = 0;
    for (const Point& p : mics) params.segment<3>(3 * k++) = p;
    for (const Point& p : srcs) params.segment<3>(3 * k++) = p;
    return params;
}

Geometry unflatten(const Eigen::VectorXd& params, std::size_t num_mics, std::size_t num_srcs) {
    if (static_cast<std::size_t>(params.size()) != 3 * (num_mics + num_srcs)) {
        throw ShapeError("params length does not match 3(M+N)");
    }
    Geometry g;
    g.mics.reserve(num_mics);
    g.srcs.reserve(num_srcs);
    for (std::size_t k = 0; k < num_mics + num_srcs; ++k) {
        const Point p(params[3 * k], params[3 * k + 1], params[3 * k + 2]);
        (k < num_mics ? g.mics : g.srcs).push_back(p);
    }
    return g;
}

MappedMatrix model_f(const Points& mics, const Points& srcs, double c, std::size_t ref_src) {
    return closed_form_from_positions(mics, srcs, c, ref_src);
}

// With g[i][j] = y[i][j] - y[i][ref] and f = P g (P centers columns), the
// gradient is -2 sum_ij W[i][j] dy[i][j], where e' = P e is the centered
// residual, W[i][j] = e'[i][j] for j != ref and W[i][ref] = -sum_{j != ref} e'[i][j].
CostAndGradient objective_and_gradient(const Eigen::VectorXd& params, const MappedMatrix& f_obs,
                                       double c, std::size_t ref_src) {
    const std::size_t m = f_obs.rows();
    const std::size_t n = f_obs.cols();
    check_params(params, m, n);
    if (!f_obs.values.allFinite()) {
        throw NumericError("observed mapped matrix contains a non-finite value");
    }
    const Geometry g = unflatten(params, m, n);
    const Grid e = f_obs.values - model_f(g.mics, g.srcs, c, ref_src).values;

    CostAndGradient out;
    out.cost = sum_of_squares(e);
    out.gradient = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(params.size()));

    Grid weights = e;
    const Eigen::VectorXd means = column_means(e);
    for (Eigen::Index i = 0; i < weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < weights.cols(); ++j) weights(i, j) -= means[j];
    }
    const auto ref = static_cast<Eigen::Index>(ref_src);
    for (Eigen::Index i = 0; i < weights.rows(); ++i) {
        double other = 0.0;
        for (Eigen::Index j = 0; j < weights.cols(); ++j) {
            if (j != ref) other += weights(i, j);
        }
        weights(i, ref) = -other;
    }

    const auto src_offset = static_cast<Eigen::Index>(3 * m);
    for (Eigen::Index i = 0; i < weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < weights.cols(); ++j) {
            const Point u = unit_or_zero(g.mics[i], g.srcs[j]);
            const Point d = (-2.0 * weights(i, j) / c) * u;
            out.gradient.segment<3>(3 * i) += d;
            out.gradient.segment<3>(src_offset + 3 * j) -= d;
        }
    }
    return out;
}

Eigen::MatrixXd model_jacobian(const Eigen::VectorXd& params, std::size_t num_mics,
                               std::size_t num_srcs, double c, std::size_t ref_src) {
    check_params(params, num_mics, num_srcs);
    if (ref_src >= num_srcs) {
        throw IndexError("reference source out of range");
    }
    const Geometry g = unflatten(params, num_mics, num_srcs);
    const auto m = static_cast<Eigen::Index>(num_mics);
    const auto n = static_cast<Eigen::Index>(num_srcs);
    const auto ref = static_cast<Eigen::Index>(ref_src);
    const Eigen::Index src_offset = 3 * m;

    // Rows of d g[i][j], then centered over i for each j.
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m * n, static_cast<Eigen::Index>(params.size()));
    for (Eigen::Index i = 0; i < m; ++i) {
        const Point u_ref = unit_or_zero(g.mics[i], g.srcs[ref]) / c;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == ref) continue;
            const Point u = unit_or_zero(g.mics[i], g.srcs[j]) / c;
            auto row = jac.row(i * n + j);
            row.segment<3>(3 * i) += (u - u_ref).transpose();
            row.segment<3>(src_offset + 3 * j) -= u.transpose();
            row.segment<3>(src_offset + 3 * ref) += u_ref.transpose();
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(jac.cols());
        for (Eigen::Index i = 0; i < m; ++i) mean += jac.row(i * n + j);
        mean /= static_cast<double>(m);
        for (Eigen::Index i = 0; i < m; ++i) jac.row(i * n + j) -= mean;
    }
    return jac;
}

bool is_identifiable(std::size_t num_mics, std::size_t num_srcs) noexcept {
    const std::size_t equations = (num_mics - 1) * (num_srcs - 1);
    const std::size_t unknowns = 3 * (num_mics + num_srcs);
    return unknowns <= 6 || equations >= unknowns - 6;
}

GeometryEstimate solve(const MappedMatrix& f_obs, double c, const std::optional<Geometry>& init,
                       const SolveOptions& opts) {
    const std::size_t m = f_obs.rows();
    const std::size_t n = f_obs.cols();
    if (m < 1 || n < 1) {
        throw ShapeError("solve: empty mapped matrix");
    }
    if (opts.ref_src >= n) {
        throw IndexError("solve: reference source out of range");
    }
    if (!f_obs.values.allFinite()) {
        throw NumericError("solve: observed mapped matrix contains a non-finite value");
    }
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw ConfigError("solve: speed of sound must be finite and > 0");
    }
    if (opts.max_iterations < 1 || !(opts.cost_tolerance > 0.0) || !(opts.step_tolerance > 0.0) ||
        !(opts.initial_damping > 0.0) || opts.num_restarts < 1) {
        throw ConfigError("solve: invalid options");
    }
    if (init && (init->mics.size() != m || init->srcs.size() != n)) {
        throw ShapeError("solve: initial geometry does not match the mapped matrix");
    }

    GeometryEstimate best;
    best.final_cost = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < opts.num_restarts; ++r) {
        Rng rng(mix_seed(opts.seed, r));
        Eigen::VectorXd start;
        if (init) {
            start = flatten(init->mics, init->srcs);
            if (r > 0) {
                for (auto& v : start) v += opts.restart_sigma * rng.normal();
            }
        } else {
            start.resize(static_cast<Eigen::Index>(3 * (m + n)));
            for (Eigen::Index k = 0; k < start.size(); ++k) {
                start[k] = rng.uniform(0.0, opts.init_box[k % 3]);
            }
        }
        RunResult run = levenberg_marquardt(f_obs, c, std::move(start), opts);
        if (run.cost < best.final_cost) {
            const Geometry g = unflatten(run.params, m, n);
            best.mics = g.mics;
            best.srcs = g.srcs;
            best.final_cost = run.cost;
            best.iterations = run.iterations;
            best.converged = run.converged;
            best.cost_history = std::move(run.history);
            best.restart_index = r;
        }
    }
    best.identifiable = is_identifiable(m, n);
    return best;
}

double procrustes_rmse(const Points& est, const Points& truth) {
    if (est.empty() || est.size() != truth.size()) {
        throw ShapeError("procrustes: point clouds must be non-empty and equally sized");
    }
    const auto count = static_cast<double>(est.size());
    Point est_mean = Point::Zero();
    Point truth_mean = Point::Zero();
    for (std::size_t k = 0; k < est.size(); ++k) {
        est_mean += est[k];
        truth_mean += truth[k];
    }
    est_mean /= count;
    truth_mean /= count;

    Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
    for (std::size_t k = 0; k < est.size(); ++k) {
        cross += (est[k] - est_mean) * (truth[k] - truth_mean).transpose();
    }
    // Orthogonal Procrustes without the det(R) = +1 correction, so reflections are allowed.
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix3d rotation = svd.matrixV() * svd.matrixU().transpose();

    double sum = 0.0;
    for (std::size_t k = 0; k < est.size(); ++k) {
        sum += (rotation * (est[k] - est_mean) - (truth[k] - truth_mean)).squaredNorm();
    }
    return std::sqrt(sum / count);
}

nlohmann::json estimate_to_json(const GeometryEstimate& est) {
    auto points = [](const Points& pts) {
        auto out = nlohmann::json::array();
        for (const Point& p : pts) out.push_back({p.x(), p.y(), p.z()});
        return out;
    };
    return nlohmann::json{
        {"mics", points(est.mics)},
        {"srcs", points(est.srcs)},
        {"final_cost", est.final_cost},
        {"iterations", est.iterations},
        {"converged", est.converged},
        {"restart_index", est.restart_index},
        {"identifiable", est.identifiable},
    };
}

}  // namespace tdoamap
