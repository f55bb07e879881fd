#include "tdoamap/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tdoamap {

std::string_view to_string(MapSource source) noexcept {
    switch (source) {
        case MapSource::from_toa: return "FROM_TOA";
        case MapSource::from_tdoa: return "FROM_TDOA";
        case MapSource::closed_form: return "CLOSED_FORM";
    }
    return "UNKNOWN";
}

namespace {

void check_ref_src(std::size_t ref_src, std::size_t cols) {
    if (ref_src >= cols) {
        throw IndexError("reference source " + std::to_string(ref_src) + " out of range for " +
                         std::to_string(cols) + " sources");
    }
}

// Subtracts each column's mean in place. Sequential summation over rows.
void center_columns(Grid& g) {
    const Eigen::VectorXd means = column_means(g);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            g(i, j) -= means[j];
        }
    }
}

}  // namespace

MappedMatrix map_timing(const TimingMatrix& m, std::size_t ref_src) {
    if (m.values.rows() < 1 || m.values.cols() < 1) {
        throw ShapeError("map_timing: matrix must be at least 1x1");
    }
    check_ref_src(ref_src, m.cols());
    const auto ref = static_cast<Eigen::Index>(ref_src);

    Grid d(m.values.rows(), m.values.cols());
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        for (Eigen::Index j = 0; j < d.cols(); ++j) {
            d(i, j) = m.values(i, j) - m.values(i, ref);
        }
    }
    center_columns(d);
    return {std::move(d), m.kind == TimingKind::toa ? MapSource::from_toa : MapSource::from_tdoa};
}

MappedMatrix closed_form_from_positions(const Points& mics, const Points& srcs, double c,
                                        std::size_t ref_src) {
    if (mics.empty() || srcs.empty()) {
        throw ShapeError("closed form: needs at least one microphone and one source");
    }
    check_ref_src(ref_src, srcs.size());
    const auto m = static_cast<Eigen::Index>(mics.size());
    const auto n = static_cast<Eigen::Index>(srcs.size());
    const auto ref = static_cast<Eigen::Index>(ref_src);

    Grid y(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            y(i, j) = (mics[i] - srcs[j]).norm() / c;
        }
    }
    // x is column ref of y, so column ref cancels bit-exactly below.
    Eigen::VectorXd x = y.col(ref);
    double x_mean = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) x_mean += x[i];
    x_mean /= static_cast<double>(m);

    const Eigen::VectorXd y_means = column_means(y);
    Grid out(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out(i, j) = (y(i, j) - y_means[j]) - (x[i] - x_mean);
        }
    }
    return {std::move(out), MapSource::closed_form};
}

MappedMatrix closed_form_map(const Scene& scene, std::size_t ref_src) {
    validate(scene);
    return closed_form_from_positions(scene.mics, scene.srcs, scene.c, ref_src);
}

DerivedOffsets derived_offsets(const Scene& scene, std::size_t ref_src) {
    validate(scene);
    check_ref_src(ref_src, scene.num_srcs());
    const auto m = static_cast<Eigen::Index>(scene.num_mics());
    const auto n = static_cast<Eigen::Index>(scene.num_srcs());
    const auto ref = static_cast<Eigen::Index>(ref_src);

    DerivedOffsets out;
    out.y.resize(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out.y(i, j) = (scene.mics[i] - scene.srcs[j]).norm() / scene.c;
        }
    }
    out.x = out.y.col(ref);
    out.delta_dot = out.x;
    out.eta_dot.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            sum += out.x[i] - out.y(i, j);
        }
        out.eta_dot[j] = sum / static_cast<double>(m);
    }
    return out;
}

Grid residual(const MappedMatrix& a, const MappedMatrix& b) {
    if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) {
        throw ShapeError("residual: dimension mismatch " + std::to_string(a.values.rows()) + "x" +
                         std::to_string(a.values.cols()) + " vs " +
                         std::to_string(b.values.rows()) + "x" +
                         std::to_string(b.values.cols()));
    }
    return a.values - b.values;
}

Eigen::VectorXd column_means(const Grid& m) {
    Eigen::VectorXd means = Eigen::VectorXd::Zero(m.cols());
    if (m.rows() == 0) {
        return means;
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            sum += m(i, j);
        }
        means[j] = sum / static_cast<double>(m.rows());
    }
    return means;
}

Eigen::VectorXd column_means(const MappedMatrix& m) {
    return column_means(m.values);
}

double max_abs(const Grid& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double max_abs(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace tdoamap
