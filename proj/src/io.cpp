#include "tdoamap/io.hpp"

#include "tdoamap/ingest.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace tdoamap {

namespace {

nlohmann::json points_to_json(const Points& points) {
    auto out = nlohmann::json::array();
    for (const Point& p : points) out.push_back({p.x(), p.y(), p.z()});
    return out;
}

Points points_from_json(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        throw ParseError(std::string("scene json: missing array '") + key + "'", 0, 0);
    }
    Points points;
    for (const auto& item : j.at(key)) {
        if (!item.is_array() || item.size() != 3) {
            throw ParseError(std::string("scene json: '") + key + "' entries must be [x,y,z]", 0, 0);
        }
        points.emplace_back(item[0].get<double>(), item[1].get<double>(), item[2].get<double>());
    }
    return points;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, const char* key, std::size_t size) {
    if (!j.contains(key)) {
        return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size));
    }
    const auto values = j.at(key).get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

nlohmann::json scene_to_json(const Scene& scene) {
    return nlohmann::json{
        {"mics", points_to_json(scene.mics)},
        {"srcs", points_to_json(scene.srcs)},
        {"delta", std::vector<double>(scene.delta.begin(), scene.delta.end())},
        {"eta", std::vector<double>(scene.eta.begin(), scene.eta.end())},
        {"c", scene.c},
    };
}

// delta, eta and c are optional so that geometry-only files load as well.
Scene scene_from_json(const nlohmann::json& j) {
    try {
        Scene scene;
        scene.mics = points_from_json(j, "mics");
        scene.srcs = points_from_json(j, "srcs");
        scene.delta = vector_from_json(j, "delta", scene.mics.size());
        scene.eta = vector_from_json(j, "eta", scene.srcs.size());
        scene.c = j.value("c", 340.0);
        return scene;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("scene json: ") + e.what(), 0, 0);
    }
}

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    return std::string(buf.data(), end);
}

std::string grid_to_csv(const Grid& grid) {
    std::string out;
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        for (Eigen::Index j = 0; j < grid.cols(); ++j) {
            if (j > 0) out += ',';
            out += format_double(grid(i, j));
        }
        out += '\n';
    }
    return out;
}

void write_mapped_csv(const std::filesystem::path& path, const MappedMatrix& m) {
    write_text_file(path, grid_to_csv(m.values));
}

MappedMatrix read_mapped_csv(const std::filesystem::path& path) {
    TimingMatrix raw = load_toa_csv(path);
    return {std::move(raw.values), MapSource::from_toa};
}

std::string histogram_to_csv(std::span<const HistogramBin> bins) {
    std::string out = "bin_left,bin_right,count\n";
    for (const HistogramBin& b : bins) {
        out += format_double(b.left) + ',' + format_double(b.right) + ',' +
               std::to_string(b.count) + '\n';
    }
    return out;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("'" + path.string() + "': " + e.what(), 0, e.byte);
    }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + '\n');
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

}  // namespace tdoamap
