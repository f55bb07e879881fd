#include "tdoamap/ingest.hpp"

#include "tdoamap/rng.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>
#include <vector>

namespace tdoamap {

namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view blanks = " \t\r\n";
    const auto first = s.find_first_not_of(blanks);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(blanks);
    return s.substr(first, last - first + 1);
}

double parse_cell(std::string_view text, std::size_t row, std::size_t column) {
    const std::string_view cell = trim(text);
    // from_chars rejects a leading '+', which numeric exports do emit.
    const std::string_view digits =
        !cell.empty() && cell.front() == '+' ? cell.substr(1) : cell;
    double value = 0.0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (digits.empty() || ec != std::errc{} || end != digits.data() + digits.size() ||
        !std::isfinite(value)) {
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(column) +
                             ": not a finite number: '" + std::string(cell) + "'",
                         row, column);
    }
    return value;
}

}  // namespace

TimingMatrix load_toa_csv(const std::filesystem::path& path, const CsvOptions& options) {
    if (!std::isfinite(options.scale)) {
        throw ConfigError("csv scale must be finite");
    }
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && options.skip_header) continue;
        if (trim(line).empty()) continue;

        const std::size_t row = rows.size() + 1;
        std::vector<double> values;
        std::string_view rest(line);
        std::size_t column = 1;
        while (true) {
            const auto comma = rest.find(',');
            values.push_back(parse_cell(rest.substr(0, comma), row, column) * options.scale);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
            ++column;
        }
        if (rows.empty()) {
            width = values.size();
        } else if (values.size() != width) {
            throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(width) +
                                 " columns, found " + std::to_string(values.size()),
                             row, std::min(values.size(), width) + 1);
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw ParseError("'" + path.string() + "' contains no data rows", 0, 0);
    }

    TimingMatrix out{TimingKind::toa,
                     Grid(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width)),
                     0};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return out;
}

RealDataset load_real_dataset(const std::filesystem::path& path, const CsvOptions& options) {
    return {load_toa_csv(path, options), path.string()};
}

InjectedToa inject_offsets(const TimingMatrix& toa, double offset_range, std::uint64_t seed) {
    if (toa.kind != TimingKind::toa) {
        throw KindError("inject_offsets expects a TOA matrix");
    }
    if (!std::isfinite(offset_range) || offset_range < 0.0) {
        throw ConfigError("offset range must be finite and >= 0");
    }
    Rng rng(seed);
    InjectedToa out;
    out.seed = seed;
    out.delta.resize(toa.values.rows());
    out.eta.resize(toa.values.cols());
    for (auto& d : out.delta) d = rng.uniform(-offset_range, offset_range);
    for (auto& e : out.eta) e = rng.uniform(-offset_range, offset_range);

    out.toa = toa;
    for (Eigen::Index i = 0; i < toa.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < toa.values.cols(); ++j) {
            out.toa.values(i, j) = toa.values(i, j) + out.eta[j] - out.delta[i];
        }
    }
    return out;
}

nlohmann::json audit_json(const InjectedToa& injected) {
    return nlohmann::json{
        {"delta", std::vector<double>(injected.delta.begin(), injected.delta.end())},
        {"eta", std::vector<double>(injected.eta.begin(), injected.eta.end())},
        {"seed", injected.seed},
    };
}

}  // namespace tdoamap
