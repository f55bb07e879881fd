#pragma once

#include "tdoamap/timing.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace tdoamap {

struct CsvOptions {
    bool skip_header = false;
    double scale = 1.0;  // multiplies every parsed value (unit conversion to seconds)
};

/// A measured TOA matrix and where it came from.
struct RealDataset {
    TimingMatrix toa;
    std::string source_path;
};

// Reads a rectangular numeric CSV (comma separator, no header unless requested).
// Throws IoError when the file cannot be opened and ParseError with the
// 1-based row/column of the first ragged row or non-numeric cell.
TimingMatrix load_toa_csv(const std::filesystem::path& path, const CsvOptions& options = {});

RealDataset load_real_dataset(const std::filesystem::path& path, const CsvOptions& options = {});

struct InjectedToa {
    TimingMatrix toa;
    Eigen::VectorXd delta;
    Eigen::VectorXd eta;
    std::uint64_t seed = 0;
};

// out[i][j] = toa[i][j] + eta[j] - delta[i], offsets uniform in
// [-offset_range, offset_range]. delta is drawn before eta.
InjectedToa inject_offsets(const TimingMatrix& toa, double offset_range, std::uint64_t seed);

// {"delta": [...], "eta": [...], "seed": ...}
nlohmann::json audit_json(const InjectedToa& injected);

}  // namespace tdoamap
