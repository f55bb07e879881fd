#pragma once

#include "tdoamap/experiments.hpp"
#include "tdoamap/mapping.hpp"
#include "tdoamap/scene.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <span>
#include <string>

namespace tdoamap {

// {"mics":[[x,y,z],...],"srcs":[[x,y,z],...],"delta":[...],"eta":[...],"c":340.0}
nlohmann::json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);

// printf("%.17g") equivalent; round-trips every double exactly.
std::string format_double(double value);

// M rows x N columns, comma-separated, no header.
std::string grid_to_csv(const Grid& grid);
void write_mapped_csv(const std::filesystem::path& path, const MappedMatrix& m);
MappedMatrix read_mapped_csv(const std::filesystem::path& path);

// Header "bin_left,bin_right,count".
std::string histogram_to_csv(std::span<const HistogramBin> bins);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace tdoamap
