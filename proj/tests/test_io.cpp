#include "tdoamap/io.hpp"
#include "tdoamap/rng.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstring>
#include <limits>

namespace tdoamap {
namespace {

using testing::TempDir;

TEST(SceneJson, RoundTripIsExact) {
    TempDir dir;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Scene s = testing::room_scene(seed, 3 + seed, 2 + seed);
        write_json_file(dir / "scene.json", scene_to_json(s));
        const Scene back = scene_from_json(read_json_file(dir / "scene.json"));
        ASSERT_EQ(back.mics.size(), s.mics.size());
        for (std::size_t i = 0; i < s.mics.size(); ++i) EXPECT_EQ(back.mics[i], s.mics[i]);
        for (std::size_t j = 0; j < s.srcs.size(); ++j) EXPECT_EQ(back.srcs[j], s.srcs[j]);
        EXPECT_EQ(back.delta, s.delta);
        EXPECT_EQ(back.eta, s.eta);
        EXPECT_EQ(back.c, s.c);
    }
}

TEST(SceneJson, Schema) {
    const nlohmann::json j = scene_to_json(testing::hand_scene());
    EXPECT_EQ(j.at("mics")[1], nlohmann::json::parse("[1.0, 0.0, 0.0]"));
    EXPECT_EQ(j.at("c").get<double>(), 1.0);
    EXPECT_EQ(j.at("delta").size(), 2u);
    EXPECT_EQ(j.at("eta").size(), 2u);
}

TEST(SceneJson, GeometryOnlyAndMalformed) {
    const Scene s = scene_from_json(nlohmann::json::parse(R"({"mics":[[0,0,0]],"srcs":[[1,1,1]]})"));
    EXPECT_EQ(s.delta.size(), 1);
    EXPECT_EQ(s.c, 340.0);
    EXPECT_THROW(scene_from_json(nlohmann::json::parse(R"({"mics":[[0,0]],"srcs":[]})")), ParseError);
    EXPECT_THROW(scene_from_json(nlohmann::json::parse(R"({"srcs":[]})")), ParseError);
}

TEST(FormatDouble, SeventeenSignificantDigitsRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(0.0), "0");
    Rng rng(4);
    for (int k = 0; k < 1000; ++k) {
        const double v = rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform(-20.0, 5.0));
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
}

TEST(MappedCsv, RoundTripIsBitExact) {
    TempDir dir;
    const MappedMatrix f = map_timing(synth_toa(testing::room_scene(5, 7, 9)));
    write_mapped_csv(dir / "f.csv", f);
    const MappedMatrix back = read_mapped_csv(dir / "f.csv");
    EXPECT_EQ(back.values, f.values);
}

TEST(MappedCsv, Layout) {
    const Grid g = (Grid(2, 3) << 0.0, 0.5, -0.25, 0.0, -0.5, 0.25).finished();
    EXPECT_EQ(grid_to_csv(g), "0,0.5,-0.25\n0,-0.5,0.25\n");
}

TEST(HistogramCsv, HeaderAndRows) {
    const std::vector<HistogramBin> bins{{0.0, 0.5, 2}, {0.5, 1.0, 1}};
    EXPECT_EQ(histogram_to_csv(bins), "bin_left,bin_right,count\n0,0.5,2\n0.5,1,1\n");
}

TEST(Files, MissingAndUnwritable) {
    EXPECT_THROW(read_json_file("/nonexistent/x.json"), IoError);
    EXPECT_THROW(write_text_file("/nonexistent/dir/x.txt", "x"), IoError);
    TempDir dir;
    EXPECT_THROW(read_json_file(dir.file("bad.json", "{not json")), ParseError);
}

}  // namespace
}  // namespace tdoamap
