#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gscat/image.hpp"
#include "gscat/rng.hpp"
#include "gscat/table.hpp"

using namespace gscat;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("gscat_img_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("channel bytes: clamp, scale, round half even") {
    CHECK(channel_to_byte(0.0) == 0);
    CHECK(channel_to_byte(1.0) == 255);
    CHECK(channel_to_byte(0.5) == 128);  // 127.5 rounds to the even neighbor
    CHECK(channel_to_byte(-2.0) == 0);
    CHECK(channel_to_byte(7.0) == 255);
    CHECK(channel_to_byte(0.1) == 26);  // 25.5 ties to even
}

TEST_CASE("ppm payload of an all-zero buffer is all zero") {
    TempDir dir;
    Image img(16, 16);
    write_image(img, dir.file("zero.ppm"));
    std::string bytes = slurp(dir.file("zero.ppm"));
    std::string header = "P6\n16 16\n255\n";
    REQUIRE(bytes.size() == header.size() + 16 * 16 * 3);
    CHECK(bytes.compare(0, header.size(), header) == 0);
    for (std::size_t i = header.size(); i < bytes.size(); ++i) CHECK(bytes[i] == 0);
}

TEST_CASE("ppm round-trip preserves quantized values") {
    TempDir dir;
    Pcg32 rng(3);
    Image img(32, 16);
    for (double& v : img.data) v = rng.uniform();
    write_image(img, dir.file("rt.ppm"));
    Image back = read_image(dir.file("rt.ppm"));
    REQUIRE(back.width == img.width);
    REQUIRE(back.height == img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        CHECK(channel_to_byte(back.data[i]) == channel_to_byte(img.data[i]));
    }
}

TEST_CASE("png round-trip matches the ppm bytes") {
    TempDir dir;
    Pcg32 rng(5);
    Image img(24, 24);
    for (double& v : img.data) v = rng.uniform();
    write_image(img, dir.file("rt.png"));
    Image back = read_image(dir.file("rt.png"));
    REQUIRE(back.width == img.width);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        CHECK(channel_to_byte(back.data[i]) == channel_to_byte(img.data[i]));
    }
}

TEST_CASE("non-finite pixels are rejected") {
    TempDir dir;
    Image img(16, 16);
    img.data[5] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(write_image(img, dir.file("nan.ppm")), ConfigError);
}

TEST_CASE("csv quoting follows RFC 4180") {
    TempDir dir;
    Table t;
    t.columns = {"name", "value"};
    t.rows.push_back({std::string("plain"), std::int64_t(1)});
    t.rows.push_back({std::string("comma, inside"), 2.5});
    t.rows.push_back({std::string("quote \" inside"), std::string("multi\nline")});
    write_csv(t, dir.file("t.csv"));
    std::string body = slurp(dir.file("t.csv"));
    CHECK(body.find("\"comma, inside\"") != std::string::npos);
    CHECK(body.find("\"quote \"\" inside\"") != std::string::npos);
    CHECK(body.find("\"multi\nline\"") != std::string::npos);
}

TEST_CASE("infinity serializes as a sentinel in both formats") {
    TempDir dir;
    Table t;
    t.columns = {"psnr"};
    t.rows.push_back({std::numeric_limits<double>::infinity()});
    write_table(t, dir.file("p.csv"), dir.file("p.json"));
    CHECK(slurp(dir.file("p.csv")).find("inf") != std::string::npos);
    CHECK(slurp(dir.file("p.json")).find("\"inf\"") != std::string::npos);
}

TEST_CASE("json table is parseable and typed") {
    TempDir dir;
    Table t;
    t.columns = {"a", "b"};
    t.rows.push_back({std::int64_t(7), 1.25});
    write_json(t, dir.file("t.json"));
    auto j = nlohmann::json::parse(slurp(dir.file("t.json")));
    REQUIRE(j.is_array());
    CHECK(j[0]["a"] == 7);
    CHECK(j[0]["b"] == 1.25);
}
