#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "galgeo/cache.hpp"
#include "galgeo/formats.hpp"
#include "galgeo/reduction.hpp"

using namespace galgeo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "galgeo-test-cache") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("point and subspace text round trips") {
    std::vector<u32> p{0, 1, 5};
    CHECK(format_point(p) == "0 1 5");
    CHECK(parse_point("0 1 5") == p);
    CHECK_THROWS_AS(parse_point(""), format_error);
    CHECK_THROWS_AS(parse_point("1 -2 0"), format_error);

    Mat m(2, 3);
    m.at(0, 0) = 1;
    m.at(1, 1) = 1;
    m.at(1, 2) = 4;
    std::string line = format_subspace(m);
    CHECK(line == "1 0 0; 0 1 4");
    Mat back = parse_subspace(line);
    CHECK(back == m);
    CHECK_THROWS_AS(parse_subspace("1 0; 1 0 0"), format_error);
}

TEST_CASE("pointset file round trip") {
    PointSet s(757);
    for (u64 i : {0ull, 5ull, 99ull, 756ull}) s.insert(i);
    std::ostringstream os;
    write_pointset(os, s);
    std::istringstream is(os.str());
    PointSet back = read_pointset(is);
    CHECK(back == s);
    CHECK(back.ambient() == 757);

    std::istringstream bad("wrong header\n1\n2\n");
    CHECK_THROWS_AS(read_pointset(bad), format_error);
}

TEST_CASE("spread export and parse") {
    FieldTower tw = FieldTower::make(2, 1, 3);
    DesarguesianSpread d = field_reduce(tw, 1);
    std::ostringstream os;
    write_spread(os, d);
    std::istringstream is(os.str());
    SpreadFile f = parse_spread(is);
    CHECK(f.p == 2);
    CHECK(f.h == 1);
    CHECK(f.t == 3);
    CHECK(f.n == 1);
    REQUIRE(f.elements.size() == 9);
    for (u64 i = 0; i < 9; ++i) CHECK(f.elements[i] == d.element_of(i).basis());
}

TEST_CASE("cache store and load round trip") {
    TempDir tmp;
    Cache cache(tmp.path);
    std::map<std::string, u64> params{{"p", 2}, {"h", 1}, {"t", 3}, {"n", 1}};

    FieldTower tw = FieldTower::make(2, 1, 3);
    DesarguesianSpread d = field_reduce(tw, 1);
    std::ostringstream os;
    write_spread(os, d);
    cache.store("spread", params, os.str());

    auto loaded = cache.load("spread", params);
    REQUIRE(loaded.has_value());
    CHECK(*loaded == os.str());

    // different params miss
    std::map<std::string, u64> other{{"p", 3}, {"h", 1}, {"t", 3}, {"n", 1}};
    CHECK_FALSE(cache.load("spread", other).has_value());
}

TEST_CASE("cache version gate refuses old manifests") {
    TempDir tmp;
    Cache cache(tmp.path);
    std::map<std::string, u64> params{{"x", 1}};
    cache.store("thing", params, "payload");
    REQUIRE(cache.load("thing", params).has_value());

    // bump the manifest version: everything becomes a miss
    std::ifstream in(tmp.path / "manifest.json");
    nlohmann::ordered_json manifest = nlohmann::ordered_json::parse(in);
    in.close();
    manifest["version"] = Cache::kFormatVersion + 1;
    std::ofstream outf(tmp.path / "manifest.json");
    outf << manifest.dump(2);
    outf.close();
    CHECK_FALSE(cache.load("thing", params).has_value());
}

TEST_CASE("corrupted cache entries degrade to a warned miss") {
    TempDir tmp;
    Cache cache(tmp.path);
    std::map<std::string, u64> params{{"x", 7}};
    cache.store("blob", params, "sensitive-bytes-here");

    // flip one byte of the stored file
    fs::path file;
    for (const auto& e : fs::directory_iterator(tmp.path))
        if (e.path().filename() != "manifest.json") file = e.path();
    REQUIRE(!file.empty());
    std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(3);
    f.put('X');
    f.close();

    std::ostringstream warnings;
    CHECK_FALSE(cache.load("blob", params, &warnings).has_value());
    CHECK(warnings.str().find("checksum") != std::string::npos);
}
