#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "galgeo/cli.hpp"
#include "galgeo/formats.hpp"
#include "galgeo/reduction.hpp"

using namespace galgeo;
namespace fs = std::filesystem;

namespace {

struct RunOut {
    int code;
    std::string out;
    std::string err;
};

RunOut run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

nlohmann::json body_of(const RunOut& r) {
    return nlohmann::json::parse(r.out).at("body");
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "galgeo-test-cli") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("gaussian subcommand") {
    RunOut r = run_cli({"gaussian", "--n", "2", "--k", "1", "--q", "7"});
    CHECK(r.code == 0);
    CHECK(body_of(r).at("value") == "8");
}

TEST_CASE("field and points subcommands") {
    RunOut f = run_cli({"field", "--p", "7", "--h", "1", "--t", "3"});
    CHECK(f.code == 0);
    CHECK(body_of(f).at("orders") == nlohmann::json::array({7, 7, 343}));

    RunOut p = run_cli({"points", "--p", "3", "--h", "1", "--t", "1", "--n", "2"});
    CHECK(p.code == 0);
    CHECK(body_of(p).at("count") == 13);

    RunOut big = run_cli({"points", "--p", "7", "--h", "1", "--t", "3", "--n", "2"});
    CHECK(body_of(big).at("count") == 117993);

    RunOut listed =
        run_cli({"points", "--p", "2", "--h", "1", "--t", "1", "--n", "1", "--list"});
    CHECK(listed.code == 0);
    CHECK(listed.out == "points v1 n=1 order=2 count=3\n0 1\n1 0\n1 1\n");
}

TEST_CASE("usage errors exit with 64") {
    CHECK(run_cli({"gaussian", "--n", "2"}).code == 64);          // missing required flags
    CHECK(run_cli({"gaussian", "--bogus", "1"}).code == 64);      // unknown flag
    CHECK(run_cli({"nonsense"}).code == 64);                      // unknown subcommand
    RunOut bad = run_cli({"field", "--p", "4", "--h", "1", "--t", "3"});
    CHECK(bad.code == 64);  // 4 is not prime: invalid argument
    CHECK(bad.err.find("prime") != std::string::npos);
    CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("spread subcommand with cache and export") {
    TempDir tmp;
    std::string exp = tmp.file("spread.txt");
    RunOut r = run_cli({"spread", "--p", "2", "--h", "1", "--t", "3", "--n", "1", "--export",
                        exp, "--cache-dir", tmp.file("cache")});
    CHECK(r.code == 0);
    CHECK(body_of(r).at("elements") == 9);
    CHECK(body_of(r).at("partition") == "pass");
    CHECK(fs::exists(exp));
    CHECK(fs::exists(tmp.file("cache") + "/manifest.json"));

    std::ifstream is(exp);
    SpreadFile sf = parse_spread(is);
    CHECK(sf.elements.size() == 9);

    // identical second run, reading through the cache
    RunOut r2 = run_cli({"spread", "--p", "2", "--h", "1", "--t", "3", "--n", "1",
                         "--cache-dir", tmp.file("cache")});
    CHECK(r2.out == r.out);
}

TEST_CASE("linearset, certify, audit pipeline through files") {
    TempDir tmp;
    std::string pts = tmp.file("b.pts");
    std::string wit = tmp.file("u.sub");

    RunOut cons = run_cli({"construct", "--p", "3", "--h", "1", "--t", "3", "--n", "2", "--k",
                           "1", "--source", "canonical", "--points-out", pts, "--witness-out",
                           wit});
    CHECK(cons.code == 0);
    CHECK(body_of(cons).at("size") == 37);
    CHECK(body_of(cons).at("blocking") == true);

    // feed the witness back through linearset and compare sizes
    RunOut ls = run_cli(
        {"linearset", "--p", "3", "--h", "1", "--t", "3", "--n", "2", "--subspace", wit});
    CHECK(ls.code == 0);
    CHECK(body_of(ls).at("size") == 37);

    RunOut audit = run_cli({"audit", "--p", "3", "--h", "1", "--t", "3", "--n", "2", "--k", "1",
                            "--points", pts});
    CHECK(audit.code == 0);
    CHECK(body_of(audit).at("hypotheses_all") == true);
    CHECK(body_of(audit).at("certificate") == "linear");

    // budget-limited certification is inconclusive: exit 2
    RunOut tight = run_cli({"audit", "--p", "3", "--h", "1", "--t", "3", "--n", "2", "--k", "1",
                            "--points", pts, "--budget", "1"});
    CHECK(tight.code == 2);
    CHECK(body_of(tight).at("certificate") == "inconclusive");

    RunOut cert = run_cli({"certify", "--p", "3", "--h", "1", "--t", "3", "--n", "2",
                           "--points", pts});
    CHECK(cert.code == 0);
    CHECK(body_of(cert).at("status") == "linear");
}

TEST_CASE("certify proves nonlinearity of a punctured set with exit 1") {
    // B = PG(1,27) minus one point, written by hand
    TempDir tmp;
    std::string pts = tmp.file("punctured.pts");
    {
        PointSet b(28);
        for (u64 i = 1; i < 28; ++i) b.insert(i);
        std::ofstream os(pts);
        write_pointset(os, b);
    }
    RunOut r = run_cli({"certify", "--p", "3", "--h", "1", "--t", "3", "--n", "1", "--points",
                        pts, "--exhaustive"});
    CHECK(r.code == 1);
    CHECK(body_of(r).at("status") == "nonlinear");
}

TEST_CASE("blocking-check and spectrum with mod profile") {
    TempDir tmp;
    std::string pts = tmp.file("line.pts");
    {
        FieldTower tw = FieldTower::make(2, 1, 3);
        ProjSpace sp(tw.top_ptr(), 2);
        PointSet b = points_of(SubspaceEnumerator(sp, 1).at(2));
        std::ofstream os(pts);
        write_pointset(os, b);
    }
    RunOut bc = run_cli({"blocking-check", "--p", "2", "--h", "1", "--t", "3", "--n", "2",
                         "--k", "1", "--points", pts});
    CHECK(bc.code == 0);
    CHECK(body_of(bc).at("blocking") == true);
    CHECK(body_of(bc).at("minimal_by_tangents") == true);
    CHECK(body_of(bc).at("characterizations_agree") == true);
    CHECK(body_of(bc).at("minimality_criterion") == true);

    RunOut sp = run_cli({"spectrum", "--p", "2", "--h", "1", "--t", "3", "--n", "2", "--d", "1",
                         "--points", pts, "--mod", "2"});
    CHECK(sp.code == 0);
    CHECK(body_of(sp).at("ok") == true);

    // csv histograms
    RunOut csv = run_cli({"spectrum", "--p", "2", "--h", "1", "--t", "3", "--n", "2", "--d",
                          "1", "--points", pts, "--format", "csv"});
    CHECK(csv.code == 0);
    CHECK(csv.out == "size,count\n1,72\n9,1\n");

    // a non-congruent set fails with exit 1 (odd characteristic: a 2-point
    // line trace is 2 mod 3, while mod 2 never rejects anything)
    std::string bad = tmp.file("bad.pts");
    {
        FieldTower t27 = FieldTower::make(3, 1, 3);
        ProjSpace sp27(t27.top_ptr(), 2);
        PointSet b = points_of(SubspaceEnumerator(sp27, 1).at(2));
        b.insert(b.contains(0) ? 1 : 0);
        std::ofstream os(bad);
        write_pointset(os, b);
    }
    RunOut spbad = run_cli({"spectrum", "--p", "3", "--h", "1", "--t", "3", "--n", "2", "--d",
                            "1", "--points", bad, "--mod", "3"});
    CHECK(spbad.code == 1);
}

TEST_CASE("points files may list coordinates instead of indices") {
    TempDir tmp;
    std::string pts = tmp.file("coords.pts");
    {
        FieldTower tw = FieldTower::make(2, 1, 3);
        ProjSpace sp(tw.top_ptr(), 2);
        Subspace line = SubspaceEnumerator(sp, 1).at(4);
        std::ofstream os(pts);
        std::vector<u32> v(3);
        line.for_each_point_index([&](u64 i) {
            sp.point_at(i, v);
            os << format_point(v) << "\n";
        });
    }
    RunOut bc = run_cli({"blocking-check", "--p", "2", "--h", "1", "--t", "3", "--n", "2",
                         "--k", "1", "--points", pts});
    CHECK(bc.code == 0);
    CHECK(body_of(bc).at("size") == 9);
    CHECK(body_of(bc).at("blocking") == true);
}

TEST_CASE("moments and gap subcommands") {
    TempDir tmp;
    std::string pts = tmp.file("m.pts");
    {
        PointSet b(73);
        for (u64 i = 0; i < 10; ++i) b.insert(i * 7 % 73);
        std::ofstream os(pts);
        write_pointset(os, b);
    }
    RunOut m = run_cli({"moments", "--p", "2", "--h", "1", "--t", "3", "--n", "2", "--k", "1",
                        "--points", pts});
    CHECK(m.code == 0);
    CHECK(body_of(m).at("identities_ok") == true);

    RunOut g = run_cli({"gap", "--q", "7", "--s", "1", "--n", "2", "--k", "1"});
    CHECK(g.code == 0);
    CHECK(body_of(g).at("all_negative") == true);
}

TEST_CASE("scan subcommands at desk scale") {
    RunOut r4 = run_cli({"scan-result4", "--q", "2"});
    CHECK(r4.code == 0);
    CHECK(body_of(r4).at("sublines") == 84);
    CHECK(body_of(r4).at("support_ok") == true);

    // identical reports independent of worker count (determinism contract)
    RunOut j1 = run_cli({"scan-result4", "--q", "3", "--jobs", "1"});
    RunOut j3 = run_cli({"scan-result4", "--q", "3", "--jobs", "3"});
    CHECK(j1.code == 0);
    CHECK(j1.out == j3.out);

    // sampled mode is labeled and seed-dependent but deterministic
    RunOut s1 = run_cli({"scan-result4", "--q", "3", "--sample", "50", "--seed", "9"});
    RunOut s2 = run_cli({"scan-result4", "--q", "3", "--sample", "50", "--seed", "9"});
    CHECK(s1.out == s2.out);
    CHECK(body_of(s1).at("exhaustive") == false);

    RunOut r5 = run_cli({"scan-result5", "--q", "4"});
    CHECK(r5.code == 0);
    CHECK(body_of(r5).at("max_subline_baer") <= 3);
    CHECK(body_of(r5).at("max_baer_linear") <= 7);

    RunOut notsq = run_cli({"scan-result5", "--q", "3"});
    CHECK(notsq.code == 64);
}

TEST_CASE("output goes to a file when requested") {
    TempDir tmp;
    std::string outfile = tmp.file("report.json");
    RunOut r = run_cli({"gaussian", "--n", "4", "--k", "2", "--q", "2", "--output", outfile});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream is(outfile);
    nlohmann::json rep = nlohmann::json::parse(is);
    CHECK(rep.at("body").at("value") == "35");
}
