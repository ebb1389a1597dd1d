#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "galgeo/blocking.hpp"
#include "galgeo/cache.hpp"
#include "galgeo/checks.hpp"
#include "galgeo/errors.hpp"
#include "galgeo/field.hpp"
#include "galgeo/formats.hpp"
#include "galgeo/parallel.hpp"
#include "galgeo/pointset.hpp"
#include "galgeo/projective.hpp"
#include "galgeo/reduction.hpp"
#include "galgeo/report.hpp"
#include "galgeo/verify.hpp"

namespace galgeo::cli {

// Exit codes: 0 pass, 1 fail (a failed check or a definite negative answer),
// 2 inconclusive (budget-limited certification), 64 usage error.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitUsage = 64;

namespace detail {

struct Common {
    u64 seed = 0;
    int jobs = 0;
    std::string cache_dir;
    std::string output;
    std::string format = "json";
    bool timings = false;
    u64 max_elements = Field::kDefaultMaxElements;
    u64 max_enum = kDefaultEnumBound;

    int effective_jobs() const { return jobs > 0 ? jobs : default_workers(); }

    std::optional<Cache> cache() const {
        std::string dir = cache_dir;
        if (dir.empty())
            if (const char* env = std::getenv("GALGEO_CACHE_DIR")) dir = env;
        if (dir.empty()) return std::nullopt;
        return Cache(dir);
    }
};

struct TowerArgs {
    u32 p = 0, h = 1, t = 1;
    FieldTower make(const Common& c) const { return FieldTower::make(p, h, t, c.max_elements); }
};

inline void add_common(CLI::App* sub, Common& c) {
    sub->set_help_flag("--help", "print help");
    sub->add_option("--seed", c.seed, "seed for all sampled scans");
    sub->add_option("--jobs", c.jobs, "worker threads (default: logical cores)");
    sub->add_option("--cache-dir", c.cache_dir, "result cache directory (or GALGEO_CACHE_DIR)");
    sub->add_option("--output", c.output, "write the report to this file instead of stdout");
    sub->add_option("--format", c.format, "report format: json or csv (histograms only)")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--timings", c.timings, "include wall-clock timings in the report");
    sub->add_option("--max-elements", c.max_elements, "field size cap for table arithmetic");
    sub->add_option("--max-enum", c.max_enum, "enumeration cap (canonical forms)");
}

inline void add_tower(CLI::App* sub, TowerArgs& t, bool need_n, u32* n) {
    sub->add_option("--p", t.p, "prime characteristic")->required();
    sub->add_option("--h", t.h, "degree of GF(q) over GF(p)");
    sub->add_option("--t", t.t, "degree of GF(q^t) over GF(q)");
    if (need_n) sub->add_option("--n", *n, "projective dimension n")->required();
}

class OutputTarget {
public:
    OutputTarget(const Common& c, std::ostream& fallback) {
        if (!c.output.empty()) {
            file_.open(c.output, std::ios::binary);
            if (!file_) throw error("cannot open output file " + c.output);
            os_ = &file_;
        } else {
            os_ = &fallback;
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_ = nullptr;
};

// Accepts either the indexed pointset format (header "pointset v1 ...") or
// plain text points, one coordinate row per line.
inline PointSet load_pointset(const std::string& path, const ProjSpace& sp) {
    std::ifstream is(path);
    if (!is) throw error("cannot open points file " + path);
    std::string first;
    while (std::getline(is, first))
        if (!first.empty() && first[0] != '#') break;
    if (first.rfind("pointset v1", 0) == 0) {
        std::ifstream again(path);
        PointSet s = read_pointset(again);
        if (s.ambient() != sp.size())
            throw argument_error("points file ambient " + std::to_string(s.ambient()) +
                                 " does not match the space (" + std::to_string(sp.size()) +
                                 ")");
        return s;
    }
    PointSet s(sp.size());
    std::string line = first;
    do {
        if (line.empty() || line[0] == '#') continue;
        std::vector<u32> v = parse_point(line);
        if (v.size() != sp.ncoords())
            throw format_error("point has " + std::to_string(v.size()) +
                               " coordinates, expected " + std::to_string(sp.ncoords()));
        s.insert(sp.index_of(v));
    } while (std::getline(is, line));
    return s;
}

inline Mat load_subspace(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw error("cannot open subspace file " + path);
    std::string line;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#') return parse_subspace(line);
    throw format_error("no subspace record in " + path);
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    u64 ms() const {
        return static_cast<u64>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::steady_clock::now() - t0)
                                    .count());
    }
};

inline void finish(Json& report, const Common& c, const Timer& timer) {
    if (c.timings) report["body"]["wall_time_ms"] = timer.ms();
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    using namespace detail;

    CLI::App app{"finite-geometry computation engine: field towers, projective enumeration, "
                 "Desarguesian spreads, linear sets, blocking-set analysis"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(0, 1);

    // per-subcommand state
    Common c;
    TowerArgs tw;
    u32 n = 1, k = 1, d = 1, s = 1, q = 2;
    u64 gauss_n = 0, gauss_k = 0;
    std::string points_file, subspace_file, pi_file, export_file, points_out, witness_out;
    std::string level = "top", source = "canonical", boundary = "both";
    std::optional<u64> sample;
    bool exhaustive = false, list_points = false;
    u64 budget = 1'000'000;
    std::optional<u64> anchor;
    std::optional<u64> mod;

    auto* cmd_field = app.add_subcommand("field", "construct and describe a field tower");
    add_tower(cmd_field, tw, false, nullptr);
    add_common(cmd_field, c);

    auto* cmd_points = app.add_subcommand("points", "enumerate the points of PG(n, .)");
    add_tower(cmd_points, tw, true, &n);
    cmd_points->add_option("--level", level, "field level: prime, mid, or top")
        ->check(CLI::IsMember({"prime", "mid", "top"}));
    cmd_points->add_flag("--list", list_points, "write the points in text format");
    add_common(cmd_points, c);

    auto* cmd_gauss = app.add_subcommand("gaussian", "Gaussian coefficient [n k]_q");
    cmd_gauss->add_option("--n", gauss_n)->required();
    cmd_gauss->add_option("--k", gauss_k)->required();
    cmd_gauss->add_option("--q", q, "prime power")->required();
    add_common(cmd_gauss, c);

    auto* cmd_spread = app.add_subcommand("spread", "build a Desarguesian spread by field reduction");
    add_tower(cmd_spread, tw, true, &n);
    cmd_spread->add_option("--export", export_file, "write the spread in text format");
    add_common(cmd_spread, c);

    auto* cmd_linearset = app.add_subcommand("linearset", "the linear set B(U) of a subspace");
    add_tower(cmd_linearset, tw, true, &n);
    cmd_linearset->add_option("--subspace", subspace_file, "subspace of the big space")->required();
    cmd_linearset->add_option("--points-out", points_out, "write B(U) as a pointset file");
    add_common(cmd_linearset, c);

    auto* cmd_certify = app.add_subcommand("certify", "search for a subspace U with B(U) = B");
    add_tower(cmd_certify, tw, true, &n);
    cmd_certify->add_option("--points", points_file, "pointset file for B")->required();
    cmd_certify->add_flag("--exhaustive", exhaustive, "no node budget; failure proves nonlinearity");
    cmd_certify->add_option("--budget", budget, "node budget (non-exhaustive mode)");
    cmd_certify->add_option("--anchor", anchor, "anchor point of B");
    add_common(cmd_certify, c);

    auto* cmd_blocking = app.add_subcommand("blocking-check", "coverage/minimality diagnostics");
    add_tower(cmd_blocking, tw, true, &n);
    cmd_blocking->add_option("--k", k, "blocking index")->required();
    cmd_blocking->add_option("--points", points_file)->required();
    add_common(cmd_blocking, c);

    auto* cmd_spectrum = app.add_subcommand("spectrum", "intersection histogram over d-spaces");
    add_tower(cmd_spectrum, tw, true, &n);
    cmd_spectrum->add_option("--points", points_file)->required();
    cmd_spectrum->add_option("--d", d, "subspace dimension to scan")->required();
    cmd_spectrum->add_option("--mod", mod, "check the 0-or-1 (mod m) profile");
    cmd_spectrum->add_option("--sample", sample, "seeded sample size when beyond --max-enum");
    add_common(cmd_spectrum, c);

    auto* cmd_moments = app.add_subcommand("moments", "moment identities over (n-k)-spaces");
    add_tower(cmd_moments, tw, true, &n);
    cmd_moments->add_option("--k", k)->required();
    cmd_moments->add_option("--points", points_file)->required();
    cmd_moments->add_option("--pi", pi_file, "subspace file for pi (default: the whole space)");
    add_common(cmd_moments, c);

    auto* cmd_gap = app.add_subcommand("gap", "boundary-gap sign checks");
    cmd_gap->add_option("--q", q)->required();
    cmd_gap->add_option("--s", s)->required();
    cmd_gap->add_option("--n", n)->required();
    cmd_gap->add_option("--k", k)->required();
    cmd_gap->add_option("--boundary", boundary)->check(CLI::IsMember({"lower", "upper", "both"}));
    add_common(cmd_gap, c);

    auto* cmd_scan4 = app.add_subcommand("scan-result4", "subline vs plane-induced linear sets");
    cmd_scan4->add_option("--q", q)->required();
    cmd_scan4->add_option("--sample", sample, "sampled planes instead of the full scan");
    add_common(cmd_scan4, c);

    auto* cmd_scan5 = app.add_subcommand("scan-result5", "Baer subline intersection maxima");
    cmd_scan5->add_option("--q", q)->required();
    add_common(cmd_scan5, c);

    auto* cmd_construct = app.add_subcommand("construct", "construct a linear k-blocking set");
    add_tower(cmd_construct, tw, true, &n);
    cmd_construct->add_option("--k", k)->required();
    cmd_construct->add_option("--source", source)
        ->check(CLI::IsMember({"canonical", "seeded", "spanned"}));
    cmd_construct->add_option("--points-out", points_out);
    cmd_construct->add_option("--witness-out", witness_out);
    add_common(cmd_construct, c);

    auto* cmd_audit = app.add_subcommand("audit", "hypothesis checks plus linearity certification");
    add_tower(cmd_audit, tw, true, &n);
    cmd_audit->add_option("--k", k)->required();
    cmd_audit->add_option("--points", points_file)->required();
    cmd_audit->add_flag("--exhaustive", exhaustive);
    cmd_audit->add_option("--budget", budget);
    add_common(cmd_audit, c);

    auto* cmd_all = app.add_subcommand("verify-all", "run the full verification suite");
    add_common(cmd_all, c);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("galgeo");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (app.get_subcommands().empty()) {
        out << app.help();
        return kExitUsage;
    }

    try {
        Timer timer;
        OutputTarget target(c, out);
        std::ostream& os = target.stream();

        if (app.got_subcommand(cmd_field)) {
            FieldTower tower = tw.make(c);
            Json body;
            body["tower"] = tower_json(tower.descriptor());
            body["orders"] = Json::array({tower.p(), tower.q(), tower.top_order()});
            Json rep = make_report("field", tower_json(tower.descriptor()), body);
            finish(rep, c, timer);
            emit_report(os, rep);
            return kExitPass;
        }

        if (app.got_subcommand(cmd_points)) {
            FieldTower tower = tw.make(c);
            FieldPtr f = level == "prime" ? tower.prime_ptr()
                                          : (level == "mid" ? tower.mid_ptr() : tower.top_ptr());
            ProjSpace sp(f, n, c.max_enum);
            if (list_points) {
                os << "points v1 n=" << n << " order=" << f->size() << " count=" << sp.size()
                   << "\n";
                std::vector<u32> v(sp.ncoords());
                for (u64 i = 0; i < sp.size(); ++i) {
                    sp.point_at(i, v);
                    os << format_point(v) << "\n";
                }
                return kExitPass;
            }
            Json params{{"p", tw.p}, {"h", tw.h}, {"t", tw.t}, {"n", n}, {"level", level}};
            Json body{{"order", f->size()}, {"count", sp.size()}};
            Json rep = make_report("points", params, body);
            finish(rep, c, timer);
            emit_report(os, rep);
            return kExitPass;
        }

        if (app.got_subcommand(cmd_gauss)) {
            BigInt v = gaussian_coeff(static_cast<long long>(gauss_n),
                                      static_cast<long long>(gauss_k), q);
            Json rep = make_report("gaussian", Json{{"n", gauss_n}, {"k", gauss_k}, {"q", q}},
                                   Json{{"value", big_json(v)}});
            finish(rep, c, timer);
            emit_report(os, rep);
            return kExitPass;
        }

        if (app.got_subcommand(cmd_spread)) {
            FieldTower tower = tw.make(c);
            std::map<std::string, u64> key{{"p", tw.p}, {"h", tw.h}, {"t", tw.t}, {"n", n}};
            DesarguesianSpread sp = field_reduce(tower, n, c.max_enum);
            std::ostringstream buf;
            write_spread(buf, sp);
            if (auto cache = c.cache()) {
                auto hit = cache->load("spread", key, &err);
                if (!hit || *hit != buf.str()) cache->store("spread", key, buf.str());
            }
            if (!export_file.empty()) {
                std::ofstream ex(export_file, std::ios::binary);
                if (!ex) throw error("cannot open export file " + export_file);
                ex << buf.str();
            }
            Json params{{"p", tw.p}, {"h", tw.h}, {"t", tw.t}, {"n", n}};
            Json body{{"elements", sp.element_count()},
                      {"big_points", sp.big_space().size()},
                      {"element_dim", tower.t() - 1},
                      {"partition", "pass"}};
            Json rep = make_report("spread", params, body);
            finish(rep, c, timer);
            emit_report(os, rep);
            return kExitPass;
        }

        if (app.got_subcommand(cmd_linearset)) {
            FieldTower tower = tw.make(c);
            DesarguesianSpread sp = field_reduce(tower, n, c.max_enum);
            Subspace u(sp.big_space(), load_subspace(subspace_file));
            PointSet b = sp.linear_set(u);
            if (!points_out.empty()) {
                std::ofstream po(points_out, std::ios::binary);
                if (!po) throw error("cannot open points output file " + points_out);
                write_pointset(po, b);
            }
            Json body{{"subspace_dim", u.dim()}, {"size", b.size()}};
            body["scattered"] = sp.is_scattered(u);
            if (n == 1 && tower.t() == 3) {
                LineSetClass cls = classify_line_linear_set(sp, u);
                body["kind"] = to_string(cls.kind);
                body["pattern_consistent"] = cls.pattern_consistent;
            }
            if (b.size() <= 10000) {
                Json idx = Json::array();
                for (u32 i : b.indices()) idx.push_back(i);
                body["indices"] = std::move(idx);
            }
            Json rep = make_report(
                "linearset", Json{{"p", tw.p}, {"h", tw.h}, {"t", tw.t}, {"n", n}}, body);
            finish(rep, c, timer);
            emit_report(os, rep);
            return kExitPass;
        }

        if (app.got_subcommand(cmd_certify)) {
            FieldTower tower = tw.make(c);
            DesarguesianSpread sp = field_reduce(tower, n, c.max_enum);
            PointSet b = load_pointset(points_file, sp.small_space());
            CertifyOptions opts;
            opts.exhaustive = exhaustive;
            opts.max_nodes = budget;
            opts.anchor = anchor;
            CertifyResult res = certify_linear(sp, b, opts);
            Json body;
            body["size"] = b.size();
            body["nodes"] = res.nodes;
            switch (res.status) {
                case CertifyResult::Status::Found:
                    body["status"] = "linear";
                    body["witness"] = format_subspace(res.witness->basis());
                    break;
                case CertifyResult::Status::Nonlinear:
                    body["status"] = exhaustive ? "nonlinear" : "no-witness-found";
                    break;
                case CertifyResult::Status::Inconclusive:
                    body["status"] = "inconclusive";
                    break;
            }
            Json rep = make_report(
                "certify",
                Json{{"p", tw.p}, {"h", tw.h}, {"t", tw.t}, {"n", n}, {"exhaustive", exhaustive}},
                body);
            finish(rep, c, timer);
            emit_report(os, rep);
            if (res.status == CertifyResult::Status::Found) return kExitPass;
            return res.status == CertifyResult::Status::Inconclusive ? kExitInconclusive
                                                                     : kExitFail;
        }

        if (app.got_subcommand(cmd_blocking)) {
            FieldTower tower = tw.make(c);
            BlockingContext ctx(tower, n, k, c.max_enum);
            PointSet b = load_pointset(points_file, ctx.space);
            BlockingCheck chk = is_k_blocking(b, ctx);
            Json body;
            body["size"] = b.size();
            body["blocking"] = chk.blocking;
            if (chk.witness) body["missed_space"] = format_subspace(chk.witness->basis());
            body["small"] = is_small(b, ctx);
            if (chk.blocking) {
                bool mt = is_minimal_by_tangents(b, ctx);
                bool mr = is_minimal_by_removal(b, ctx);
                body["minimal_by_tangents"] = mt;
                body["minimal_by_removal"] = mr;
                body["characterizations_agree"] = mt == mr;
            }
            body["minimality_criterion"] = minimality_criterion(b, ctx);
            Json rep = make_report(
                "blocking-check",
                Json{{"p", tw.p}, {"h", tw.h}, {"t", tw.t}, {"n", n}, {"k", k}}, body);
            finish(rep, c, timer);
            emit_report(os, rep);
            return kExitPass;
        }

        if (app.got_subcommand(cmd_spectrum)) {
            FieldTower tower = tw.make(c);
            ProjSpace space(tower.top_ptr(), n, c.max_enum);
            PointSet b = load_pointset(points_file, space);
            SpectrumOptions opts;
            opts.bound = c.max_enum;
            opts.sample = sample;
            opts.seed = c.seed;
            opts.jobs = c.effective_jobs();
            int code = kExitPass;
            Json body;
            if (mod) {
                ModProfile mp = mod_profile(b, d, *mod, space, opts);
                body["mod"] = *mod;
                body["ok"] = mp.ok;
                body["exhaustive"] = mp.report.exhaustive;
                body["histogram"] = histogram_json(mp.report.histogram);
                Json off = Json::array();
                for (const auto& [idx, sub] : mp.report.offenders)
                    off.push_back(Json{{"index", idx}, {"subspace", format_subspace(sub.basis())}});
                body["offenders"] = std::move(off);
                if (!mp.ok) code = kExitFail;
                if (c.format == "csv") {
                    histogram_csv(os, mp.report.histogram);
                    return code;
                }
            } else {
                SpectrumReport rep = spectrum(b, d, space, opts);
                body["exhaustive"] = rep.exhaustive;
                body["total"] = rep.total;
                body["histogram"] = histogram_json(rep.histogram);
                if (c.format == "csv") {
                    histogram_csv(os, rep.histogram);
                    return code;
                }
            }
            Json rep = make_report(
                "spectrum",
                Json{{"p", tw.p}, {"h", tw.h}, {"t", tw.t}, {"n", n}, {"d", d}, {"seed", c.seed}},
                body);
            finish(rep, c, timer);
            emit_report(os, rep);
            return code;
        }

        if (app.got_subcommand(cmd_moments)) {
            FieldTower tower = tw.make(c);
            BlockingContext ctx(tower, n, k, c.max_enum);
            PointSet b = load_pointset(points_file, ctx.space);
            Subspace pi = pi_file.empty() ? Subspace::whole(ctx.space)
                                          : Subspace(ctx.space, load_subspace(pi_file));
            MomentCheck mc = moment_counts(b, pi, ctx);
            Json body;
            body["b_pi"] = mc.b_pi;
            body["s"] = mc.s;
            body["identities_ok"] = mc.identities_ok;
            body["sums"] = Json::array({big_json(mc.sum0), big_json(mc.sum1), big_json(mc.sum2)});
            body["expected"] = Json::array(
                {big_json(mc.expected0), big_json(mc.expected1), big_json(mc.expected2)});
            body["weighted"] = big_json(mc.weighted);
            body["one_mod_q"] = mc.one_mod_q;
            body["histogram"] = histogram_json(mc.xs);
            Json rep = make_report(
                "moments",
                Json{{"p", tw.p}, {"h", tw.h}, {"t", tw.t}, {"n", n}, {"k", k}}, body);
            finish(rep, c, timer);
            emit_report(os, rep);
            return mc.identities_ok && (!mc.one_mod_q || mc.weighted >= 0) ? kExitPass
                                                                           : kExitFail;
        }

        if (app.got_subcommand(cmd_gap)) {
            Json evals = Json::array();
            bool all_negative = true;
            auto eval_one = [&](Boundary bd) {
                GapEvaluation ge = gap_evaluate(n, k, s, q, bd);
                evals.push_back(Json{{"boundary", bd == Boundary::Lower ? "lower" : "upper"},
                                     {"size", big_json(ge.size)},
                                     {"value", big_json(ge.value)},
                                     {"sign", ge.sign}});
                all_negative = all_negative && ge.sign < 0;
            };
            if (boundary == "lower" || boundary == "both") eval_one(Boundary::Lower);
            if (boundary == "upper" || boundary == "both") eval_one(Boundary::Upper);
            Json rep = make_report("gap", Json{{"n", n}, {"k", k}, {"s", s}, {"q", q}},
                                   Json{{"evaluations", evals}, {"all_negative", all_negative}});
            finish(rep, c, timer);
            emit_report(os, rep);
            return all_negative ? kExitPass : kExitFail;
        }

        if (app.got_subcommand(cmd_scan4)) {
            auto [p, h] = prime_power_decompose(q);
            FieldTower tower = FieldTower::make(p, h, 3, c.max_elements);
            SublineScanOptions opts;
            opts.sample_planes = sample;
            opts.seed = c.seed;
            opts.jobs = c.effective_jobs();
            SublineScanReport repd = scan_subline_linear_sets(tower, opts);
            bool support_ok = true;
            for (auto [size, count] : repd.histogram)
                if (!(size <= 3 || size == static_cast<u64>(q) + 1)) support_ok = false;
            if (c.format == "csv") {
                histogram_csv(os, repd.histogram);
                return support_ok ? kExitPass : kExitFail;
            }
            Json body{{"sublines", repd.subline_count},
                      {"planes", repd.planes_scanned},
                      {"exhaustive", repd.exhaustive},
                      {"histogram", histogram_json(repd.histogram)},
                      {"support_ok", support_ok}};
            Json rep = make_report("scan-result4", Json{{"q", q}, {"seed", c.seed}}, body);
            finish(rep, c, timer);
            emit_report(os, rep);
            return support_ok ? kExitPass : kExitFail;
        }

        if (app.got_subcommand(cmd_scan5)) {
            auto [p, h] = prime_power_decompose(q);
            FieldTower tower = FieldTower::make(p, h, 3, c.max_elements);
            BaerScanReport repd = scan_baer_intersections(tower, c.effective_jobs());
            u32 sq = static_cast<u32>(std::round(std::sqrt(static_cast<double>(q))));
            bool ok = repd.max_subline_baer <= sq + 1 &&
                      repd.max_baer_linear <= static_cast<u64>(q) + sq + 1;
            Json body{{"baer_sublines", repd.baer_count},
                      {"sublines", repd.subline_count},
                      {"planes", repd.planes_scanned},
                      {"linear_sets_tested", repd.linear_sets_tested},
                      {"max_subline_baer", repd.max_subline_baer},
                      {"max_baer_linear", repd.max_baer_linear},
                      {"hist_subline_baer", histogram_json(repd.hist_subline_baer)},
                      {"hist_baer_linear", histogram_json(repd.hist_baer_linear)},
                      {"bounds_ok", ok}};
            Json rep = make_report("scan-result5", Json{{"q", q}}, body);
            finish(rep, c, timer);
            emit_report(os, rep);
            return ok ? kExitPass : kExitFail;
        }

        if (app.got_subcommand(cmd_construct)) {
            FieldTower tower = tw.make(c);
            DesarguesianSpread sp = field_reduce(tower, n, c.max_enum);
            LinearSource src = source == "canonical" ? LinearSource::CanonicalSubgeometry
                               : source == "seeded"  ? LinearSource::SeededRandomSubspace
                                                     : LinearSource::SpannedSpreadElements;
            ConstructedBlocking cb = construct_linear_blocking(sp, k, src, c.seed);
            BlockingContext ctx(tower, n, k, c.max_enum);
            if (!points_out.empty()) {
                std::ofstream po(points_out, std::ios::binary);
                if (!po) throw error("cannot open points output file " + points_out);
                write_pointset(po, cb.set);
            }
            if (!witness_out.empty()) {
                std::ofstream wo(witness_out, std::ios::binary);
                if (!wo) throw error("cannot open witness output file " + witness_out);
                wo << format_subspace(cb.witness.basis()) << "\n";
            }
            Json body{{"size", cb.set.size()},
                      {"witness_dim", cb.witness.dim()},
                      {"blocking", is_k_blocking(cb.set, ctx).blocking},
                      {"witness", format_subspace(cb.witness.basis())}};
            Json rep = make_report(
                "construct",
                Json{{"p", tw.p}, {"h", tw.h}, {"t", tw.t}, {"n", n}, {"k", k},
                     {"source", source}, {"seed", c.seed}},
                body);
            finish(rep, c, timer);
            emit_report(os, rep);
            return kExitPass;
        }

        if (app.got_subcommand(cmd_audit)) {
            FieldTower tower = tw.make(c);
            DesarguesianSpread sp = field_reduce(tower, n, c.max_enum);
            BlockingContext ctx(tower, n, k, c.max_enum);
            PointSet b = load_pointset(points_file, ctx.space);
            AuditOptions opts;
            opts.certify.exhaustive = exhaustive;
            opts.certify.max_nodes = budget;
            AuditReport rep = linearity_audit(b, ctx, sp, opts);
            Json body;
            body["size"] = rep.size;
            body["hypotheses"] = Json{{"blocking", rep.blocking},
                                      {"small", rep.small},
                                      {"minimal", rep.minimal},
                                      {"one_mod_q", rep.one_mod_q}};
            body["hypotheses_all"] = rep.hypotheses_all;
            if (rep.congruence_witness)
                body["congruence_witness"] = format_subspace(rep.congruence_witness->basis());
            if (rep.size_filter_applied) {
                body["size_congruent"] = rep.size_congruent;
                body["size_within_bound"] = rep.size_within;
            }
            int code = kExitFail;
            if (rep.certificate) {
                switch (rep.certificate->status) {
                    case CertifyResult::Status::Found:
                        body["certificate"] = "linear";
                        body["witness"] = format_subspace(rep.certificate->witness->basis());
                        code = kExitPass;
                        break;
                    case CertifyResult::Status::Nonlinear:
                        body["certificate"] = "nonlinear";
                        code = kExitFail;
                        break;
                    case CertifyResult::Status::Inconclusive:
                        body["certificate"] = "inconclusive";
                        code = kExitInconclusive;
                        break;
                }
            } else {
                body["certificate"] = "not-run";
            }
            Json jrep = make_report(
                "audit", Json{{"p", tw.p}, {"h", tw.h}, {"t", tw.t}, {"n", n}, {"k", k}}, body);
            finish(jrep, c, timer);
            emit_report(os, jrep);
            return code;
        }

        if (app.got_subcommand(cmd_all)) {
            std::vector<checks::CheckResult> results = checks::run_all(c.effective_jobs(), &err);
            bool all = true;
            Json arr = Json::array();
            for (const auto& r : results) {
                all = all && r.pass;
                Json jr{{"id", r.id}, {"pass", r.pass}, {"details", r.details}};
                if (c.timings) {
                    jr["seconds"] = r.seconds;
                    jr["limit_seconds"] = r.limit_seconds;
                }
                arr.push_back(std::move(jr));
            }
            Json rep = make_report("verify-all", Json{{"jobs", c.effective_jobs()}},
                                   Json{{"checks", arr}, {"all_passed", all}});
            finish(rep, c, timer);
            emit_report(os, rep);
            return all ? kExitPass : kExitFail;
        }
    } catch (const bound_error& e) {
        err << "resource bound exceeded: " << e.what() << "\n";
        return kExitFail;
    } catch (const format_error& e) {
        err << "input format error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const argument_error& e) {
        err << "invalid argument: " << e.what() << "\n";
        return kExitUsage;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}

}  // namespace galgeo::cli
