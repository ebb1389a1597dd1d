#pragma once

#include <map>
#include <ostream>
#include <string>

#include <json.hpp>

#include "galgeo/bigint.hpp"
#include "galgeo/field.hpp"

namespace galgeo {

// Reports are JSON with a fixed key order and integer-only payloads, so a
// given RunConfig always produces byte-identical output. Wall-clock timings
// are emitted only when explicitly requested, to keep that guarantee.
using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "galgeo-report/1";

inline Json histogram_json(const std::map<u64, u64>& hist) {
    Json arr = Json::array();
    for (auto [size, count] : hist) arr.push_back(Json::array({size, count}));
    return arr;
}

inline void histogram_csv(std::ostream& os, const std::map<u64, u64>& hist) {
    os << "size,count\n";
    for (auto [size, count] : hist) os << size << ',' << count << "\n";
}

inline Json big_json(const BigInt& v) { return Json(v.str()); }

inline Json tower_json(const TowerDescriptor& d) {
    Json j;
    j["p"] = d.p;
    j["h"] = d.h;
    j["t"] = d.t;
    j["modulus_mid"] = d.modulus_mid;
    j["modulus_top"] = d.modulus_top;
    return j;
}

inline Json make_report(const std::string& check, Json params, Json body) {
    Json j;
    j["schema"] = kReportSchema;
    j["check"] = check;
    j["params"] = std::move(params);
    j["body"] = std::move(body);
    return j;
}

inline void emit_report(std::ostream& os, const Json& report) { os << report.dump(2) << "\n"; }

}  // namespace galgeo
