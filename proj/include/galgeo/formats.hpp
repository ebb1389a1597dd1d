#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "galgeo/errors.hpp"
#include "galgeo/field.hpp"
#include "galgeo/pointset.hpp"
#include "galgeo/projective.hpp"
#include "galgeo/reduction.hpp"

// Plain-text object formats:
//   point      coordinates as integers in the fixed element order: "0 1 2"
//   subspace   rows separated by ';':                  "1 0 0; 0 1 0"
//   pointset   header "pointset v1 ambient=N", then one index per line
//   spread     header "spread v1 p=P h=H t=T n=N", then "index: subspace"
namespace galgeo {

inline std::string format_point(std::span<const u32> v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ' ';
        os << v[i];
    }
    return os.str();
}

inline std::vector<u32> parse_point(const std::string& line) {
    std::istringstream is(line);
    std::vector<u32> v;
    long long x;
    while (is >> x) {
        if (x < 0) throw format_error("negative coordinate in point: " + line);
        v.push_back(static_cast<u32>(x));
    }
    if (v.empty()) throw format_error("empty point line");
    return v;
}

inline std::string format_subspace(const Mat& m) {
    std::ostringstream os;
    for (u32 r = 0; r < m.rows; ++r) {
        if (r) os << "; ";
        os << format_point(m.row(r));
    }
    return os.str();
}

inline Mat parse_subspace(const std::string& line) {
    std::vector<std::vector<u32>> rows;
    std::string part;
    std::istringstream is(line);
    while (std::getline(is, part, ';')) {
        if (part.find_first_not_of(" \t") == std::string::npos) continue;
        rows.push_back(parse_point(part));
    }
    if (rows.empty()) throw format_error("empty subspace line");
    Mat m(static_cast<u32>(rows.size()), static_cast<u32>(rows.front().size()));
    for (u32 r = 0; r < m.rows; ++r) {
        if (rows[r].size() != m.cols) throw format_error("ragged subspace rows: " + line);
        for (u32 c = 0; c < m.cols; ++c) m.at(r, c) = rows[r][c];
    }
    return m;
}

inline void write_pointset(std::ostream& os, const PointSet& s) {
    os << "pointset v1 ambient=" << s.ambient() << "\n";
    for (u32 i : s.indices()) os << i << "\n";
}

inline PointSet read_pointset(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw format_error("missing pointset header");
    const std::string prefix = "pointset v1 ambient=";
    if (header.rfind(prefix, 0) != 0) throw format_error("bad pointset header: " + header);
    u64 ambient = std::stoull(header.substr(prefix.size()));
    PointSet s(ambient);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        s.insert(std::stoull(line));
    }
    return s;
}

inline void write_spread(std::ostream& os, const DesarguesianSpread& d) {
    const FieldTower& tw = d.tower();
    os << "spread v1 p=" << tw.p() << " h=" << tw.h() << " t=" << tw.t() << " n=" << d.n()
       << "\n";
    for (u64 i = 0; i < d.element_count(); ++i)
        os << i << ": " << format_subspace(d.element_of(i).basis()) << "\n";
}

struct SpreadFile {
    u32 p = 0, h = 0, t = 0, n = 0;
    std::vector<Mat> elements;
};

inline SpreadFile parse_spread(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw format_error("missing spread header");
    SpreadFile out;
    if (std::sscanf(header.c_str(), "spread v1 p=%u h=%u t=%u n=%u", &out.p, &out.h, &out.t,
                    &out.n) != 4)
        throw format_error("bad spread header: " + header);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw format_error("bad spread record: " + line);
        u64 idx = std::stoull(line.substr(0, colon));
        if (idx != out.elements.size()) throw format_error("spread records out of order");
        out.elements.push_back(parse_subspace(line.substr(colon + 1)));
    }
    return out;
}

}  // namespace galgeo
