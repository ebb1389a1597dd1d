#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "galgeo/errors.hpp"
#include "galgeo/field.hpp"
#include "galgeo/pointset.hpp"
#include "galgeo/projective.hpp"

namespace galgeo {

// The partition of PG((n+1)t-1, q) into (t-1)-dimensional subspaces obtained
// by reading each point of PG(n, q^t) as a GF(q)-subspace of the big space.
// Element i is the image of the i-th canonical point of the small space, so
// element indices and small-space point indices coincide.
class DesarguesianSpread {
public:
    static DesarguesianSpread build(FieldTower tower, u32 n,
                                    u64 max_points = kDefaultEnumBound) {
        DesarguesianSpread d;
        d.tower_ = tower;
        d.n_ = n;
        d.small_ = ProjSpace(tower.top_ptr(), n, max_points);
        d.big_ = ProjSpace(tower.mid_ptr(), (n + 1) * tower.t() - 1, max_points);
        d.lookup_.assign(d.big_.size(), kUnset);
        d.elements_.reserve(d.small_.size());

        const Field& top = tower.top();
        const u32 t = tower.t(), m = n + 1;
        std::vector<u32> pt(m);
        std::vector<u32> coords(t);
        for (u64 i = 0; i < d.small_.size(); ++i) {
            d.small_.point_at(i, pt);
            // GF(q)-basis of the element: rows are w^j * v, decomposed.
            Mat rows(t, m * t);
            for (u32 j = 0; j < t; ++j) {
                u32 wj = top.pow(tower.omega_or_one(), j);
                for (u32 c = 0; c < m; ++c) {
                    u32 x = top.mul(wj, pt[c]);
                    top.digits(x, {coords.data(), t});
                    for (u32 k = 0; k < t; ++k) rows.at(j, c * t + k) = coords[k];
                }
            }
            Subspace el(d.big_, std::move(rows));
            if (el.rank() != t) throw internal_error("spread element has wrong rank");
            el.for_each_point_index([&](u64 p) {
                if (d.lookup_[p] != kUnset)
                    throw internal_error("spread elements overlap; not a partition");
                d.lookup_[p] = static_cast<u32>(i);
            });
            d.elements_.push_back(std::move(el));
        }
        for (u32 v : d.lookup_)
            if (v == kUnset) throw internal_error("spread does not cover the big space");
        return d;
    }

    const FieldTower& tower() const { return tower_; }
    u32 n() const { return n_; }
    const ProjSpace& small_space() const { return small_; }
    const ProjSpace& big_space() const { return big_; }
    u64 element_count() const { return elements_.size(); }
    const std::vector<Subspace>& elements() const { return elements_; }

    // S applied pointwise: index of the element through a big-space point.
    u32 element_of_big_point(u64 big_index) const { return lookup_[big_index]; }

    // S(P) for a point P of the small space.
    const Subspace& element_of(u64 small_index) const { return elements_[small_index]; }

    // B(U): the spread elements meeting U, as points of the small space.
    BitMask linear_set_mask(const Subspace& u) const {
        check_same_space(u.space(), big_);
        BitMask mask(small_.size());
        u.for_each_point_index([&](u64 p) { mask.set(lookup_[p]); });
        return mask;
    }

    PointSet linear_set(const Subspace& u) const {
        check_same_space(u.space(), big_);
        PointSet out(small_.size());
        u.for_each_point_index([&](u64 p) { out.insert(lookup_[p]); });
        return out;
    }

    bool is_scattered(const Subspace& u) const {
        return linear_set_mask(u).count() == u.num_points();
    }

    // True when every spread element meeting `s` is contained in it; spans of
    // spread elements have this property.
    bool is_partitioned_by_elements(const Subspace& s) const {
        check_same_space(s.space(), big_);
        std::vector<u32> met;
        bool ok = true;
        s.for_each_point_index([&](u64 p) { met.push_back(lookup_[p]); });
        std::sort(met.begin(), met.end());
        met.erase(std::unique(met.begin(), met.end()), met.end());
        u64 covered = 0;
        for (u32 e : met) {
            if (!s.contains_sub(elements_[e])) {
                ok = false;
                break;
            }
            covered += elements_[e].num_points();
        }
        return ok && covered == s.num_points();
    }

private:
    static constexpr u32 kUnset = 0xffffffffu;

    FieldTower tower_;
    u32 n_ = 0;
    ProjSpace small_, big_;
    std::vector<Subspace> elements_;
    std::vector<u32> lookup_;
};

inline DesarguesianSpread field_reduce(const FieldTower& tower, u32 n,
                                       u64 max_points = kDefaultEnumBound) {
    return DesarguesianSpread::build(tower, n, max_points);
}

enum class LineSetKind { Point, Subline, Pencil, ScatteredPlane, FullLine, Other };

inline const char* to_string(LineSetKind k) {
    switch (k) {
        case LineSetKind::Point: return "point";
        case LineSetKind::Subline: return "subline";
        case LineSetKind::Pencil: return "pencil";
        case LineSetKind::ScatteredPlane: return "scattered-plane";
        case LineSetKind::FullLine: return "full-line";
        case LineSetKind::Other: return "other";
    }
    return "other";
}

struct LineSetClass {
    LineSetKind kind = LineSetKind::Other;
    u64 set_size = 0;
    // size and meet pattern tell the same story (checked for the named kinds)
    bool pattern_consistent = true;
};

// Classification of B(U) on PG(1,q^3) for subspaces U of the 5-dimensional
// big space. The named kinds cover dim U <= 2 plus the full line; anything
// else is reported as Other rather than guessed.
inline LineSetClass classify_line_linear_set(const DesarguesianSpread& d, const Subspace& u) {
    if (d.n() != 1 || d.tower().t() != 3)
        throw argument_error("line linear-set classification requires n=1, t=3");
    const u64 q = d.tower().q();
    LineSetClass out;
    BitMask mask = d.linear_set_mask(u);
    out.set_size = mask.count();

    // intersection sizes with the elements met, as subspace point counts
    std::map<u64, u32> meet_hist;
    for (u64 i = 0; i < d.element_count(); ++i)
        if (mask.test(i)) {
            u64 c = 0;
            d.element_of(i).for_each_point_index([&](u64 p) {
                if (u.contains_index(p)) ++c;
            });
            ++meet_hist[c];
        }

    const u64 line_pts = q + 1, plane_pts = q * q + q + 1;
    if (out.set_size == d.small_space().size() && u.rank() > 3) {
        out.kind = LineSetKind::FullLine;
    } else if (out.set_size == 1) {
        out.kind = LineSetKind::Point;
        out.pattern_consistent = u.rank() <= 3;
    } else if (u.rank() == 2 && out.set_size == line_pts) {
        out.kind = LineSetKind::Subline;
        out.pattern_consistent = meet_hist[1] == line_pts;
    } else if (u.rank() == 3 && out.set_size == q * q + 1) {
        out.kind = LineSetKind::Pencil;
        out.pattern_consistent = meet_hist[line_pts] == 1 && meet_hist[1] == q * q;
    } else if (u.rank() == 3 && out.set_size == plane_pts) {
        out.kind = LineSetKind::ScatteredPlane;
        out.pattern_consistent = meet_hist[1] == plane_pts;
    } else if (out.set_size == d.small_space().size()) {
        out.kind = LineSetKind::FullLine;
    } else {
        out.kind = LineSetKind::Other;
    }
    return out;
}

namespace detail {

// Unique projective map sending the frame (inf, 0, 1) to the three given
// points of PG(1, K): returns column vectors a = lam*u, b = mu*v so that
// x maps to x*a + b and inf maps to a.
struct FrameMap {
    u32 a0, a1, b0, b1;
};

inline FrameMap frame_map(const Field& K, std::span<const u32> u, std::span<const u32> v,
                          std::span<const u32> w) {
    u32 det = K.sub(K.mul(u[0], v[1]), K.mul(v[0], u[1]));
    if (det == 0) throw argument_error("frame points are not distinct");
    u32 lam = K.div(K.sub(K.mul(w[0], v[1]), K.mul(v[0], w[1])), det);
    u32 mu = K.div(K.sub(K.mul(u[0], w[1]), K.mul(w[0], u[1])), det);
    if (lam == 0 || mu == 0) throw argument_error("frame points are not distinct");
    return {K.mul(lam, u[0]), K.mul(lam, u[1]), K.mul(mu, v[0]), K.mul(mu, v[1])};
}

// The image of {(x:1) : x in subfield} plus (1:0) under the frame map:
// the unique copy of PG(1, subfield) through the three points.
inline void closure_points(const ProjSpace& line, const FrameMap& fm,
                           std::span<const u32> subfield, std::vector<u64>& out) {
    const Field& K = line.field();
    out.clear();
    u32 v[2];
    for (u32 x : subfield) {
        v[0] = K.add(K.mul(x, fm.a0), fm.b0);
        v[1] = K.add(K.mul(x, fm.a1), fm.b1);
        out.push_back(line.index_of_inplace({v, 2}));
    }
    v[0] = fm.a0;
    v[1] = fm.a1;
    out.push_back(line.index_of_inplace({v, 2}));
    std::sort(out.begin(), out.end());
}

// All copies of PG(1, subfield) in PG(1, K), generated by 3-point closure:
// a closure is emitted when the visiting triple is its lexicographically
// least triple, so the stream is duplicate-free, complete, and ordered.
inline std::vector<PointSet> enumerate_subfield_lines(const ProjSpace& line,
                                                      const std::vector<u32>& subfield) {
    std::vector<PointSet> out;
    const u64 npts = line.size();
    std::vector<u64> closure;
    std::vector<u32> pu(2), pv(2), pw(2);
    for (u64 i = 0; i < npts; ++i) {
        line.point_at(i, pu);
        for (u64 j = i + 1; j < npts; ++j) {
            line.point_at(j, pv);
            for (u64 k = j + 1; k < npts; ++k) {
                line.point_at(k, pw);
                FrameMap fm = frame_map(line.field(), pu, pv, pw);
                closure_points(line, fm, subfield, closure);
                if (closure[0] == i && closure[1] == j && closure[2] == k) {
                    PointSet s(npts);
                    for (u64 p : closure) s.insert(p);
                    out.push_back(std::move(s));
                }
            }
        }
    }
    return out;
}

}  // namespace detail

// Subfield of fixed order inside the top field, by scanning the fixed points
// of x -> x^order (subfields of a given order are unique).
inline std::vector<u32> subfield_elements(const Field& top, u32 order) {
    std::vector<u32> out;
    out.reserve(order);
    for (u32 a = 0; a < top.size(); ++a)
        if (top.pow(a, order) == a) out.push_back(a);
    if (out.size() != order)
        throw argument_error("field has no subfield of order " + std::to_string(order));
    return out;
}

// All sublines PG(1,q) of PG(1,q^t).
inline std::vector<PointSet> enumerate_sublines(const FieldTower& tower) {
    if (tower.t() < 2) throw argument_error("subline enumeration requires t >= 2");
    ProjSpace line(tower.top_ptr(), 1);
    std::vector<u32> sub(tower.q());
    for (u32 i = 0; i < tower.q(); ++i) sub[i] = i;  // embedded GF(q)
    return detail::enumerate_subfield_lines(line, sub);
}

// All Baer sublines PG(1, q*sqrt(q)) of PG(1,q^3); q must be a square.
inline std::vector<PointSet> enumerate_baer_sublines(const FieldTower& tower) {
    if (tower.t() != 3) throw argument_error("Baer subline enumeration requires t = 3");
    u32 q = tower.q();
    u32 sq = static_cast<u32>(std::round(std::sqrt(static_cast<double>(q))));
    if (sq * sq != q) throw argument_error("q must be a square");
    u32 order = q * sq;
    ProjSpace line(tower.top_ptr(), 1);
    return detail::enumerate_subfield_lines(line, subfield_elements(tower.top(), order));
}

struct CertifyOptions {
    bool exhaustive = false;        // no node budget; failure proves nonlinearity
    u64 max_nodes = 1'000'000;      // budget in non-exhaustive mode
    std::optional<u64> anchor;      // point of B to anchor at; default: least point
};

struct CertifyResult {
    enum class Status { Found, Nonlinear, Inconclusive };
    Status status = Status::Inconclusive;
    std::optional<Subspace> witness;
    u64 nodes = 0;
};

namespace detail {

struct CertifySearch {
    const DesarguesianSpread& d;
    const PointSet& target;
    u64 budget;
    u64 nodes = 0;
    bool budget_hit = false;
    std::unordered_set<std::string> failed;  // spans proven not to extend to a witness

    std::optional<Subspace> dfs(const Subspace& w, const BitMask& wset) {
        if (++nodes > budget) {
            budget_hit = true;
            return std::nullopt;
        }
        if (wset.count() == target.size()) return w;

        // least point of the target not yet covered
        u64 missing = 0;
        for (u32 i : target.indices())
            if (!wset.test(i)) {
                missing = i;
                break;
            }

        std::vector<u64> candidates = d.element_of(missing).point_indices();
        std::vector<u32> coords(d.big_space().ncoords());
        for (u64 y : candidates) {
            d.big_space().point_at(y, coords);
            Subspace next = span_with_point(w, coords);
            std::string key = next.key();
            if (failed.contains(key)) continue;
            BitMask nset = d.linear_set_mask(next);
            if (nset.subset_of(target.mask())) {
                auto r = dfs(next, nset);
                if (r) return r;
                if (budget_hit) return std::nullopt;
            }
            failed.insert(std::move(key));
        }
        return std::nullopt;
    }
};

}  // namespace detail

// Searches for a subspace U of the big space with B(U) = B. Any witness must
// meet the element of the least point of B, so anchoring the search at every
// point of that single element is complete: if all anchors fail the set is
// proven nonlinear. Exploration order is fixed (ascending point indices), so
// the reported witness is deterministic.
inline CertifyResult certify_linear(const DesarguesianSpread& d, const PointSet& b,
                                    CertifyOptions opts = {}) {
    if (b.ambient() != d.small_space().size())
        throw argument_error("point set does not live in the spread's small space");
    CertifyResult out;
    if (b.empty()) {
        out.status = CertifyResult::Status::Found;
        out.witness = Subspace::empty(d.big_space());
        return out;
    }

    detail::CertifySearch search{d, b, opts.exhaustive ? ~u64(0) : opts.max_nodes};
    u64 anchor_small = opts.anchor.value_or(b.indices().front());
    if (!b.contains(anchor_small)) throw argument_error("anchor point must belong to B");
    std::vector<u64> anchors = d.element_of(anchor_small).point_indices();
    for (u64 x : anchors) {
        Subspace w = Subspace::point(d.big_space(), x);
        BitMask wset = d.linear_set_mask(w);
        if (!wset.subset_of(b.mask())) continue;  // cannot happen; keep the guard cheap
        auto r = search.dfs(w, wset);
        out.nodes = search.nodes;
        if (r) {
            out.status = CertifyResult::Status::Found;
            out.witness = std::move(r);
            return out;
        }
        if (search.budget_hit) {
            out.status = CertifyResult::Status::Inconclusive;
            return out;
        }
    }
    out.nodes = search.nodes;
    out.status = CertifyResult::Status::Nonlinear;
    return out;
}

}  // namespace galgeo
