#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "galgeo/errors.hpp"
#include "galgeo/projective.hpp"

namespace galgeo {

// Word-packed membership mask used in scan inner loops.
struct BitMask {
    u64 nbits = 0;
    std::vector<u64> w;

    BitMask() = default;
    explicit BitMask(u64 n) : nbits(n), w((n + 63) / 64, 0) {}

    void set(u64 i) { w[i >> 6] |= u64(1) << (i & 63); }
    bool test(u64 i) const { return (w[i >> 6] >> (i & 63)) & 1; }
    void clear() { std::fill(w.begin(), w.end(), 0); }

    u64 count() const {
        u64 c = 0;
        for (u64 x : w) c += static_cast<u64>(std::popcount(x));
        return c;
    }

    u64 count_and(const BitMask& o) const {
        u64 c = 0;
        for (std::size_t i = 0; i < w.size(); ++i)
            c += static_cast<u64>(std::popcount(w[i] & o.w[i]));
        return c;
    }

    // True when every set bit of *this is also set in o.
    bool subset_of(const BitMask& o) const {
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i] & ~o.w[i]) return false;
        return true;
    }

    bool operator==(const BitMask& o) const { return nbits == o.nbits && w == o.w; }
};

// A set of points of a fixed projective space, stored as sorted indices with
// respect to the space's canonical enumeration, plus a bit mask.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(u64 ambient) : ambient_(ambient), mask_(ambient) {}

    static PointSet of(u64 ambient, std::vector<u64> indices) {
        PointSet s(ambient);
        for (u64 i : indices) s.insert(i);
        return s;
    }

    u64 ambient() const { return ambient_; }
    u64 size() const { return idx_.size(); }
    bool empty() const { return idx_.empty(); }

    void insert(u64 i) {
        if (i >= ambient_) throw argument_error("point index out of range");
        if (mask_.test(i)) return;
        mask_.set(i);
        idx_.insert(std::lower_bound(idx_.begin(), idx_.end(), static_cast<u32>(i)),
                    static_cast<u32>(i));
    }

    bool contains(u64 i) const { return i < ambient_ && mask_.test(i); }

    const std::vector<u32>& indices() const { return idx_; }
    const BitMask& mask() const { return mask_; }

    PointSet set_minus(const PointSet& o) const {
        PointSet r(ambient_);
        for (u32 i : idx_)
            if (!o.contains(i)) r.insert(i);
        return r;
    }

    PointSet set_union(const PointSet& o) const {
        PointSet r = *this;
        for (u32 i : o.idx_) r.insert(i);
        return r;
    }

    PointSet set_intersect(const PointSet& o) const {
        PointSet r(ambient_);
        for (u32 i : idx_)
            if (o.contains(i)) r.insert(i);
        return r;
    }

    u64 intersection_size(const PointSet& o) const { return mask_.count_and(o.mask_); }
    bool subset_of(const PointSet& o) const { return mask_.subset_of(o.mask_); }

    bool operator==(const PointSet& o) const { return ambient_ == o.ambient_ && idx_ == o.idx_; }

private:
    u64 ambient_ = 0;
    std::vector<u32> idx_;
    BitMask mask_;
};

// Number of points of the row space (an RREF matrix) that lie in `mask`.
inline u64 count_rowspace_points_in(const ProjSpace& sp, const Mat& m, const BitMask& mask) {
    u64 count = 0;
    for_each_point_vector(sp.field(), m, [&](std::span<const u32> v) {
        u32 buf[ProjSpace::kMaxCoords];
        std::copy(v.begin(), v.end(), buf);
        if (mask.test(sp.index_of_inplace({buf, v.size()}))) ++count;
    });
    return count;
}

inline PointSet points_of(const Subspace& s) {
    PointSet out(s.space().size());
    s.for_each_point_index([&](u64 i) { out.insert(i); });
    return out;
}

}  // namespace galgeo
