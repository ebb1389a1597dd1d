#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "galgeo/bigint.hpp"
#include "galgeo/errors.hpp"
#include "galgeo/field.hpp"

namespace galgeo {

// Number of (k-1)-dimensional subspaces of PG(n-1,q). k > n yields 0 by
// convention; negative arguments are rejected.
inline BigInt gaussian_coeff(long long n, long long k, const BigInt& q) {
    if (n < 0 || k < 0) throw argument_error("gaussian_coeff: negative argument");
    if (k > n) return 0;
    BigInt r = 1;
    for (long long i = 1; i <= k; ++i) {
        BigInt num = big_pow(q, static_cast<unsigned>(n - k + i)) - 1;
        BigInt den = big_pow(q, static_cast<unsigned>(i)) - 1;
        r *= num;
        BigInt quot = r / den;
        if (quot * den != r) throw internal_error("gaussian_coeff: non-exact division");
        r = std::move(quot);
    }
    return r;
}

constexpr u64 kDefaultEnumBound = 100'000'000;  // canonical forms per enumeration

// Descriptor and point codec for PG(n, F). Canonical point vectors have their
// leftmost nonzero coordinate equal to 1; the enumeration order is
// lexicographic on canonical coordinate vectors, which groups points by pivot
// position n, n-1, ..., 0.
class ProjSpace {
public:
    ProjSpace() = default;

    ProjSpace(FieldPtr field, u32 n, u64 max_points = kDefaultEnumBound)
        : F_(std::move(field)), n_(n) {
        offsets_.assign(n_ + 2, 0);
        // offsets_[j] = number of points whose pivot position is > j.
        u64 acc = 0, power = 1;
        offsets_[n_ + 1] = 0;
        for (int j = static_cast<int>(n_); j >= 0; --j) {
            offsets_[static_cast<std::size_t>(j)] = acc;
            acc += power;
            if (acc > max_points)
                throw bound_error("projective space too large", max_points, acc);
            power *= F_->size();
        }
        npoints_ = acc;
    }

    const Field& field() const { return *F_; }
    FieldPtr field_ptr() const { return F_; }
    u32 dim() const { return n_; }
    u32 ncoords() const { return n_ + 1; }
    u64 size() const { return npoints_; }

    bool operator==(const ProjSpace& o) const { return n_ == o.n_ && F_->same_as(*o.F_); }
    bool operator!=(const ProjSpace& o) const { return !(*this == o); }

    // Scales v so its leftmost nonzero coordinate is 1; returns the pivot.
    u32 normalize(std::span<u32> v) const {
        for (u32 j = 0; j < v.size(); ++j)
            if (v[j] != 0) {
                if (v[j] != 1) {
                    u32 s = F_->inv(v[j]);
                    for (u32 c = j; c < v.size(); ++c) v[c] = F_->mul(v[c], s);
                }
                return j;
            }
        throw argument_error("zero vector does not represent a point");
    }

    u64 index_of(std::span<const u32> v) const {
        u32 buf[kMaxCoords];
        std::copy(v.begin(), v.end(), buf);
        return index_of_inplace({buf, v.size()});
    }

    // As index_of, but allowed to clobber v (skips one copy in hot loops).
    u64 index_of_inplace(std::span<u32> v) const {
        u32 j = normalize(v);
        u64 rank = 0;
        for (u32 c = j + 1; c <= n_; ++c) rank = rank * F_->size() + v[c];
        return offsets_[j] + rank;
    }

    void point_at(u64 idx, std::span<u32> out) const {
        if (idx >= npoints_) throw argument_error("point index out of range");
        u32 j = n_;
        while (j > 0 && idx >= offsets_[j - 1]) --j;
        u64 rank = idx - offsets_[j];
        for (u32 c = 0; c < j; ++c) out[c] = 0;
        out[j] = 1;
        for (u32 c = n_; c > j; --c) {
            out[c] = static_cast<u32>(rank % F_->size());
            rank /= F_->size();
        }
    }

    std::vector<u32> point(u64 idx) const {
        std::vector<u32> v(ncoords());
        point_at(idx, v);
        return v;
    }

    static constexpr u32 kMaxCoords = 32;

private:
    FieldPtr F_;
    u32 n_ = 0;
    u64 npoints_ = 0;
    std::vector<u64> offsets_;
};

struct Mat {
    u32 rows = 0, cols = 0;
    std::vector<u32> a;

    Mat() = default;
    Mat(u32 r, u32 c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0) {}

    u32& at(u32 r, u32 c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    u32 at(u32 r, u32 c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
    std::span<u32> row(u32 r) { return {a.data() + static_cast<std::size_t>(r) * cols, cols}; }
    std::span<const u32> row(u32 r) const {
        return {a.data() + static_cast<std::size_t>(r) * cols, cols};
    }

    bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

// In-place reduced row echelon form; zero rows are dropped. Returns the rank.
inline u32 rref(const Field& F, Mat& m) {
    u32 rank = 0;
    for (u32 col = 0; col < m.cols && rank < m.rows; ++col) {
        u32 pr = rank;
        while (pr < m.rows && m.at(pr, col) == 0) ++pr;
        if (pr == m.rows) continue;
        if (pr != rank)
            for (u32 c = 0; c < m.cols; ++c) std::swap(m.at(pr, c), m.at(rank, c));
        u32 piv = m.at(rank, col);
        if (piv != 1) {
            u32 s = F.inv(piv);
            for (u32 c = col; c < m.cols; ++c) m.at(rank, c) = F.mul(m.at(rank, c), s);
        }
        for (u32 r = 0; r < m.rows; ++r) {
            if (r == rank) continue;
            u32 f = m.at(r, col);
            if (f == 0) continue;
            for (u32 c = col; c < m.cols; ++c)
                m.at(r, c) = F.sub(m.at(r, c), F.mul(f, m.at(rank, c)));
        }
        ++rank;
    }
    m.rows = rank;
    m.a.resize(static_cast<std::size_t>(rank) * m.cols);
    return rank;
}

inline std::vector<u32> pivot_columns(const Mat& m) {
    std::vector<u32> piv;
    piv.reserve(m.rows);
    for (u32 r = 0; r < m.rows; ++r) {
        u32 c = 0;
        while (c < m.cols && m.at(r, c) == 0) ++c;
        piv.push_back(c);
    }
    return piv;
}

// Basis of the annihilator {x : M x = 0} of an RREF matrix.
inline Mat annihilator(const Field& F, const Mat& m) {
    std::vector<u32> piv = pivot_columns(m);
    std::vector<bool> is_piv(m.cols, false);
    for (u32 c : piv) is_piv[c] = true;
    Mat out(m.cols - m.rows, m.cols);
    u32 r = 0;
    for (u32 f = 0; f < m.cols; ++f) {
        if (is_piv[f]) continue;
        out.at(r, f) = 1;
        for (u32 i = 0; i < m.rows; ++i) out.at(r, piv[i]) = F.neg(m.at(i, f));
        ++r;
    }
    return out;
}

// Enumerates the canonical representatives of the projective classes in the
// row space of an RREF matrix (each exactly once). The representative built
// from a canonical coefficient vector is itself canonical because the rows
// lead with 1 at increasing pivot columns.
template <typename Fn>
void for_each_point_vector(const Field& F, const Mat& m, Fn&& fn) {
    const u32 r = m.rows, cols = m.cols;
    if (r == 0) return;
    u32 v[ProjSpace::kMaxCoords];
    u32 coeff[ProjSpace::kMaxCoords];
    const u32 N = F.size();
    for (u32 lead = r; lead-- > 0;) {
        u32 free = r - lead - 1;
        for (u32 i = 0; i < free; ++i) coeff[i] = 0;
        while (true) {
            for (u32 c = 0; c < cols; ++c) v[c] = m.at(lead, c);
            for (u32 i = 0; i < free; ++i) {
                u32 x = coeff[i];
                if (x == 0) continue;
                const u32 row = lead + 1 + i;
                for (u32 c = 0; c < cols; ++c) v[c] = F.add(v[c], F.mul(x, m.at(row, c)));
            }
            fn(std::span<const u32>(v, cols));
            u32 i = free;
            while (i > 0) {
                --i;
                if (++coeff[i] < N) break;
                coeff[i] = 0;
                if (i == 0) {
                    i = free + 1;
                    break;
                }
            }
            if (free == 0 || i == free + 1) break;
        }
    }
}

class Subspace {
public:
    Subspace() = default;

    // Canonicalizes arbitrary spanning rows.
    Subspace(ProjSpace sp, Mat rows) : sp_(std::move(sp)), b_(std::move(rows)) {
        if (b_.cols != sp_.ncoords()) throw argument_error("row length does not match the space");
        rref(sp_.field(), b_);
    }

    static Subspace empty(ProjSpace sp) {
        Subspace s;
        s.sp_ = std::move(sp);
        s.b_ = Mat(0, s.sp_.ncoords());
        return s;
    }

    static Subspace whole(ProjSpace sp) {
        Mat m(sp.ncoords(), sp.ncoords());
        for (u32 i = 0; i < sp.ncoords(); ++i) m.at(i, i) = 1;
        return from_rref(std::move(sp), std::move(m));
    }

    static Subspace point(ProjSpace sp, u64 index) {
        Mat m(1, sp.ncoords());
        sp.point_at(index, m.row(0));
        return from_rref(std::move(sp), std::move(m));
    }

    static Subspace point(ProjSpace sp, std::span<const u32> coords) {
        Mat m(1, sp.ncoords());
        std::copy(coords.begin(), coords.end(), m.row(0).begin());
        sp.normalize(m.row(0));
        return from_rref(std::move(sp), std::move(m));
    }

    // Trusts that `rows` is already in reduced row echelon form.
    static Subspace from_rref(ProjSpace sp, Mat rows) {
        Subspace s;
        s.sp_ = std::move(sp);
        s.b_ = std::move(rows);
        return s;
    }

    const ProjSpace& space() const { return sp_; }
    const Mat& basis() const { return b_; }
    u32 rank() const { return b_.rows; }
    int dim() const { return static_cast<int>(b_.rows) - 1; }

    u64 num_points() const {
        u64 acc = 0, power = 1;
        for (u32 i = 0; i < b_.rows; ++i) {
            acc += power;
            power *= sp_.field().size();
        }
        return acc;
    }

    bool contains(std::span<const u32> pt) const {
        u32 v[ProjSpace::kMaxCoords];
        std::copy(pt.begin(), pt.end(), v);
        const Field& F = sp_.field();
        std::vector<u32> piv = pivot_columns(b_);
        for (u32 i = 0; i < b_.rows; ++i) {
            u32 f = v[piv[i]];
            if (f == 0) continue;
            for (u32 c = piv[i]; c < b_.cols; ++c) v[c] = F.sub(v[c], F.mul(f, b_.at(i, c)));
        }
        for (u32 c = 0; c < b_.cols; ++c)
            if (v[c] != 0) return false;
        return true;
    }

    bool contains_index(u64 idx) const {
        u32 v[ProjSpace::kMaxCoords];
        sp_.point_at(idx, {v, sp_.ncoords()});
        return contains({v, sp_.ncoords()});
    }

    bool contains_sub(const Subspace& o) const {
        for (u32 r = 0; r < o.b_.rows; ++r)
            if (!contains(o.b_.row(r))) return false;
        return true;
    }

    template <typename Fn>
    void for_each_point_index(Fn&& fn) const {
        for_each_point_vector(sp_.field(), b_, [&](std::span<const u32> v) {
            u32 buf[ProjSpace::kMaxCoords];
            std::copy(v.begin(), v.end(), buf);
            fn(sp_.index_of_inplace({buf, v.size()}));
        });
    }

    std::vector<u64> point_indices() const {
        std::vector<u64> out;
        out.reserve(num_points());
        for_each_point_index([&](u64 i) { out.push_back(i); });
        std::sort(out.begin(), out.end());
        return out;
    }

    // Byte key identifying the subspace within its space; exact, no hashing.
    std::string key() const {
        std::string k;
        k.reserve(b_.a.size() * 4 + 8);
        k.push_back(static_cast<char>(b_.rows));
        for (u32 x : b_.a) {
            k.push_back(static_cast<char>(x & 0xff));
            k.push_back(static_cast<char>((x >> 8) & 0xff));
            k.push_back(static_cast<char>((x >> 16) & 0xff));
        }
        return k;
    }

    bool operator==(const Subspace& o) const { return sp_ == o.sp_ && b_ == o.b_; }

private:
    ProjSpace sp_;
    Mat b_;
};

inline void check_same_space(const ProjSpace& a, const ProjSpace& b) {
    if (a != b) throw argument_error("objects live in different ambient spaces");
}

inline Subspace span_of(const Subspace& a, const Subspace& b) {
    check_same_space(a.space(), b.space());
    Mat m(a.rank() + b.rank(), a.space().ncoords());
    for (u32 r = 0; r < a.rank(); ++r)
        std::copy(a.basis().row(r).begin(), a.basis().row(r).end(), m.row(r).begin());
    for (u32 r = 0; r < b.rank(); ++r)
        std::copy(b.basis().row(r).begin(), b.basis().row(r).end(),
                  m.row(a.rank() + r).begin());
    return Subspace(a.space(), std::move(m));
}

inline Subspace span_with_point(const Subspace& a, std::span<const u32> pt) {
    Mat m(a.rank() + 1, a.space().ncoords());
    for (u32 r = 0; r < a.rank(); ++r)
        std::copy(a.basis().row(r).begin(), a.basis().row(r).end(), m.row(r).begin());
    std::copy(pt.begin(), pt.end(), m.row(a.rank()).begin());
    return Subspace(a.space(), std::move(m));
}

inline Subspace meet(const Subspace& a, const Subspace& b) {
    check_same_space(a.space(), b.space());
    const Field& F = a.space().field();
    if (a.rank() == 0 || b.rank() == 0) return Subspace::empty(a.space());
    Mat na = annihilator(F, a.basis());
    Mat nb = annihilator(F, b.basis());
    Mat stacked(na.rows + nb.rows, na.cols);
    std::copy(na.a.begin(), na.a.end(), stacked.a.begin());
    std::copy(nb.a.begin(), nb.a.end(), stacked.a.begin() + na.a.size());
    rref(F, stacked);
    if (stacked.rows == stacked.cols) return Subspace::empty(a.space());
    Mat inter = annihilator(F, stacked);
    return Subspace(a.space(), std::move(inter));
}

// Deterministic, random-access enumeration of the d-dimensional subspaces of
// a projective space. Order: pivot-column patterns in lexicographic order,
// then lexicographic on the free entries read in row-major order.
class SubspaceEnumerator {
public:
    SubspaceEnumerator(ProjSpace sp, u32 d) : sp_(std::move(sp)), d_(d) {
        r_ = d + 1;
        m_ = sp_.ncoords();
        if (r_ > m_) throw argument_error("subspace dimension exceeds the space");
        N_ = sp_.field().size();

        std::vector<u32> piv(r_);
        for (u32 i = 0; i < r_; ++i) piv[i] = i;
        while (true) {
            patterns_.push_back(piv);
            std::vector<u32> fp;
            std::vector<bool> is_piv(m_, false);
            for (u32 c : piv) is_piv[c] = true;
            for (u32 i = 0; i < r_; ++i)
                for (u32 c = piv[i] + 1; c < m_; ++c)
                    if (!is_piv[c]) fp.push_back(i * m_ + c);
            u64 cells = 1;
            for (std::size_t j = 0; j < fp.size(); ++j) {
                if (cells > (u64(1) << 62) / N_)
                    throw bound_error("subspace family too large to index", u64(1) << 62,
                                      u64(0) - 1);
                cells *= N_;
            }
            freepos_.push_back(std::move(fp));
            cum_.push_back(total_);
            total_ += cells;

            // next r-combination of {0..m-1} in lexicographic order
            int i = static_cast<int>(r_) - 1;
            while (i >= 0 && piv[static_cast<std::size_t>(i)] ==
                                 m_ - r_ + static_cast<u32>(i))
                --i;
            if (i < 0) break;
            ++piv[static_cast<std::size_t>(i)];
            for (u32 j = static_cast<u32>(i) + 1; j < r_; ++j)
                piv[j] = piv[j - 1] + 1;
        }
        cum_.push_back(total_);
    }

    const ProjSpace& space() const { return sp_; }
    u32 subspace_dim() const { return d_; }
    u64 size() const { return total_; }

    Mat matrix_at(u64 idx) const {
        if (idx >= total_) throw argument_error("subspace index out of range");
        std::size_t k = static_cast<std::size_t>(
            std::upper_bound(cum_.begin(), cum_.end(), idx) - cum_.begin() - 1);
        Mat m = pattern_matrix(k);
        u64 rem = idx - cum_[k];
        const auto& fp = freepos_[k];
        for (std::size_t j = fp.size(); j-- > 0;) {
            m.a[fp[j]] = static_cast<u32>(rem % N_);
            rem /= N_;
        }
        return m;
    }

    Subspace at(u64 idx) const { return Subspace::from_rref(sp_, matrix_at(idx)); }

    // fn(const Mat&, u64 index); the matrix is in RREF by construction.
    template <typename Fn>
    void for_each_range(u64 begin, u64 end, Fn&& fn) const {
        if (begin >= end) return;
        std::size_t k = static_cast<std::size_t>(
            std::upper_bound(cum_.begin(), cum_.end(), begin) - cum_.begin() - 1);
        Mat m = pattern_matrix(k);
        std::vector<u32> digit(freepos_[k].size(), 0);
        {
            u64 rem = begin - cum_[k];
            const auto& fp = freepos_[k];
            for (std::size_t j = fp.size(); j-- > 0;) {
                digit[j] = static_cast<u32>(rem % N_);
                m.a[fp[j]] = digit[j];
                rem /= N_;
            }
        }
        for (u64 idx = begin; idx < end; ++idx) {
            fn(static_cast<const Mat&>(m), idx);
            if (idx + 1 == end) break;
            const auto& fp = freepos_[k];
            std::size_t j = fp.size();
            bool carried_out = true;
            while (j > 0) {
                --j;
                if (++digit[j] < N_) {
                    m.a[fp[j]] = digit[j];
                    carried_out = false;
                    break;
                }
                digit[j] = 0;
                m.a[fp[j]] = 0;
            }
            if (carried_out || fp.empty()) {
                ++k;
                m = pattern_matrix(k);
                digit.assign(freepos_[k].size(), 0);
            }
        }
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for_each_range(0, total_, std::forward<Fn>(fn));
    }

private:
    Mat pattern_matrix(std::size_t k) const {
        Mat m(r_, m_);
        for (u32 i = 0; i < r_; ++i) m.at(i, patterns_[k][i]) = 1;
        return m;
    }

    ProjSpace sp_;
    u32 d_ = 0, r_ = 0, m_ = 0, N_ = 0;
    std::vector<std::vector<u32>> patterns_;
    std::vector<std::vector<u32>> freepos_;
    std::vector<u64> cum_;
    u64 total_ = 0;
};

inline u64 count_through(const Subspace& s, u32 d) {
    long long mr = static_cast<long long>(s.space().ncoords()) - s.rank();
    long long w = static_cast<long long>(d) + 1 - s.rank();
    BigInt c = gaussian_coeff(mr, w, s.space().field().size());
    return static_cast<u64>(c);
}

// Visits every d-dimensional subspace containing `s` exactly once, via the
// section of the quotient spanned by the non-pivot coordinate directions.
template <typename Fn>
void for_each_through(const Subspace& s, u32 d, Fn&& fn) {
    const ProjSpace& sp = s.space();
    const u32 m = sp.ncoords(), r = s.rank();
    if (d + 1 <= r) throw argument_error("target dimension must exceed dim of the base subspace");
    const u32 w = d + 1 - r;
    if (d + 1 > m) throw argument_error("target dimension exceeds the space");

    std::vector<u32> piv = pivot_columns(s.basis());
    std::vector<bool> is_piv(m, false);
    for (u32 c : piv) is_piv[c] = true;
    std::vector<u32> comp;
    for (u32 c = 0; c < m; ++c)
        if (!is_piv[c]) comp.push_back(c);

    ProjSpace quot(sp.field_ptr(), static_cast<u32>(comp.size()) - 1);
    SubspaceEnumerator en(quot, w - 1);
    const Field& F = sp.field();
    en.for_each([&](const Mat& wm, u64) {
        Mat stacked(r + w, m);
        for (u32 i = 0; i < r; ++i)
            std::copy(s.basis().row(i).begin(), s.basis().row(i).end(), stacked.row(i).begin());
        for (u32 i = 0; i < w; ++i)
            for (u32 j = 0; j < comp.size(); ++j)
                stacked.at(r + i, comp[j]) = wm.at(i, j);
        rref(F, stacked);
        fn(Subspace::from_rref(sp, std::move(stacked)));
    });
}

// Visits every d-dimensional subspace contained in `s` exactly once.
template <typename Fn>
void for_each_within(const Subspace& s, u32 d, Fn&& fn) {
    const u32 r = s.rank();
    if (d + 1 > r) throw argument_error("target dimension exceeds dim of the subspace");
    const ProjSpace& sp = s.space();
    const Field& F = sp.field();
    ProjSpace inner(sp.field_ptr(), r - 1);
    SubspaceEnumerator en(inner, d);
    en.for_each([&](const Mat& cm, u64) {
        Mat rows(d + 1, sp.ncoords());
        for (u32 i = 0; i <= d; ++i)
            for (u32 j = 0; j < r; ++j) {
                u32 c = cm.at(i, j);
                if (c == 0) continue;
                for (u32 col = 0; col < sp.ncoords(); ++col)
                    rows.at(i, col) = F.add(rows.at(i, col), F.mul(c, s.basis().at(j, col)));
            }
        rref(F, rows);
        fn(Subspace::from_rref(sp, std::move(rows)));
    });
}

inline std::vector<Subspace> subspaces_through(const Subspace& s, u32 d,
                                               u64 bound = kDefaultEnumBound) {
    u64 n = count_through(s, d);
    if (n > bound) throw bound_error("too many subspaces to materialize", bound, n);
    std::vector<Subspace> out;
    out.reserve(n);
    for_each_through(s, d, [&](Subspace&& t) { out.push_back(std::move(t)); });
    return out;
}

inline bool incident(const ProjSpace& sp, u64 point_index, const Subspace& s) {
    check_same_space(sp, s.space());
    return s.contains_index(point_index);
}

}  // namespace galgeo
