#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "galgeo/bigint.hpp"
#include "galgeo/blocking.hpp"
#include "galgeo/errors.hpp"
#include "galgeo/parallel.hpp"
#include "galgeo/pointset.hpp"
#include "galgeo/projective.hpp"
#include "galgeo/reduction.hpp"
#include "galgeo/rng.hpp"

namespace galgeo {

// ---------------------------------------------------------------------------
// Moment identities over the (n-k)-spaces of an (n-k+s)-space pi:
//   sum x_i              = [d+s+1, d+1]_Q
//   sum i x_i            = |B_pi| [d+s, d]_Q
//   sum i(i-1) x_i       = |B_pi|(|B_pi|-1) [d+s-1, d-1]_Q
// with d = n-k and Q the ambient order. These are unconditional double
// counts; a violation indicates an implementation bug, never a property of B.
// ---------------------------------------------------------------------------
struct MomentCheck {
    u32 d = 0;       // n - k
    u32 s = 0;       // dim(pi) - (n-k)
    u32 q = 0;       // subfield parameter used by the weighted sum
    u64 b_pi = 0;    // |B ∩ pi|
    std::map<u64, u64> xs;
    BigInt sum0, sum1, sum2;
    BigInt expected0, expected1, expected2;
    BigInt weighted;         // sum (i-1)(i-1-q) x_i
    bool identities_ok = false;
    bool one_mod_q = false;  // every (n-k)-space of pi meets B_pi in 1 mod q points
};

inline MomentCheck moment_counts(const PointSet& b, const Subspace& pi,
                                 const BlockingContext& ctx) {
    check_ambient(b, ctx);
    check_same_space(pi.space(), ctx.space);
    const u32 d = ctx.cover_dim();
    int s_signed = pi.dim() - static_cast<int>(d);
    if (s_signed < 0 || static_cast<u32>(s_signed) > ctx.k)
        throw argument_error("pi must be an (n-k+s)-space with 0 <= s <= k");

    MomentCheck mc;
    mc.d = d;
    mc.s = static_cast<u32>(s_signed);
    mc.q = ctx.q();
    mc.b_pi = count_rowspace_points_in(ctx.space, pi.basis(), b.mask());

    auto tally = [&](const Mat& m) {
        ++mc.xs[count_rowspace_points_in(ctx.space, m, b.mask())];
    };
    if (pi.rank() == ctx.space.ncoords()) {
        SubspaceEnumerator en(ctx.space, d);
        en.for_each([&](const Mat& m, u64) { tally(m); });
    } else {
        for_each_within(pi, d, [&](Subspace&& sub) { tally(sub.basis()); });
    }

    mc.one_mod_q = true;
    for (auto [i, cnt] : mc.xs) {
        BigInt bi(i), bc(cnt);
        mc.sum0 += bc;
        mc.sum1 += bi * bc;
        mc.sum2 += bi * (bi - 1) * bc;
        mc.weighted += (bi - 1) * (bi - 1 - mc.q) * bc;
        if (i % mc.q != 1) mc.one_mod_q = false;
    }

    const BigInt Q(ctx.ambient_order());
    mc.expected0 = gaussian_coeff(d + mc.s + 1, d + 1, Q);
    mc.expected1 = BigInt(mc.b_pi) * gaussian_coeff(d + mc.s, d, Q);
    mc.expected2 = d == 0 ? BigInt(0)
                          : BigInt(mc.b_pi) * (BigInt(mc.b_pi) - 1) *
                                gaussian_coeff(d + mc.s - 1, d - 1, Q);
    mc.identities_ok =
        mc.sum0 == mc.expected0 && mc.sum1 == mc.expected1 && mc.sum2 == mc.expected2;
    return mc;
}

// ---------------------------------------------------------------------------
// The quadratic expression obtained from the three moments under the
// 1 (mod q) hypothesis, cleared of denominators:
//   E(x) = x(x-1)(Q^m - 1)(Q^{m+1} - 1)
//        - (q+1) x (Q^{m+s} - 1)(Q^{m+1} - 1)
//        + (q+1)  (Q^{m+s+1} - 1)(Q^{m+s} - 1)
// with Q = q^3 and m = n-k. The hypothesis forces E(|B ∩ pi|) >= 0, and
// evaluating E at the two boundary sizes yields a strictly negative value for
// q >= 7 -- the gap that the classification rests on.
// ---------------------------------------------------------------------------
inline BigInt gap_expression(u32 nk, u32 s, u32 q, const BigInt& x) {
    if (nk < 1) throw argument_error("gap expression needs n-k >= 1");
    auto Qp = [&](u32 m) { return big_pow(BigInt(q), 3 * m) - 1; };
    return x * (x - 1) * Qp(nk) * Qp(nk + 1) - (q + 1) * x * Qp(nk + s) * Qp(nk + 1) +
           BigInt(q + 1) * Qp(nk + s + 1) * Qp(nk + s);
}

enum class Boundary { Lower, Upper };

struct GapEvaluation {
    u32 n = 0, k = 0, s = 0, q = 0;
    Boundary boundary = Boundary::Lower;
    BigInt size;   // the boundary value substituted for |B ∩ pi|
    BigInt value;  // E(size)
    int sign = 0;
};

inline GapEvaluation gap_evaluate(u32 n, u32 k, u32 s, u32 q, Boundary boundary) {
    if (s < 1 || s > k || k > n || n - k < 1)
        throw argument_error("gap evaluation needs 1 <= s <= k <= n and n-k >= 1");
    GapEvaluation ge;
    ge.n = n;
    ge.k = k;
    ge.s = s;
    ge.q = q;
    ge.boundary = boundary;
    ge.size = boundary == Boundary::Lower ? small_space_threshold(q, s)
                                          : large_space_threshold(q, s);
    ge.value = gap_expression(n - k, s, q, ge.size);
    ge.sign = ge.value == 0 ? 0 : (ge.value < 0 ? -1 : 1);
    return ge;
}

// ---------------------------------------------------------------------------
// Exhaustive scan: intersection sizes of every subline with every
// plane-induced linear set of PG(1, q^3). Histogram masses are pair counts
// (plane, subline); planes inducing equal sets are grouped with multiplicity.
// ---------------------------------------------------------------------------
struct SublineScanOptions {
    std::optional<u64> sample_planes;  // seeded sample instead of the full scan
    u64 seed = 0;
    int jobs = 1;
};

struct SublineScanReport {
    u32 q = 0;
    u64 subline_count = 0;
    u64 planes_scanned = 0;
    bool exhaustive = true;
    std::map<u64, u64> histogram;
};

namespace detail {

struct MaskKey {
    u64 lo = 0, hi = 0;
    bool operator==(const MaskKey&) const = default;
};

struct MaskKeyHash {
    std::size_t operator()(const MaskKey& k) const {
        return splitmix64(k.lo ^ splitmix64(k.hi));
    }
};

// words-per-mask flattened views of a family of point sets
struct MaskFamily {
    u64 count = 0;
    u32 words = 0;
    std::vector<u64> flat;

    explicit MaskFamily(const std::vector<PointSet>& sets) {
        count = sets.size();
        if (count == 0) return;
        words = static_cast<u32>(sets.front().mask().w.size());
        flat.reserve(count * words);
        for (const auto& s : sets)
            flat.insert(flat.end(), s.mask().w.begin(), s.mask().w.end());
    }

    const u64* row(u64 i) const { return flat.data() + i * words; }
};

}  // namespace detail

inline SublineScanReport scan_subline_linear_sets(const FieldTower& tower,
                                                  const SublineScanOptions& opts = {}) {
    if (tower.t() != 3) throw argument_error("subline scan is defined on PG(1,q^3)");
    SublineScanReport rep;
    rep.q = tower.q();

    DesarguesianSpread d = field_reduce(tower, 1);
    std::vector<PointSet> sublines = enumerate_sublines(tower);
    detail::MaskFamily fam(sublines);
    rep.subline_count = sublines.size();

    const u32 W = fam.words;
    const ProjSpace& big = d.big_space();
    SubspaceEnumerator planes(big, 2);

    using Hist = std::map<u64, u64>;
    auto scan_plane_mask = [&](Hist& h, const u64* pw, u64 mult) {
        for (u64 sidx = 0; sidx < fam.count; ++sidx) {
            const u64* sw = fam.row(sidx);
            u64 c = 0;
            for (u32 w = 0; w < W; ++w) c += static_cast<u64>(std::popcount(pw[w] & sw[w]));
            h[c] += mult;
        }
    };

    auto plane_words = [&](const Mat& m, u64* out) {
        for (u32 w = 0; w < W; ++w) out[w] = 0;
        for_each_point_vector(big.field(), m, [&](std::span<const u32> v) {
            u32 buf[ProjSpace::kMaxCoords];
            std::copy(v.begin(), v.end(), buf);
            u64 e = d.element_of_big_point(big.index_of_inplace({buf, v.size()}));
            out[e >> 6] |= u64(1) << (e & 63);
        });
    };

    if (!opts.sample_planes) {
        rep.exhaustive = true;
        rep.planes_scanned = planes.size();
        Hist total = parallel_reduce(
            planes.size(), opts.jobs, Hist{},
            [&](Hist& h, u64 lo, u64 hi) {
                if (W <= 2) {
                    // group equal plane sets first; the pair scan then runs
                    // once per distinct set with a multiplicity weight
                    std::unordered_map<detail::MaskKey, u64, detail::MaskKeyHash> groups;
                    u64 pw[2] = {0, 0};
                    planes.for_each_range(lo, hi, [&](const Mat& m, u64) {
                        pw[1] = 0;
                        plane_words(m, pw);
                        ++groups[detail::MaskKey{pw[0], pw[1]}];
                    });
                    for (const auto& [key, mult] : groups) {
                        u64 kw[2] = {key.lo, key.hi};
                        scan_plane_mask(h, kw, mult);
                    }
                } else {
                    std::vector<u64> pw(W);
                    planes.for_each_range(lo, hi, [&](const Mat& m, u64) {
                        plane_words(m, pw.data());
                        scan_plane_mask(h, pw.data(), 1);
                    });
                }
            },
            [](Hist& acc, Hist&& h) {
                for (auto [k, v] : h) acc[k] += v;
            });
        rep.histogram = std::move(total);
    } else {
        rep.exhaustive = false;
        rep.planes_scanned = *opts.sample_planes;
        CounterRng rng(opts.seed, "subline-scan-planes");
        Hist h;
        std::vector<u64> pw(W);
        for (u64 i = 0; i < *opts.sample_planes; ++i) {
            Mat m = planes.matrix_at(rng.below(planes.size(), i));
            plane_words(m, pw.data());
            scan_plane_mask(h, pw.data(), 1);
        }
        rep.histogram = std::move(h);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Exhaustive scan of the two Baer-subline intersection maxima in PG(1,q^3),
// q a square: against sublines, and against plane-induced linear sets of the
// two proper sizes q^2+1 and q^2+q+1.
// ---------------------------------------------------------------------------
struct BaerScanReport {
    u32 q = 0;
    u64 baer_count = 0;
    u64 subline_count = 0;
    u64 planes_scanned = 0;
    u64 linear_sets_tested = 0;  // planes inducing sets of size q^2+1 or q^2+q+1
    u64 max_subline_baer = 0;
    u64 max_baer_linear = 0;
    std::map<u64, u64> hist_subline_baer;
    std::map<u64, u64> hist_baer_linear;
};

inline BaerScanReport scan_baer_intersections(const FieldTower& tower, int jobs = 1) {
    BaerScanReport rep;
    rep.q = tower.q();

    std::vector<PointSet> baer = enumerate_baer_sublines(tower);
    std::vector<PointSet> sublines = enumerate_sublines(tower);
    rep.baer_count = baer.size();
    rep.subline_count = sublines.size();

    detail::MaskFamily bf(baer);
    const u32 W = bf.words;

    for (const PointSet& s : sublines)
        for (u64 i = 0; i < bf.count; ++i) {
            const u64* bw = bf.row(i);
            u64 c = 0;
            for (u32 w = 0; w < W; ++w)
                c += static_cast<u64>(std::popcount(s.mask().w[w] & bw[w]));
            ++rep.hist_subline_baer[c];
            rep.max_subline_baer = std::max(rep.max_subline_baer, c);
        }

    DesarguesianSpread d = field_reduce(tower, 1);
    const ProjSpace& big = d.big_space();
    SubspaceEnumerator planes(big, 2);
    rep.planes_scanned = planes.size();
    const u64 size_a = static_cast<u64>(rep.q) * rep.q + 1;
    const u64 size_b = size_a + rep.q;

    struct Chunk {
        std::map<u64, u64> hist;
        u64 tested = 0;
    };
    Chunk total = parallel_reduce(
        planes.size(), jobs, Chunk{},
        [&](Chunk& c, u64 lo, u64 hi) {
            std::vector<u64> pw(W);
            planes.for_each_range(lo, hi, [&](const Mat& m, u64) {
                std::fill(pw.begin(), pw.end(), 0);
                for_each_point_vector(big.field(), m, [&](std::span<const u32> v) {
                    u32 buf[ProjSpace::kMaxCoords];
                    std::copy(v.begin(), v.end(), buf);
                    u64 e = d.element_of_big_point(big.index_of_inplace({buf, v.size()}));
                    pw[e >> 6] |= u64(1) << (e & 63);
                });
                u64 sz = 0;
                for (u32 w = 0; w < W; ++w) sz += static_cast<u64>(std::popcount(pw[w]));
                if (sz != size_a && sz != size_b) return;
                ++c.tested;
                for (u64 i = 0; i < bf.count; ++i) {
                    const u64* bw = bf.row(i);
                    u64 cnt = 0;
                    for (u32 w = 0; w < W; ++w)
                        cnt += static_cast<u64>(std::popcount(pw[w] & bw[w]));
                    ++c.hist[cnt];
                }
            });
        },
        [](Chunk& acc, Chunk&& c) {
            acc.tested += c.tested;
            for (auto [k, v] : c.hist) acc.hist[k] += v;
        });
    rep.linear_sets_tested = total.tested;
    rep.hist_baer_linear = std::move(total.hist);
    for (auto [sz, cnt] : rep.hist_baer_linear) rep.max_baer_linear = std::max(rep.max_baer_linear, sz);
    return rep;
}

// ---------------------------------------------------------------------------
// Constructions of linear k-blocking sets B(U), dim U = tk.
// ---------------------------------------------------------------------------
enum class LinearSource { CanonicalSubgeometry, SeededRandomSubspace, SpannedSpreadElements };

struct ConstructedBlocking {
    PointSet set;
    Subspace witness;
};

inline ConstructedBlocking construct_linear_blocking(const DesarguesianSpread& d, u32 k,
                                                     LinearSource src, u64 seed = 0) {
    const u32 n = d.n(), t = d.tower().t();
    if (k == 0 || k > n) throw argument_error("need 1 <= k <= n");
    const u32 rank = t * k + 1;
    const ProjSpace& big = d.big_space();

    Subspace u;
    switch (src) {
        case LinearSource::CanonicalSubgeometry: {
            // basis rows w^j e_i taken in j-major order: the subgeometry frame
            // extended by omega-multiples of the leading coordinates
            Mat m(rank, big.ncoords());
            for (u32 r = 0; r < rank; ++r) {
                u32 j = r / (n + 1), i = r % (n + 1);
                m.at(r, i * t + j) = 1;
            }
            u = Subspace(big, std::move(m));
            break;
        }
        case LinearSource::SeededRandomSubspace: {
            CounterRng rng(seed, "construct-linear");
            for (u64 attempt = 0;; ++attempt) {
                Mat m(rank, big.ncoords());
                for (u32 i = 0; i < rank; ++i)
                    for (u32 j = 0; j < big.ncoords(); ++j)
                        m.at(i, j) = static_cast<u32>(rng.below(
                            big.field().size(), attempt * 8192 + i * big.ncoords() + j));
                Subspace cand(big, std::move(m));
                if (cand.rank() == rank) {
                    u = std::move(cand);
                    break;
                }
            }
            break;
        }
        case LinearSource::SpannedSpreadElements: {
            // span of the elements over the unit points of a k-space, plus a
            // single extra point of the next element: dim tk, and B(U) is the
            // k-space itself (every element inside the span meets U)
            const ProjSpace& small = d.small_space();
            std::vector<u32> coords(small.ncoords(), 0);
            Subspace acc = Subspace::empty(big);
            for (u32 i = 0; i < k; ++i) {
                std::fill(coords.begin(), coords.end(), 0);
                coords[i] = 1;
                acc = span_of(acc, d.element_of(small.index_of(coords)));
            }
            std::fill(coords.begin(), coords.end(), 0);
            coords[k] = 1;
            const Subspace& last = d.element_of(small.index_of(coords));
            u = span_with_point(acc, last.basis().row(0));
            break;
        }
    }
    if (u.rank() != rank) throw internal_error("construction produced the wrong dimension");
    return ConstructedBlocking{d.linear_set(u), std::move(u)};
}

// ---------------------------------------------------------------------------
// Audit pipeline: checks the smallness / minimality / congruence hypotheses
// exactly, applies the k = 1 size filter, and attaches a certification
// outcome when every hypothesis holds. The conclusion is never asserted; a
// budget-limited certification stays inconclusive.
// ---------------------------------------------------------------------------
struct AuditReport {
    bool blocking = false;
    bool small = false;
    bool minimal = false;
    bool one_mod_q = false;
    bool hypotheses_all = false;
    u64 size = 0;
    bool size_filter_applied = false;  // k == 1 only
    bool size_congruent = false;       // |B| = 1 (mod q)
    bool size_within = false;          // |B| <= q^3 + q^2 + q + 1
    std::optional<Subspace> congruence_witness;  // an (n-k)-space breaking 1 (mod q)
    std::optional<CertifyResult> certificate;
};

struct AuditOptions {
    CertifyOptions certify;
    SpectrumOptions scan;
};

inline AuditReport linearity_audit(const PointSet& b, const BlockingContext& ctx,
                                   const DesarguesianSpread& d, const AuditOptions& opts = {}) {
    check_ambient(b, ctx);
    if (d.small_space() != ctx.space)
        throw argument_error("spread and context describe different spaces");
    AuditReport rep;
    rep.size = b.size();
    rep.blocking = is_k_blocking(b, ctx).blocking;
    rep.small = is_small(b, ctx);
    rep.minimal = rep.blocking && is_minimal_by_tangents(b, ctx);
    ModProfile congruence = meets_one_mod(b, ctx.cover_dim(), ctx.q(), ctx.space, opts.scan);
    rep.one_mod_q = congruence.ok;
    if (!congruence.ok && !congruence.report.offenders.empty())
        rep.congruence_witness = congruence.report.offenders.front().second;
    rep.hypotheses_all = rep.blocking && rep.small && rep.minimal && rep.one_mod_q;

    if (ctx.k == 1) {
        rep.size_filter_applied = true;
        rep.size_congruent = rep.size % ctx.q() == 1;
        if (rep.size_congruent) {
            BigInt q(ctx.q());
            rep.size_within = BigInt(rep.size) <= q * q * q + q * q + q + 1;
        }
    }
    if (rep.hypotheses_all) rep.certificate = certify_linear(d, b, opts.certify);
    return rep;
}

// ---------------------------------------------------------------------------
// Threshold arithmetic for the large-space censuses: with y large
// (n-k+1)-spaces through an (n-k)-space meeting B in pi_count points, and at
// least x extra points of B in each remaining space, the bound
//   (*) = y (q^4 - q^2 - q - 3 - pi_count) + ((q^{3k}-1)/(q^3-1) - y) x + pi_count
// must stay at or below |B| < q^{3k} + q^{3k-1} + q^{3k-2} + 3 q^{3k-3}.
// Evaluating (*) at the stated y in each census case exceeds that bound for
// q >= 7, which is the contradiction the censuses rest on. Case 3's stated y
// is a Laurent polynomial in q, so the arithmetic is done over the rationals.
// ---------------------------------------------------------------------------
struct CensusBudget {
    BigRat star;     // (*) evaluated at the stated y
    BigInt bound;    // q^{3k} + q^{3k-1} + q^{3k-2} + 3 q^{3k-3}
    BigRat y;
    bool exceeds = false;
};

inline CensusBudget census_budget(u32 q, u32 k, int which_case) {
    if (k < 2) throw argument_error("census arithmetic needs k >= 2");
    BigRat Q(q);
    auto qpow = [&](int e) {
        return e >= 0 ? BigRat(big_pow(BigInt(q), static_cast<unsigned>(e)))
                      : BigRat(1, big_pow(BigInt(q), static_cast<unsigned>(-e)));
    };
    const int K = static_cast<int>(3 * k);
    BigRat y, x, pi_count;
    switch (which_case) {
        case 1:
            y = qpow(K - 5) + 4 * qpow(K - 6);
            x = qpow(3);
            pi_count = 1;
            break;
        case 2:
            y = qpow(K - 5) + 5 * qpow(K - 6);
            x = qpow(3);
            pi_count = qpow(2) + Q + 1;
            break;
        case 3:
            y = 3 * qpow(K - 6) - qpow(K - 7);
            x = qpow(3) + qpow(2) - Q;
            pi_count = Q + 1;
            break;
        default:
            throw argument_error("census case must be 1, 2, or 3");
    }
    CensusBudget out;
    out.y = y;
    BigRat spaces = BigRat(big_pow(BigInt(q), 3 * k) - 1) / BigRat(big_pow(BigInt(q), 3) - 1);
    out.star = y * (qpow(4) - qpow(2) - Q - 3 - pi_count) + (spaces - y) * x + pi_count;
    out.bound = big_pow(BigInt(q), 3 * k) + big_pow(BigInt(q), 3 * k - 1) +
                big_pow(BigInt(q), 3 * k - 2) + 3 * big_pow(BigInt(q), 3 * k - 3);
    out.exceeds = out.star > BigRat(out.bound);
    return out;
}

// Count inequality behind the existence of small spaces through a secant:
// (q^{3k}-1)/(q^3-1) - q^{3k-5} - 5q^{3k-6} + 1 > q^3 + 1. The statement it
// feeds quantifies over j in {1,...,k-2}, so k >= 3 is required (and at k = 2
// the inequality is false as written).
struct SecantCountBound {
    BigRat lhs;
    BigInt rhs;
    bool holds = false;
};

inline SecantCountBound secant_small_space_count_bound(u32 q, u32 k) {
    if (k < 3) throw argument_error("needs k >= 3");
    SecantCountBound out;
    out.lhs = BigRat(big_pow(BigInt(q), 3 * k) - 1) / BigRat(big_pow(BigInt(q), 3) - 1) -
              BigRat(big_pow(BigInt(q), 3 * k - 5)) - 5 * BigRat(big_pow(BigInt(q), 3 * k - 6)) +
              1;
    out.rhs = big_pow(BigInt(q), 3) + 1;
    out.holds = out.lhs > BigRat(out.rhs);
    return out;
}

// ---------------------------------------------------------------------------
// Searchable predicates: spaces through a line with prescribed trace on B.
// ---------------------------------------------------------------------------

// An i-space through `l` whose intersection with B equals B ∩ l.
inline std::optional<Subspace> space_through_with_same_trace(const PointSet& b,
                                                             const Subspace& l, u32 dim) {
    const ProjSpace& sp = l.space();
    if (b.ambient() != sp.size()) throw argument_error("point set ambient mismatch");
    u64 base = count_rowspace_points_in(sp, l.basis(), b.mask());
    std::optional<Subspace> found;
    for_each_through(l, dim, [&](Subspace&& s) {
        if (found) return;
        if (count_rowspace_points_in(sp, s.basis(), b.mask()) == base) found = std::move(s);
    });
    return found;
}

// A small (in the threshold sense) space of the given dimension through `l`,
// optionally skew to `avoid`.
inline std::optional<Subspace> small_space_through(const PointSet& b, const Subspace& l,
                                                   u32 dim, const BlockingContext& ctx,
                                                   const Subspace* avoid = nullptr) {
    check_ambient(b, ctx);
    std::optional<Subspace> found;
    for_each_through(l, dim, [&](Subspace&& s) {
        if (found) return;
        if (avoid && meet(s, *avoid).dim() >= 0) return;
        if (classify_space(b, s, ctx).cls == SpaceClass::Small) found = std::move(s);
    });
    return found;
}

}  // namespace galgeo
