#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "galgeo/reduction.hpp"
#include "galgeo/rng.hpp"

using namespace galgeo;

namespace {

Subspace seeded_subspace(const ProjSpace& sp, u32 rank, u64 seed, u64 salt) {
    CounterRng rng(seed, "seeded-subspace");
    for (u64 attempt = 0;; ++attempt) {
        Mat m(rank, sp.ncoords());
        for (u32 i = 0; i < rank; ++i)
            for (u32 j = 0; j < sp.ncoords(); ++j)
                m.at(i, j) = static_cast<u32>(
                    rng.below(sp.field().size(), salt * 1000003 + attempt * 4096 +
                                                     i * sp.ncoords() + j));
        Subspace s(sp, std::move(m));
        if (s.rank() == rank) return s;
    }
}

}  // namespace

TEST_CASE("field reduction produces exact partitions") {
    struct Case {
        u32 p, h, t, n;
        u64 elements, big_points;
    };
    for (Case c : {Case{2, 1, 3, 1, 9, 63}, Case{3, 1, 3, 1, 28, 364},
                   Case{3, 1, 3, 2, 757, 9841}, Case{2, 3, 2, 1, 65, 585}}) {
        FieldTower tw = FieldTower::make(c.p, c.h, c.t);
        DesarguesianSpread d = field_reduce(tw, c.n);
        CHECK(d.element_count() == c.elements);
        CHECK(d.big_space().size() == c.big_points);
        CHECK(d.element_count() == d.small_space().size());
        u64 covered = 0;
        for (const Subspace& el : d.elements()) {
            CHECK(el.dim() == static_cast<int>(c.t) - 1);
            covered += el.num_points();
        }
        CHECK(covered == c.big_points);
    }
}

TEST_CASE("element lookup agrees with membership") {
    FieldTower tw = FieldTower::make(2, 1, 3);
    DesarguesianSpread d = field_reduce(tw, 1);
    std::map<u32, u64> census;
    for (u64 p = 0; p < d.big_space().size(); ++p) {
        u32 e = d.element_of_big_point(p);
        CHECK(d.element_of(e).contains_index(p));
        ++census[e];
    }
    CHECK(census.size() == 9);
    for (auto [e, cnt] : census) CHECK(cnt == 7);

    // S is injective on points: distinct points have disjoint images
    for (u64 i = 0; i < d.element_count(); ++i)
        for (u64 j = i + 1; j < d.element_count(); ++j)
            CHECK(meet(d.element_of(i), d.element_of(j)).dim() == -1);
}

TEST_CASE("spans of spread elements are partitioned by spread elements") {
    FieldTower tw = FieldTower::make(3, 1, 3);
    DesarguesianSpread d = field_reduce(tw, 2);
    CounterRng rng(4242, "element-pair-spans");
    for (u32 trial = 0; trial < 40; ++trial) {
        u64 i = rng.below(d.element_count(), 2 * trial);
        u64 j = rng.below(d.element_count(), 2 * trial + 1);
        if (i == j) continue;
        Subspace s = span_of(d.element_of(i), d.element_of(j));
        CHECK(s.dim() == 5);  // 2t - 1
        CHECK(d.is_partitioned_by_elements(s));
    }
    // a random 5-space is generally not partitioned
    u32 not_part = 0;
    for (u32 trial = 0; trial < 10; ++trial) {
        Subspace s = seeded_subspace(d.big_space(), 6, 777, trial);
        if (!d.is_partitioned_by_elements(s)) ++not_part;
    }
    CHECK(not_part > 0);
}

TEST_CASE("linear sets of elements, lines, and scattered planes") {
    FieldTower tw = FieldTower::make(2, 1, 3);
    DesarguesianSpread d = field_reduce(tw, 1);

    // U a spread element: a single point
    CHECK(d.linear_set(d.element_of(4)).indices() == std::vector<u32>{4});
    CHECK_FALSE(d.is_scattered(d.element_of(4)));

    // a point is scattered
    CHECK(d.is_scattered(Subspace::point(d.big_space(), 11)));

    // lines not inside an element give sublines of size q+1; scattered planes
    // of PG(5,2) exist and give sets of size q^2+q+1 = 7
    u64 line_count = 0, subline_count = 0;
    SubspaceEnumerator lines(d.big_space(), 1);
    lines.for_each([&](const Mat& m, u64) {
        ++line_count;
        Subspace l = Subspace::from_rref(d.big_space(), m);
        u64 sz = d.linear_set_mask(l).count();
        bool inside = sz == 1;
        if (!inside) {
            CHECK(sz == 3);  // q + 1
            ++subline_count;
        }
    });
    CHECK(line_count == 651);
    CHECK(subline_count == 651 - 9 * 7);

    u64 plane_count = 0, scattered = 0;
    SubspaceEnumerator planes(d.big_space(), 2);
    planes.for_each([&](const Mat& m, u64) {
        ++plane_count;
        Subspace pl = Subspace::from_rref(d.big_space(), m);
        if (d.is_scattered(pl)) {
            ++scattered;
            CHECK(d.linear_set_mask(pl).count() == 7);
        }
    });
    CHECK(plane_count == 1395);
    CHECK(BigInt(plane_count) == gaussian_coeff(6, 3, 2));
    CHECK(scattered > 0);
}

TEST_CASE("linear set classification on the line") {
    FieldTower tw = FieldTower::make(3, 1, 3);
    DesarguesianSpread d = field_reduce(tw, 1);
    const u64 q = 3;

    // line inside a spread element: a point
    Subspace el = d.element_of(5);
    bool found_line = false;
    for_each_within(el, 1, [&](Subspace&& l) {
        if (found_line) return;
        found_line = true;
        LineSetClass c = classify_line_linear_set(d, l);
        CHECK(c.kind == LineSetKind::Point);
        CHECK(c.set_size == 1);
        CHECK(c.pattern_consistent);
    });
    CHECK(found_line);

    u64 pencils = 0, scattered = 0, points = 0, other = 0;
    SubspaceEnumerator planes(d.big_space(), 2);
    planes.for_each([&](const Mat& m, u64) {
        LineSetClass c = classify_line_linear_set(d, Subspace::from_rref(d.big_space(), m));
        CHECK(c.pattern_consistent);
        switch (c.kind) {
            case LineSetKind::Point: ++points; CHECK(c.set_size == 1); break;
            case LineSetKind::Pencil: ++pencils; CHECK(c.set_size == q * q + 1); break;
            case LineSetKind::ScatteredPlane:
                ++scattered;
                CHECK(c.set_size == q * q + q + 1);
                break;
            default: ++other; break;
        }
    });
    CHECK(other == 0);
    CHECK(points == 28);  // exactly the spread elements
    CHECK(pencils > 0);
    CHECK(scattered > 0);
    CHECK(points + pencils + scattered == 33880);

    // the whole big space gives the full line
    LineSetClass full = classify_line_linear_set(d, Subspace::whole(d.big_space()));
    CHECK(full.kind == LineSetKind::FullLine);
    CHECK(full.set_size == 28);
}

TEST_CASE("B(U) is monotone under inclusion") {
    FieldTower tw = FieldTower::make(2, 1, 3);
    DesarguesianSpread d = field_reduce(tw, 1);
    SubspaceEnumerator planes(d.big_space(), 2);
    planes.for_each([&](const Mat& m, u64) {
        Subspace pl = Subspace::from_rref(d.big_space(), m);
        BitMask big = d.linear_set_mask(pl);
        for_each_within(pl, 1, [&](Subspace&& l) {
            CHECK(d.linear_set_mask(l).subset_of(big));
        });
    });
}

TEST_CASE("sublines via 3-point closure") {
    // q = 2: every 3-subset of PG(1,8) is a subline
    FieldTower t2 = FieldTower::make(2, 1, 3);
    auto sub2 = enumerate_sublines(t2);
    CHECK(sub2.size() == 84);
    std::set<std::vector<u32>> as_sets;
    for (const auto& s : sub2) {
        CHECK(s.size() == 3);
        as_sets.insert(s.indices());
    }
    CHECK(as_sets.size() == 84);

    // q = 3: 819 sublines of 4 points each
    FieldTower t3 = FieldTower::make(3, 1, 3);
    auto sub3 = enumerate_sublines(t3);
    CHECK(sub3.size() == 819);
    for (const auto& s : sub3) CHECK(s.size() == 4);
}

TEST_CASE("closure sublines coincide with line-induced linear sets") {
    for (u32 q : {2u, 3u}) {
        FieldTower tw = FieldTower::make(q, 1, 3);
        DesarguesianSpread d = field_reduce(tw, 1);
        std::set<std::vector<u32>> from_lines;
        SubspaceEnumerator lines(d.big_space(), 1);
        lines.for_each([&](const Mat& m, u64) {
            PointSet b = d.linear_set(Subspace::from_rref(d.big_space(), m));
            if (b.size() > 1) from_lines.insert(b.indices());
        });
        std::set<std::vector<u32>> from_closure;
        for (const auto& s : enumerate_sublines(tw)) from_closure.insert(s.indices());
        CHECK(from_lines == from_closure);
    }
}

TEST_CASE("Baer sublines of PG(1,64)") {
    FieldTower tw = FieldTower::make(2, 2, 3);
    auto baer = enumerate_baer_sublines(tw);
    CHECK(baer.size() == 520);
    std::set<std::vector<u32>> uniq;
    for (const auto& s : baer) {
        CHECK(s.size() == 9);
        uniq.insert(s.indices());
    }
    CHECK(uniq.size() == 520);

    FieldTower t3 = FieldTower::make(3, 1, 3);
    CHECK_THROWS_AS(enumerate_baer_sublines(t3), argument_error);
}

TEST_CASE("certification round trip on seeded subspaces") {
    FieldTower tw = FieldTower::make(3, 1, 3);
    DesarguesianSpread d = field_reduce(tw, 1);

    // single point
    PointSet single(d.small_space().size());
    single.insert(7);
    CertifyResult r1 = certify_linear(d, single);
    REQUIRE(r1.status == CertifyResult::Status::Found);
    CHECK(d.linear_set(*r1.witness) == single);

    for (u32 trial = 0; trial < 10; ++trial) {
        u32 rank = 2 + trial % 3;
        Subspace u0 = seeded_subspace(d.big_space(), rank, 1234, trial);
        PointSet b = d.linear_set(u0);
        CertifyResult r = certify_linear(d, b);
        REQUIRE(r.status == CertifyResult::Status::Found);
        CHECK(d.linear_set(*r.witness) == b);
    }
}

TEST_CASE("anchoring at any point of a linear set yields a witness") {
    for (u32 q : {2u, 3u}) {
        FieldTower tw = FieldTower::make(q, 1, 3);
        DesarguesianSpread d = field_reduce(tw, 1);
        Subspace u0 = seeded_subspace(d.big_space(), 3, 555 + q, 0);
        PointSet b = d.linear_set(u0);
        for (u32 p : b.indices()) {
            CertifyOptions opts;
            opts.anchor = p;
            CertifyResult r = certify_linear(d, b, opts);
            REQUIRE(r.status == CertifyResult::Status::Found);
            CHECK(d.linear_set(*r.witness) == b);
        }
    }
}

TEST_CASE("exhaustive certification proves nonlinearity, against a full-enumeration oracle") {
    FieldTower tw = FieldTower::make(3, 1, 3);
    DesarguesianSpread d = field_reduce(tw, 1);

    // B(U0) minus one point for a plane U0 not inside an element
    Subspace u0 = seeded_subspace(d.big_space(), 3, 99, 3);
    PointSet b0 = d.linear_set(u0);
    REQUIRE(b0.size() > 2);
    PointSet b(d.small_space().size());
    for (std::size_t i = 1; i < b0.indices().size(); ++i) b.insert(b0.indices()[i]);

    CertifyOptions opts;
    opts.exhaustive = true;
    CertifyResult r = certify_linear(d, b, opts);
    CHECK(r.status == CertifyResult::Status::Nonlinear);

    // oracle: enumerate every subspace of PG(5,3) of every dimension
    bool any = false;
    for (u32 dim = 0; dim <= 5 && !any; ++dim) {
        SubspaceEnumerator en(d.big_space(), dim);
        en.for_each([&](const Mat& m, u64) {
            if (any) return;
            if (d.linear_set_mask(Subspace::from_rref(d.big_space(), m)) == b.mask()) any = true;
        });
    }
    CHECK_FALSE(any);
}

TEST_CASE("general-position spans of several elements stay partitioned") {
    FieldTower tw = FieldTower::make(2, 1, 3);
    DesarguesianSpread d = field_reduce(tw, 2);  // PG(8,2), 73 elements
    CounterRng rng(31337, "tuple-spans");
    u32 checked = 0;
    for (u32 trial = 0; trial < 30 && checked < 10; ++trial) {
        u64 i = rng.below(d.element_count(), 3 * trial);
        u64 j = rng.below(d.element_count(), 3 * trial + 1);
        u64 k = rng.below(d.element_count(), 3 * trial + 2);
        if (i == j || j == k || i == k) continue;
        Subspace s = span_of(span_of(d.element_of(i), d.element_of(j)), d.element_of(k));
        if (s.dim() != 8) continue;  // not in general position
        ++checked;
        CHECK(d.is_partitioned_by_elements(s));
    }
    CHECK(checked > 0);
}
