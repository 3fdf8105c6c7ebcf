#include <catch2/catch_amalgamated.hpp>

#include <set>

#include <fanolines/witness.hpp>

using namespace fanolines;

namespace {

std::vector<Fq> point(const FieldPtr& F, std::initializer_list<uint64_t> idx) {
    std::vector<Fq> pt;
    for (uint64_t i : idx) pt.push_back(F->element(i));
    return pt;
}

}  // namespace

TEST_CASE("diagonal witness construction", "[witness]") {
    auto F = Field::make(3, 1);
    CHECK(fermat_polynomial(3, 3, F) == MPoly::parse("t0^3 + t1^3 + t2^3 + t3^3", 4, F));
    CHECK(fermat_polynomial(5, 4, F).nterms() == 6);
    CHECK(fermat_polynomial(5, 4, F).degree() == 4);
    CHECK_THROWS_AS(fermat_polynomial(0, 3, F), std::invalid_argument);
    CHECK_THROWS_AS(fermat_polynomial(3, 0, F), std::invalid_argument);
}

TEST_CASE("cyclic witness branches on p dividing n+1", "[witness]") {
    auto F2 = Field::make(2, 1);

    // n = 7: 2 | 8, so the diagonal correction term is present.
    CHECK(cyclic_needs_tilde(7, 2));
    MPoly tilde = cyclic_witness(7, 6, F2);
    CHECK(tilde.nterms() == 9);
    CHECK(tilde == MPoly::parse("t0^6 + t0^5*t1 + t1^5*t2 + t2^5*t3 + t3^5*t4 + "
                                "t4^5*t5 + t5^5*t6 + t6^5*t7 + t7^5*t0",
                                8, F2));

    // n = 6: 7 is odd, plain chain.
    CHECK_FALSE(cyclic_needs_tilde(6, 2));
    MPoly plain = cyclic_witness(6, 6, F2);
    CHECK(plain.nterms() == 7);
    CHECK(plain == MPoly::parse("t0^5*t1 + t1^5*t2 + t2^5*t3 + t3^5*t4 + "
                                "t4^5*t5 + t5^5*t6 + t6^5*t0",
                                7, F2));

    CHECK_THROWS_AS(cyclic_witness(7, 5, F2), std::invalid_argument);  // 2 prime to 5
    CHECK_THROWS_AS(cyclic_witness(1, 6, F2), std::invalid_argument);  // n too small
    auto F3 = Field::make(3, 1);
    CHECK(cyclic_witness(2, 6, F3).nterms() == 4);  // 3 | 3 = n+1
}

TEST_CASE("digitwise binomial agrees with the exact binomial mod p", "[witness]") {
    CHECK(lucas_binomial(4, 2, 3) == 0);
    CHECK(lucas_binomial(4, 1, 3) == 1);
    CHECK(lucas_binomial(10, 4, 2) == 0);
    CHECK(lucas_binomial(5, 2, 2) == 0);
    CHECK(lucas_binomial(7, 3, 2) == 1);
    CHECK(lucas_binomial(9, 10, 3) == 0);  // ell > d
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull}) {
        for (uint64_t d = 0; d <= 40; ++d) {
            for (uint64_t ell = 0; ell <= d; ++ell) {
                uint64_t exact = (binomial_big(d, ell) % p).convert_to<uint64_t>();
                REQUIRE(lucas_binomial(d, ell, p) == exact);
            }
        }
    }
    CHECK_THROWS_AS(lucas_binomial(4, 2, 4), std::invalid_argument);
}

TEST_CASE("forced zeros of the cyclic chain", "[witness]") {
    // d = 6, p = 2: v = 2, classes mod 4 above r = 2 are {3}; the tilde branch
    // (n = 7) additionally excludes even indices, which leaves {3}.
    CHECK(cyclic_forced_zeros(7, 6, 2) == std::vector<uint32_t>{3});
    // n = 6 has no tilde term, same exclusion set here.
    CHECK(cyclic_forced_zeros(6, 6, 2) == std::vector<uint32_t>{3});
    // d = 12, p = 3: v = 2, r = 3, classes {4..8} mod 9; no tilde for n = 13.
    CHECK(cyclic_forced_zeros(13, 12, 3) == std::vector<uint32_t>{4, 5, 6, 7, 8});
}

TEST_CASE("vanishing analysis of the diagonal quartic over F_3", "[witness]") {
    auto F = Field::make(3, 1);
    auto rep = analyze_vanishing(fermat_polynomial(5, 4, F), Family::Fermat);
    CHECK(rep.computed_zero_set == std::vector<uint32_t>{2});
    REQUIRE(rep.predicted_zero_set.has_value());
    CHECK(*rep.predicted_zero_set == std::vector<uint32_t>{2});
    REQUIRE(rep.agree.has_value());
    CHECK(*rep.agree);
    REQUIRE(rep.verdict.has_value());
    CHECK(*rep.verdict == "NO_FREE_LINES_CERTIFIED");
    CHECK(rep.n == 5);
    CHECK(rep.d == 4);
    CHECK(rep.field == "3");
}

TEST_CASE("quadrics in odd characteristic certify nothing", "[witness]") {
    auto F = Field::make(3, 1);
    auto rep = analyze_vanishing(fermat_polynomial(3, 2, F), Family::Fermat);
    CHECK(rep.computed_zero_set.empty());
    CHECK(*rep.agree);
    CHECK_FALSE(rep.verdict.has_value());
}

TEST_CASE("vanishing analysis of the cyclic sextic over F_2", "[witness]") {
    auto F = Field::make(2, 1);
    auto rep = analyze_vanishing(cyclic_witness(7, 6, F), Family::Cyclic);
    CHECK(rep.computed_zero_set == std::vector<uint32_t>{3});
    CHECK(*rep.predicted_zero_set == std::vector<uint32_t>{3});
    CHECK(*rep.agree);
    CHECK(*rep.verdict == "NO_FREE_LINES_CERTIFIED");
}

TEST_CASE("forced zeros are contained in computed zeros across the family", "[witness]") {
    struct Case { uint32_t n, d, p; bool expect_nonempty; };
    // p^v close to d can force nothing (e.g. d = 8, p = 2); containment still
    // has to hold, vacuously there.
    for (Case c : {Case{11, 10, 2, true}, Case{13, 12, 3, true}, Case{9, 8, 2, false},
                   Case{6, 6, 2, true}, Case{4, 9, 3, false}}) {
        auto F = Field::make(c.p, 1);
        auto rep = analyze_vanishing(cyclic_witness(c.n, c.d, F), Family::Cyclic);
        REQUIRE(rep.agree.has_value());
        CHECK(*rep.agree);
        std::set<uint32_t> computed(rep.computed_zero_set.begin(),
                                    rep.computed_zero_set.end());
        for (uint32_t ell : *rep.predicted_zero_set) CHECK(computed.count(ell) == 1);
        CHECK(rep.predicted_zero_set->empty() != c.expect_nonempty);
    }
}

TEST_CASE("vanishing analysis rejects bad input", "[witness]") {
    auto F2 = Field::make(2, 1);
    auto F3 = Field::make(3, 1);
    CHECK_THROWS_AS(analyze_vanishing(MPoly::zero(F3, 4, 3), Family::None),
                    std::invalid_argument);
    CHECK_THROWS_AS(analyze_vanishing(MPoly::parse("t0 + t1", 2, F3), Family::None),
                    std::invalid_argument);
    // cyclic prediction needs p | d
    CHECK_THROWS_AS(analyze_vanishing(fermat_polynomial(3, 3, F2), Family::Cyclic),
                    std::invalid_argument);
    // no hint: no prediction, no agreement claim
    auto rep = analyze_vanishing(fermat_polynomial(5, 4, F3), Family::None);
    CHECK(rep.computed_zero_set == std::vector<uint32_t>{2});
    CHECK_FALSE(rep.predicted_zero_set.has_value());
    CHECK_FALSE(rep.agree.has_value());
}

TEST_CASE("projective points come in the pinned scan order", "[witness]") {
    auto F = Field::make(3, 1);
    PointEnumerator pts(3, F);
    CHECK(pts.count() == 40);  // 27 + 9 + 3 + 1
    CHECK(pts.at(0) == point(F, {1, 0, 0, 0}));
    CHECK(pts.at(1) == point(F, {1, 1, 0, 0}));
    CHECK(pts.at(2) == point(F, {1, 2, 0, 0}));
    CHECK(pts.at(3) == point(F, {1, 0, 1, 0}));
    CHECK(pts.at(9) == point(F, {1, 0, 0, 1}));
    CHECK(pts.at(26) == point(F, {1, 2, 2, 2}));
    CHECK(pts.at(27) == point(F, {0, 1, 0, 0}));
    CHECK(pts.at(28) == point(F, {0, 1, 1, 0}));
    CHECK(pts.at(36) == point(F, {0, 0, 1, 0}));
    CHECK(pts.at(39) == point(F, {0, 0, 0, 1}));
    CHECK_THROWS_AS(pts.at(40), std::invalid_argument);

    // every index yields a distinct normalized representative
    std::set<std::vector<uint32_t>> seen;
    for (uint64_t i = 0; i < pts.count(); ++i) {
        auto pt = pts.at(i);
        size_t lead = 0;
        while (lead < pt.size() && F->is_zero(pt[lead])) ++lead;
        REQUIRE(lead < pt.size());
        CHECK(pt[lead].v == F->one().v);
        std::vector<uint32_t> key;
        for (Fq a : pt) key.push_back(a.v);
        seen.insert(std::move(key));
    }
    CHECK(seen.size() == pts.count());
}

TEST_CASE("scan finds the first singular point of the diagonal cubic over F_3", "[witness]") {
    auto F = Field::make(3, 1);
    MPoly g = fermat_polynomial(3, 3, F);
    auto verdict = jacobian_singular_scan({g}, 3, F, 1);
    CHECK(verdict.status == SmoothnessVerdict::Status::SingularFound);
    REQUIRE(verdict.witness_point.has_value());
    CHECK(*verdict.witness_point == std::vector<uint32_t>{1, 2, 0, 0});
    CHECK(*verdict.witness_field == "3");
    CHECK(verdict.scanned_extension_degrees == std::vector<uint32_t>{1});

    // independent re-verification: the form and all 1x1 Jacobian minors vanish
    auto pt = point(F, {1, 2, 0, 0});
    CHECK(F->is_zero(g.eval(pt)));
    for (uint32_t j = 0; j <= 3; ++j) CHECK(F->is_zero(g.partial(j).eval(pt)));

    // multi-threaded scan reports the same first point
    auto verdict4 = jacobian_singular_scan({g}, 3, F, 1, 4);
    CHECK(verdict4.status == SmoothnessVerdict::Status::SingularFound);
    CHECK(*verdict4.witness_point == std::vector<uint32_t>{1, 2, 0, 0});
}

TEST_CASE("diagonal cubic over F_7 is certified smooth", "[witness]") {
    auto F = Field::make(7, 1);
    auto verdict = jacobian_singular_scan({fermat_polynomial(3, 3, F)}, 3, F, 2);
    CHECK(verdict.status == SmoothnessVerdict::Status::CertifiedSmooth);
    REQUIRE(verdict.certificate.has_value());
    CHECK(*verdict.certificate == "fermat-diagonal-jacobian");
    CHECK(verdict.scanned_extension_degrees == std::vector<uint32_t>{1, 2});
    CHECK_FALSE(verdict.witness_point.has_value());
}

TEST_CASE("cyclic sextic scan stays bounded but carries its identity certificate", "[witness]") {
    auto F = Field::make(2, 1);
    auto verdict = jacobian_singular_scan({cyclic_witness(7, 6, F)}, 7, F, 2);
    CHECK(verdict.status == SmoothnessVerdict::Status::NoSingularUpTo);
    REQUIRE(verdict.certificate.has_value());
    CHECK(*verdict.certificate == "cyclic-identities");
    CHECK(verdict.scanned_extension_degrees == std::vector<uint32_t>{1, 2});
}

TEST_CASE("scan argument validation", "[witness]") {
    auto F3 = Field::make(3, 1);
    auto F2 = Field::make(2, 1);
    MPoly g = fermat_polynomial(3, 3, F3);
    CHECK_THROWS_AS(jacobian_singular_scan({}, 3, F3, 1), std::invalid_argument);
    CHECK_THROWS_AS(jacobian_singular_scan({g}, 4, F3, 1), std::invalid_argument);
    CHECK_THROWS_AS(jacobian_singular_scan({g}, 3, F2, 1), std::invalid_argument);
    CHECK_THROWS_AS(jacobian_singular_scan({g}, 3, F3, 0), std::invalid_argument);
    CHECK_THROWS_AS(jacobian_singular_scan({g, g, g, g}, 3, F3, 1), std::invalid_argument);
}

TEST_CASE("cyclic chain identities hold as exact polynomial identities", "[witness]") {
    CHECK(cyclic_identities_hold(7, 6, 2));
    CHECK(cyclic_identities_hold(6, 6, 2));
    CHECK(cyclic_identities_hold(13, 12, 3));
    CHECK(cyclic_identities_hold(2, 6, 3));   // tilde branch for p = 3
    CHECK(cyclic_identities_hold(4, 10, 5));  // tilde branch for p = 5
    CHECK_THROWS_AS(cyclic_identities_hold(7, 5, 2), std::invalid_argument);
}

TEST_CASE("seeded complete intersections are deterministic", "[witness]") {
    auto F = Field::make(3, 1);
    CIProfile prof{8, {4, 2}, 3};
    auto a = random_complete_intersection(prof, F, 0);
    auto b = random_complete_intersection(prof, F, 0);
    REQUIRE(a.size() == 2);
    CHECK(a[0] == b[0]);
    CHECK(a[1] == b[1]);

    // slot 0 is the witness: 4 >= 3 and 3 prime to 4 picks the diagonal form
    CHECK(a[0] == fermat_polynomial(8, 4, F));
    CHECK(a[1].degree() == 2);
    CHECK_FALSE(a[1].is_zero());

    auto c = random_complete_intersection(prof, F, 1);
    CHECK_FALSE(a[1] == c[1]);

    // 3 | 6 in the first reachable slot picks the cyclic chain
    CIProfile prof2{8, {6, 2}, 3};
    auto d = random_complete_intersection(prof2, F, 5);
    CHECK(d[0] == cyclic_witness(8, 6, F));

    CIProfile small{8, {2, 2}, 5};
    auto F5 = Field::make(5, 1);
    CHECK_THROWS_AS(random_complete_intersection(small, F5, 0), std::invalid_argument);
    CIProfile single{5, {4}, 3};
    CHECK_THROWS_AS(random_complete_intersection(single, F, 0), std::invalid_argument);
    CHECK_THROWS_AS(random_complete_intersection(prof, Field::make(2, 1), 0),
                    std::invalid_argument);
}
