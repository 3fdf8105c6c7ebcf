#include <catch2/catch_amalgamated.hpp>

#include <set>

#include <fanolines/linespace.hpp>

using namespace fanolines;

namespace {

std::vector<Fq> vec(const FieldPtr& F, std::initializer_list<uint64_t> idx) {
    std::vector<Fq> out;
    for (uint64_t i : idx) out.push_back(F->element(i));
    return out;
}

MPoly quadric_surface(const FieldPtr& F) {
    // t0 t3 - t1 t2: the Segre quadric, two rulings of q+1 lines each
    return MPoly::parse("t0*t3 - t1*t2", 4, F);
}

}  // namespace

TEST_CASE("canonical form is a span invariant", "[linespace]") {
    auto F = Field::make(7, 1);
    auto A = vec(F, {1, 3, 0, 0}), B = vec(F, {0, 0, 1, 3});
    Line L = line_canonical(A, B, *F);
    CHECK(L.pivot0 == 0);
    CHECK(L.pivot1 == 2);
    CHECK(L.row0 == A);
    CHECK(L.row1 == B);

    // swapped, rescaled, recombined spans all canonicalize identically
    CHECK(line_canonical(B, A, *F) == L);
    auto scale = [&](const std::vector<Fq>& v, uint64_t c) {
        std::vector<Fq> out;
        for (Fq a : v) out.push_back(F->mul(a, F->element(c)));
        return out;
    };
    auto add = [&](const std::vector<Fq>& v, const std::vector<Fq>& w) {
        std::vector<Fq> out;
        for (size_t i = 0; i < v.size(); ++i) out.push_back(F->add(v[i], w[i]));
        return out;
    };
    CHECK(line_canonical(scale(A, 4), scale(B, 6), *F) == L);
    CHECK(line_canonical(add(A, B), add(A, scale(B, 6)), *F) == L);
    CHECK(line_canonical(add(scale(A, 2), scale(B, 5)), add(A, scale(B, 3)), *F) == L);

    CHECK_THROWS_AS(line_canonical(A, scale(A, 2), *F), std::invalid_argument);
    CHECK_THROWS_AS(line_canonical(A, vec(F, {0, 0, 0, 0}), *F), std::invalid_argument);
    CHECK_THROWS_AS(line_canonical(vec(F, {1}), vec(F, {2}), *F), std::invalid_argument);
}

TEST_CASE("a line carries q + 1 normalized points", "[linespace]") {
    auto F = Field::make(3, 1);
    Line L = line_canonical(vec(F, {1, 0, 0, 2}), vec(F, {0, 1, 2, 0}), *F);
    auto pts = line_points(L, *F);
    REQUIRE(pts.size() == 4);
    std::set<std::vector<Fq>> distinct(pts.begin(), pts.end());
    CHECK(distinct.size() == 4);
    for (const auto& pt : pts) {
        size_t lead = 0;
        while (lead < pt.size() && F->is_zero(pt[lead])) ++lead;
        REQUIRE(lead < pt.size());
        CHECK(pt[lead] == F->one());
    }
}

TEST_CASE("line counts match the Gaussian binomial", "[linespace]") {
    struct Case { uint32_t n; uint32_t p, k; uint64_t expect; };
    for (Case c : {Case{1, 5, 1, 1}, Case{2, 2, 1, 7}, Case{2, 3, 1, 13},
                   Case{3, 2, 1, 35}, Case{3, 3, 1, 130}, Case{3, 7, 1, 2850},
                   Case{3, 3, 2, 7462}}) {
        auto F = Field::make(c.p, c.k);
        LineEnumerator en(c.n, F);
        CHECK(en.count() == c.expect);
        CHECK(LineEnumerator::expected_count(c.n, F->size()) == c.expect);
    }
    CHECK_THROWS_AS(LineEnumerator(0, Field::make(3, 1)), std::invalid_argument);
}

TEST_CASE("enumerated lines are distinct canonical forms", "[linespace]") {
    auto F = Field::make(3, 1);
    LineEnumerator en(3, F);
    std::set<Line> seen;
    for (uint64_t i = 0; i < en.count(); ++i) {
        Line L = en.at(i);
        CHECK(line_canonical(L.row0, L.row1, *F) == L);
        seen.insert(L);
    }
    CHECK(seen.size() == en.count());
    CHECK_THROWS_AS(en.at(en.count()), std::invalid_argument);

    // P^1 is its own single line
    LineEnumerator p1(1, F);
    CHECK(p1.count() == 1);
    CHECK(p1.at(0).row0 == vec(F, {1, 0}));
    CHECK(p1.at(0).row1 == vec(F, {0, 1}));
}

TEST_CASE("line containment in a variety", "[linespace]") {
    auto F = Field::make(3, 1);
    MPoly g = quadric_surface(F);
    Line on = line_canonical(vec(F, {1, 0, 0, 0}), vec(F, {0, 1, 0, 0}), *F);
    Line off = line_canonical(vec(F, {1, 0, 0, 0}), vec(F, {0, 0, 0, 1}), *F);
    CHECK(line_on_variety(on, {g}));
    CHECK_FALSE(line_on_variety(off, {g}));
}

TEST_CASE("the Segre quadric carries its two rulings", "[linespace]") {
    auto F = Field::make(3, 1);
    MPoly g = quadric_surface(F);
    auto lines = lines_on_variety({g}, 3, F);
    CHECK(lines.size() == 8);  // 2 (q + 1)

    for (const Line& L : lines) {
        SplittingType st = splitting_type(L, {g});
        CHECK(st.summands == std::vector<int32_t>{0});
        CHECK(st.rank() == 1);
        CHECK(st.degree() == 0);
        CHECK(st.is_free());
        CHECK(st.str() == "(0)");
    }

    auto census = point_fiber_census({g}, 3, F);
    CHECK(census.size() == 16);  // (q + 1)^2 points
    for (const auto& [pt, cnt] : census) CHECK(cnt == 2);

    // chunk merging keeps the result identical across thread counts
    auto lines4 = lines_on_variety({g}, 3, F, 4);
    CHECK(lines == lines4);
}

TEST_CASE("the diagonal cubic surface over F_7 has 27 rigid lines", "[linespace]") {
    auto F = Field::make(7, 1);
    MPoly g = fermat_polynomial(3, 3, F);
    auto lines = lines_on_variety({g}, 3, F);
    CHECK(lines.size() == 27);

    uint64_t free_count = 0;
    for (const Line& L : lines) {
        SplittingType st = splitting_type(L, {g});
        CHECK(st.summands == std::vector<int32_t>{-1});
        CHECK_FALSE(st.is_free());
        if (st.is_free()) ++free_count;
    }
    CHECK(free_count == 0);

    auto census = point_fiber_census({g}, 3, F);
    uint64_t total = 0, on_variety = 0;
    for (const auto& [pt, cnt] : census) total += cnt;
    CHECK(total == 27 * 8);  // 27 lines, q + 1 points each

    // census keys are exactly the F_7-points of the surface
    PointEnumerator pts(3, F);
    for (uint64_t i = 0; i < pts.count(); ++i)
        if (F->is_zero(g.eval(pts.at(i)))) ++on_variety;
    CHECK(census.size() == on_variety);
}

TEST_CASE("splitting rejects lines off the variety and singular varieties", "[linespace]") {
    auto F = Field::make(3, 1);
    MPoly g = quadric_surface(F);
    Line off = line_canonical(vec(F, {1, 0, 0, 0}), vec(F, {0, 0, 0, 1}), *F);
    CHECK_THROWS_WITH(splitting_type(off, {g}),
                      Catch::Matchers::ContainsSubstring("not contained"));

    // quadric cone: every line through the vertex lies on it, but the vertex
    // is a singular point, caught by the section-level rank test
    MPoly cone = MPoly::parse("t0^2 + t1^2 + 2*t2^2", 4, F);
    Line through_vertex =
        line_canonical(vec(F, {0, 0, 0, 1}), vec(F, {0, 1, 1, 0}), *F);
    REQUIRE(line_on_variety(through_vertex, {cone}));
    CHECK_THROWS_WITH(splitting_type(through_vertex, {cone}),
                      Catch::Matchers::ContainsSubstring("singular along the line"));
}

TEST_CASE("splitting type is invariant under base extension", "[linespace]") {
    auto F3 = Field::make(3, 1);
    auto F9 = Field::make(3, 2);
    MPoly g = quadric_surface(F3);
    FieldEmbedding phi(F3, F9);
    MPoly g9 = g.map_field(phi);

    for (const Line& L : lines_on_variety({g}, 3, F3)) {
        std::vector<Fq> r0, r1;
        for (Fq a : L.row0) r0.push_back(phi(a));
        for (Fq a : L.row1) r1.push_back(phi(a));
        Line L9 = line_canonical(r0, r1, *F9);
        CHECK(splitting_type(L9, {g9}) == splitting_type(L, {g}));
    }
}

TEST_CASE("varieties without lines yield an all-zero census", "[linespace]") {
    auto F = Field::make(3, 1);
    // smooth plane conic: q + 1 points, no lines contained in it
    MPoly conic = MPoly::parse("t0^2 + t1^2 + t2^2", 3, F);
    CHECK(lines_on_variety({conic}, 2, F).empty());
    auto census = point_fiber_census({conic}, 2, F);
    CHECK(census.size() == 4);
    for (const auto& [pt, cnt] : census) CHECK(cnt == 0);
}

TEST_CASE("freeness census across fields", "[linespace]") {
    auto F3 = Field::make(3, 1);
    MPoly g = quadric_surface(F3);
    auto rep = freeness_census({g}, 3, {F3, Field::make(3, 2)});
    CHECK(rep.n == 3);
    CHECK(rep.degrees == std::vector<uint32_t>{2});
    REQUIRE(rep.fields.size() == 2);

    CHECK(rep.fields[0].field == "3");
    CHECK(rep.fields[0].lines_in_space == 130);
    CHECK(rep.fields[0].lines_on_variety == 8);
    CHECK(rep.fields[0].free_lines == 8);
    CHECK(rep.fields[0].splitting_histogram ==
          std::map<std::string, uint64_t>{{"(0)", 8}});

    CHECK(rep.fields[1].field == "3^2");
    CHECK(rep.fields[1].lines_in_space == 7462);
    CHECK(rep.fields[1].lines_on_variety == 20);  // both rulings over F_9
    CHECK(rep.fields[1].free_lines == 20);
}
