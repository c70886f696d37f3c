#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "systolic/complex.hpp"
#include "systolic/corpus.hpp"

using namespace systolic;
using fixtures::single_triangle;

namespace {

bool has_kind(const ValidationReport& r, Violation::Kind k) {
    return std::any_of(r.violations.begin(), r.violations.end(), [k](const Violation& v) { return v.kind == k; });
}

}  // namespace

TEST(Validate, EquilateralPasses) { EXPECT_TRUE(validate(single_triangle()).pass()); }

TEST(Validate, TriangleInequalityViolation) {
    auto rep = validate(single_triangle(1, 1, 3));
    EXPECT_FALSE(rep.pass());
    EXPECT_TRUE(has_kind(rep, Violation::Kind::TriangleInequality));
    EXPECT_EQ(rep.violations.front().dimension, 2);
}

TEST(Validate, TorusPasses) { EXPECT_TRUE(validate(corpus::gen_torus(8).complex).pass()); }

TEST(Validate, ReportsEveryViolation) {
    ComplexBuilder b(5);
    b.add_edge(0, 1, -1);
    b.add_edge(1, 2, 0);
    b.add_edge(3, 3, 1);
    auto rep = validate(b.build());
    EXPECT_TRUE(has_kind(rep, Violation::Kind::NonPositiveLength));
    EXPECT_TRUE(has_kind(rep, Violation::Kind::LoopEdge));
    EXPECT_TRUE(has_kind(rep, Violation::Kind::DisconnectedSkeleton));
    EXPECT_GE(rep.violations.size(), 4u);
}

TEST(Validate, EdgeTriangleMismatch) {
    ComplexBuilder b(4);
    int e01 = b.add_edge(0, 1, 1), e12 = b.add_edge(1, 2, 1), e23 = b.add_edge(2, 3, 1);
    b.add_edge(3, 0, 1);
    b.add_triangle(0, 1, 2, e01, e12, e23);
    auto rep = validate(b.build());
    EXPECT_TRUE(has_kind(rep, Violation::Kind::EdgeTriangleMismatch));
}

TEST(Validate, AllCorpusInstancesPass) {
    for (const auto& [name, g] : fixtures::small_corpus()) EXPECT_TRUE(validate(g.complex).pass()) << name;
}

TEST(TriangleArea, Examples) {
    EXPECT_NEAR(triangle_area(1, 1, 1), std::sqrt(3.0) / 4, 1e-15);
    EXPECT_NEAR(triangle_area(1, 1, 1), 0.43301270, 1e-8);
    EXPECT_NEAR(triangle_area(3, 4, 5), 6.0, 1e-13);
    EXPECT_THROW(triangle_area(1, 1, 2), InvalidGeometry);
    EXPECT_THROW(triangle_area(0, 1, 1), InvalidGeometry);
    EXPECT_THROW(triangle_area(1, 1, 3), InvalidGeometry);
}

TEST(TriangleArea, NeedleIsStable) {
    // Heron in the naive ordering loses all digits here.
    const double eps = 1e-9;
    EXPECT_NEAR(triangle_area(1, 1, eps), 0.5 * eps * std::sqrt(1 - eps * eps / 4), 1e-22);
}

TEST(TotalArea, Examples) {
    EXPECT_NEAR(total_area(single_triangle()), 0.43301270, 1e-8);
    for (int n : {2, 3, 4, 8}) {
        auto t = corpus::gen_torus(n).complex;
        EXPECT_EQ(t.triangle_count(), 2 * n * n);
        EXPECT_NEAR(total_area(t), 1.0, 1e-9);
    }
    EXPECT_THROW(total_area(single_triangle(1, 1, 3)), InvalidGeometry);
}

TEST(Betti, Torus) {
    auto t = corpus::gen_torus(4).complex;
    EXPECT_EQ(betti1(t, Coefficients::rational()), 2);
    EXPECT_EQ(betti1(t, Coefficients::mod(2)), 2);
    EXPECT_EQ(betti1(t, Coefficients::mod(5)), 2);
    EXPECT_EQ(betti2(t), 1);
    EXPECT_EQ(betti0(t), 1);
}

TEST(Betti, MooreRationalVsModP) {
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull}) {
        auto m = corpus::gen_moore(p, 4, 3, corpus::moore_height(p, 1.0)).complex;
        EXPECT_EQ(betti1(m, Coefficients::rational()), 0) << p;
        EXPECT_EQ(betti1(m, Coefficients::mod(p)), 1) << p;
        EXPECT_EQ(betti2(m, Coefficients::mod(p)), 1) << p;
        EXPECT_EQ(betti2(m, Coefficients::rational()), 0) << p;
        // A prime not dividing the torsion sees the rational answer.
        EXPECT_EQ(betti1(m, Coefficients::mod(p == 2 ? 3 : 2)), 0) << p;
    }
}

TEST(Betti, MooreMatchesSmithNormalForm) {
    for (std::uint64_t p : {2ull, 3ull, 5ull}) {
        auto m = corpus::gen_moore(p, 3, 1, corpus::moore_height(p, 1.0)).complex;
        auto d = fixtures::smith_diagonal(fixtures::integer_boundary2(m));
        // H₁(M(Z_p); Z) = Z_p: exactly one invariant factor p, the rest units, and no free part.
        const int rank1 = m.vertex_count() - 1;
        EXPECT_EQ(static_cast<int>(d.size()), m.edge_count() - rank1) << p;
        EXPECT_EQ(std::count(d.begin(), d.end(), static_cast<std::int64_t>(p)), 1) << p;
        EXPECT_EQ(std::count(d.begin(), d.end(), 1), static_cast<long>(d.size()) - 1) << p;
    }
}

TEST(Betti, GraphCycleRank) {
    auto g = fixtures::two_circle_graph();
    EXPECT_EQ(betti1(g, Coefficients::rational()), 2);
    EXPECT_EQ(betti1(g, Coefficients::mod(3)), 2);
    EXPECT_EQ(betti1(corpus::theta_graph({1, 2, 3}), Coefficients::rational()), 2);
}

TEST(Betti, ProjectivePlane) {
    auto x = fixtures::rp2();
    EXPECT_EQ(x.euler_characteristic(), 1);
    EXPECT_EQ(betti1(x, Coefficients::rational()), 0);
    EXPECT_EQ(betti1(x, Coefficients::mod(2)), 1);
    EXPECT_EQ(betti2(x, Coefficients::mod(2)), 1);
}

TEST(ChainArea, Examples) {
    auto one = single_triangle();
    ChainModP c(2, modp::Prime(5));
    c.set(0, 2);
    EXPECT_NEAR(chain_area(c, one), 0.43301270, 1e-8);
    EXPECT_EQ(chain_area(ChainModP(2, modp::Prime(5)), one), 0.0);

    ComplexBuilder b(4);
    b.add_triangle_auto(0, 1, 2, 1, 1, 1);
    b.add_triangle_auto(0, 2, 3, 1, 1, 1);
    auto two = b.build();
    ChainModP d(2, modp::Prime(5));
    d.set(0, 1);
    d.set(1, 4);
    EXPECT_NEAR(chain_area(d, two), 0.86602540, 1e-8);
}

TEST(ChainArea, ErrorsAndZeroCoefficients) {
    auto one = single_triangle();
    ChainModP c(2, modp::Prime(3));
    c.set(5, 1);
    EXPECT_THROW(chain_area(c, one), IndexOutOfRange);
    ChainModP z(2, modp::Prime(3));
    z.set(0, 3);
    EXPECT_TRUE(z.terms().empty());
    EXPECT_THROW(chain_area(ChainModP(1, modp::Prime(3)), one), DimensionMismatch);
    EXPECT_THROW(ChainModP(3, modp::Prime(3)), DimensionMismatch);
}

TEST(ChainArea, InvariantUnderUnits) {
    auto x = corpus::gen_torus(3).complex;
    modp::Prime p(7);
    ChainModP c(2, p);
    for (int t = 0; t < x.triangle_count(); t += 2) c.set(t, t % 6 + 1);
    const double a = chain_area(c, x);
    for (modp::Scalar u = 1; u < 7; ++u) EXPECT_EQ(chain_area(c.scaled(u), x), a);
}

TEST(Subdivide, SingleTriangleCounts) {
    auto s = subdivide(single_triangle(), 1);
    EXPECT_EQ(s.complex.triangle_count(), 4);
    EXPECT_EQ(s.complex.edge_count(), 9);
    EXPECT_EQ(s.complex.vertex_count(), 6);
    EXPECT_TRUE(validate(s.complex).pass());
}

TEST(Subdivide, HalvesAndMidsegments) {
    auto x = single_triangle(3, 4, 5);
    auto s = subdivide(x, 1);
    for (int e = 0; e < x.edge_count(); ++e)
        for (int h : s.last_halves[static_cast<std::size_t>(e)]) EXPECT_DOUBLE_EQ(s.complex.edge_length(h), x.edge_length(e) / 2);
    EXPECT_EQ(s.complex.edge(s.last_halves[0][0]).tail, x.edge(0).tail);
    EXPECT_EQ(s.complex.edge(s.last_halves[0][1]).head, x.edge(0).head);
    // Midsegment lengths are half the opposite sides: {2.5, 1.5, 2} from (3,4,5).
    std::vector<double> mids;
    for (int e = 6; e < 9; ++e) mids.push_back(s.complex.edge_length(e));
    std::sort(mids.begin(), mids.end());
    EXPECT_EQ(mids, (std::vector<double>{1.5, 2.0, 2.5}));
    auto unit = subdivide(corpus::gen_circle(1 + 1, 2.0).complex, 1);
    EXPECT_DOUBLE_EQ(unit.complex.edge_length(0), 0.5);
    EXPECT_DOUBLE_EQ(unit.complex.edge_length(1), 0.5);
}

TEST(Subdivide, AreaPreservedOnCorpus) {
    for (const auto& [name, g] : fixtures::small_corpus()) {
        const double a0 = total_area(g.complex);
        const int max_level = g.complex.triangle_count() > 100 ? 3 : 5;
        for (int k = 1; k <= max_level; ++k) {
            auto s = subdivide(g.complex, k);
            if (a0 == 0)
                EXPECT_EQ(total_area(s.complex), 0.0) << name;
            else
                EXPECT_NEAR(total_area(s.complex) / a0, 1.0, 1e-9) << name << " level " << k;
        }
    }
}

TEST(Subdivide, TopologyInvariant) {
    for (const auto& [name, g] : fixtures::small_corpus()) {
        const auto& x = g.complex;
        const auto p = g.cocycles.front().cocycle.prime().value();
        const int chi = x.euler_characteristic();
        const int bq = betti1(x), bp = betti1(x, Coefficients::mod(p));
        for (int k = 1; k <= 2; ++k) {
            auto s = subdivide(x, k).complex;
            EXPECT_EQ(s.euler_characteristic(), chi) << name;
            EXPECT_EQ(betti1(s), bq) << name;
            EXPECT_EQ(betti1(s, Coefficients::mod(p)), bp) << name;
        }
    }
}

TEST(Subdivide, LineageIsConsistent) {
    auto x = corpus::gen_torus(2).complex;
    auto s = subdivide(x, 2);
    ASSERT_EQ(s.lineage.vertex_origin.size(), static_cast<std::size_t>(s.complex.vertex_count()));
    for (int v = 0; v < x.vertex_count(); ++v) {
        EXPECT_EQ(s.lineage.vertex_origin[static_cast<std::size_t>(v)].dimension, 0);
        EXPECT_EQ(s.lineage.vertex_origin[static_cast<std::size_t>(v)].index, v);
    }
    // Children of each original triangle tile it.
    std::vector<double> area(static_cast<std::size_t>(x.triangle_count()), 0);
    for (int t = 0; t < s.complex.triangle_count(); ++t) area[static_cast<std::size_t>(s.lineage.triangle_origin[static_cast<std::size_t>(t)])] += s.complex.triangle_area(t);
    for (int t = 0; t < x.triangle_count(); ++t) EXPECT_NEAR(area[static_cast<std::size_t>(t)], x.triangle_area(t), 1e-14);
    // Child edges of an original edge sum to its length.
    std::vector<double> len(static_cast<std::size_t>(x.edge_count()), 0);
    for (int e = 0; e < s.complex.edge_count(); ++e) {
        const auto& o = s.lineage.edge_origin[static_cast<std::size_t>(e)];
        if (o.dimension == 1) len[static_cast<std::size_t>(o.index)] += s.complex.edge_length(e);
    }
    for (int e = 0; e < x.edge_count(); ++e) EXPECT_NEAR(len[static_cast<std::size_t>(e)], x.edge_length(e), 1e-14);
}

TEST(Subdivide, NegativeLevelRejected) { EXPECT_THROW(subdivide(single_triangle(), -1), PreconditionViolation); }

TEST(Layout, ReproducesSideLengths) {
    auto x = corpus::gen_moore(3, 4, 3, corpus::moore_height(3, 1.0)).complex;
    for (int t = 0; t < x.triangle_count(); ++t) {
        auto c = x.layout(t);
        const auto& tr = x.triangle(t);
        for (int i = 0; i < 3; ++i) {
            const auto& a = c[static_cast<std::size_t>(i)];
            const auto& b = c[static_cast<std::size_t>((i + 1) % 3)];
            EXPECT_NEAR(std::hypot(a[0] - b[0], a[1] - b[1]), x.edge_length(tr.edges[i]), 1e-12);
        }
    }
}

TEST(Complex, ScaledAndWithLengths) {
    auto x = corpus::gen_torus(3).complex;
    auto y = x.scaled(2.5);
    EXPECT_NEAR(total_area(y), 6.25 * total_area(x), 1e-12);
    EXPECT_THROW(x.with_lengths({1.0}), DimensionMismatch);
    auto k4 = corpus::k4_one_face();
    int free_edge = -1;
    for (int e = 0; e < k4.edge_count(); ++e)
        if (k4.cofaces(e).empty()) free_edge = e;
    ASSERT_GE(free_edge, 0);
    auto smaller = k4.without_free_edge(free_edge);
    EXPECT_EQ(smaller.edge_count(), k4.edge_count() - 1);
    EXPECT_TRUE(validate(smaller).pass());
    EXPECT_THROW(k4.without_free_edge(0), PreconditionViolation);
}
