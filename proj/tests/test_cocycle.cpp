#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "systolic/cocycle.hpp"
#include "systolic/corpus.hpp"

using namespace systolic;
using fixtures::single_triangle;

namespace {

CocycleModP moore_generator(std::uint64_t p) {
    return corpus::gen_moore(p, 4, 3, corpus::moore_height(p, 1.0)).cocycle("generator");
}

TwoComplex moore(std::uint64_t p) { return corpus::gen_moore(p, 4, 3, corpus::moore_height(p, 1.0)).complex; }

// Torus meridian loop at row j: the horizontal edges (i, j) → (i+1, j).
EdgePath torus_row(int n, int j) {
    EdgePath loop;
    for (int i = 0; i < n; ++i) loop.push_back({3 * (i + n * j), true});
    return loop;
}

// Dense oracle: is the 2-cochain c in the image of δ¹?
bool dense_coboundary(const TwoComplex& x, const modp::Prime& p, const Cochain2& c) {
    return modp::solve(coboundary1_matrix(x, p), c).has_value();
}

}  // namespace

TEST(ValidateCocycle, Examples) {
    auto t = single_triangle();
    EXPECT_TRUE(validate_cocycle(t, CocycleModP::zero(modp::Prime(3), t)).pass());
    // Orient the labels so each edge contributes +1 along the boundary.
    std::vector<modp::Scalar> l3(3), l5(3);
    const auto& tr = t.triangle(0);
    for (int i = 0; i < 3; ++i) {
        l3[static_cast<std::size_t>(tr.edges[i])] = tr.signs[i] > 0 ? 1 : 2;
        l5[static_cast<std::size_t>(tr.edges[i])] = tr.signs[i] > 0 ? 1 : 4;
    }
    EXPECT_TRUE(validate_cocycle(t, CocycleModP(modp::Prime(3), l3)).pass());
    EXPECT_FALSE(validate_cocycle(t, CocycleModP(modp::Prime(5), l5)).pass());
    EXPECT_THROW(validate_cocycle(t, CocycleModP(modp::Prime(5), {1, 1})), DimensionMismatch);
}

TEST(ValidateCocycle, CorpusCocyclesAreCocycles) {
    for (const auto& [name, g] : fixtures::small_corpus())
        for (const auto& c : g.cocycles) EXPECT_TRUE(validate_cocycle(g.complex, c.cocycle).pass()) << name << " " << c.name;
}

TEST(Holonomy, TriangleBoundariesVanish) {
    for (const auto& [name, g] : fixtures::small_corpus())
        for (int t = 0; t < g.complex.triangle_count(); ++t) {
            const auto& tr = g.complex.triangle(t);
            EdgePath loop;
            for (int i = 0; i < 3; ++i) loop.push_back({tr.edges[i], tr.signs[i] > 0});
            EXPECT_EQ(holonomy(g.complex, g.cocycles.front().cocycle, loop), 0u) << name;
        }
}

TEST(Holonomy, TorusMeridian) {
    for (std::uint64_t p : {2ull, 3ull, 5ull}) {
        auto g = corpus::gen_torus(4, 1.0, p);
        const auto& mer = g.cocycle("meridian");
        const auto& lon = g.cocycle("longitude");
        for (int j = 0; j < 4; ++j) {
            auto loop = torus_row(4, j);
            EXPECT_EQ(holonomy(g.complex, mer, loop), 1u);
            EXPECT_EQ(holonomy(g.complex, lon, loop), 0u);
            auto twice = loop;
            twice.insert(twice.end(), loop.begin(), loop.end());
            EXPECT_EQ(holonomy(g.complex, mer, twice), 2u % p);
            EXPECT_EQ(holonomy(g.complex, mer, reversed(loop)), static_cast<modp::Scalar>(p - 1));
        }
    }
}

TEST(Holonomy, RejectsOpenPaths) {
    auto g = corpus::gen_torus(4);
    EdgePath open{{0, true}};
    EXPECT_THROW(holonomy(g.complex, g.cocycle("meridian"), open), InvalidPath);
    EdgePath gap{{0, true}, {6, true}};
    EXPECT_THROW(holonomy(g.complex, g.cocycle("meridian"), gap), InvalidPath);
}

TEST(Holonomy, InvariantUnderCoboundaries) {
    std::mt19937_64 rng(17);
    for (const auto& [name, g] : fixtures::small_corpus()) {
        const auto& a = g.cocycles.front().cocycle;
        auto shifted = a.plus(fixtures::random_coboundary(g.complex, a.prime(), rng()));
        for (int k = 0; k < 20; ++k) {
            auto loop = fixtures::random_closed_walk(g.complex, static_cast<int>(rng() % g.complex.vertex_count()), 15, rng);
            EXPECT_EQ(holonomy(g.complex, a, loop), holonomy(g.complex, shifted, loop)) << name;
        }
    }
}

TEST(Coboundary, Examples) {
    auto t = corpus::gen_torus(4);
    auto z = is_coboundary(t.complex, CocycleModP::zero(modp::Prime(2), t.complex));
    ASSERT_TRUE(z.has_value());
    EXPECT_TRUE(std::all_of(z->begin(), z->end(), [](modp::Scalar s) { return s == 0; }));
    EXPECT_FALSE(is_coboundary(t.complex, t.cocycle("meridian")).has_value());

    modp::Prime p(5);
    std::mt19937_64 rng(2);
    modp::Vector f(static_cast<std::size_t>(t.complex.vertex_count()));
    for (auto& v : f) v = static_cast<modp::Scalar>(rng() % 5);
    auto df = coboundary0(t.complex, p, f);
    auto g = is_coboundary(t.complex, df);
    ASSERT_TRUE(g.has_value());
    // Equal up to a global constant.
    const auto shift = p.sub((*g)[0], f[0]);
    for (std::size_t v = 0; v < f.size(); ++v) EXPECT_EQ((*g)[v], p.add(f[v], shift));
    EXPECT_EQ(coboundary0(t.complex, p, *g), df);
}

TEST(Bockstein, Examples) {
    auto t = single_triangle();
    EXPECT_TRUE(bockstein_class(t, CocycleModP::zero(modp::Prime(3), t)).trivial);
    for (std::uint64_t p : {2ull, 3ull, 5ull}) {
        auto x = moore(p);
        auto b = bockstein_class(x, moore_generator(p));
        EXPECT_FALSE(b.trivial) << p;
        EXPECT_FALSE(dense_coboundary(x, modp::Prime(p), b.cochain)) << p;
        // H²(M; Z_p) is one-dimensional, so β spans it.
        EXPECT_EQ(betti2(x, Coefficients::mod(p)), 1);
    }
}

TEST(Bockstein, OfCoboundaryIsTrivial) {
    std::mt19937_64 rng(9);
    for (const auto& [name, g] : fixtures::small_corpus()) {
        const auto p = g.cocycles.front().cocycle.prime();
        for (int k = 0; k < 5; ++k) {
            auto df = fixtures::random_coboundary(g.complex, p, rng());
            auto b = bockstein_class(g.complex, df);
            EXPECT_TRUE(b.trivial) << name;
            EXPECT_TRUE(dense_coboundary(g.complex, p, b.cochain)) << name;
        }
    }
}

TEST(CupSquare, Examples) {
    auto t = single_triangle();
    auto z = cup_square(t, CocycleModP::zero(modp::Prime(2), t));
    EXPECT_TRUE(z.trivial);

    auto rp2 = fixtures::rp2();
    auto basis = cohomology_basis(rp2, modp::Prime(2));
    ASSERT_EQ(basis.size(), 1u);
    auto c = cup_square(rp2, basis[0]);
    EXPECT_FALSE(c.trivial);
    EXPECT_FALSE(dense_coboundary(rp2, modp::Prime(2), c.cochain));

    auto m3 = moore(3);
    auto cm = cup_square(m3, moore_generator(3));
    EXPECT_TRUE(cm.trivial);
    EXPECT_TRUE(dense_coboundary(m3, modp::Prime(3), cm.cochain));
}

TEST(CupSquare, ClassIndependentOfVertexOrder) {
    std::mt19937_64 rng(4);
    std::vector<std::pair<TwoComplex, CocycleModP>> cases;
    auto rp2 = fixtures::rp2();
    cases.emplace_back(rp2, cohomology_basis(rp2, modp::Prime(2))[0]);
    for (std::uint64_t p : {2ull, 3ull}) cases.emplace_back(moore(p), moore_generator(p));
    auto t = corpus::gen_torus(3, 1.0, 2);
    cases.emplace_back(t.complex, t.cocycle("meridian").plus(t.cocycle("longitude")));
    for (const auto& [x, a] : cases) {
        const bool base = cup_square(x, a).trivial;
        for (int k = 0; k < 2; ++k) {
            std::vector<int> order(static_cast<std::size_t>(x.vertex_count()));
            std::iota(order.begin(), order.end(), 0);
            std::shuffle(order.begin(), order.end(), rng);
            EXPECT_EQ(cup_square(x, a, order).trivial, base);
        }
    }
}

TEST(Essential, Examples) {
    for (std::uint64_t p : {2ull, 3ull, 5ull}) {
        auto x = moore(p);
        auto cert = essential_certificate(x, moore_generator(p));
        EXPECT_TRUE(cert.essential()) << p;
        EXPECT_EQ(cert.source, "bockstein");
        EXPECT_TRUE(verify_certificate(x, modp::Prime(p), cert));
    }
    auto c = corpus::gen_circle(5);
    EXPECT_FALSE(essential_certificate(c.complex, c.cocycle("generator")).essential());
    auto t = corpus::gen_torus(4);
    auto tc = essential_certificate(t.complex, t.cocycle("meridian"));
    EXPECT_FALSE(tc.essential());
    EXPECT_FALSE(verify_certificate(t.complex, modp::Prime(2), tc));
    EXPECT_TRUE(cup_square(t.complex, t.cocycle("meridian")).trivial);

    auto rp2 = fixtures::rp2();
    auto rc = essential_certificate(rp2, cohomology_basis(rp2, modp::Prime(2))[0]);
    EXPECT_TRUE(rc.essential());
    EXPECT_TRUE(verify_certificate(rp2, modp::Prime(2), rc));
}

TEST(Essential, InvariantUnderSubdivision) {
    for (const auto& [name, g] : fixtures::small_corpus()) {
        const auto& a = g.cocycles.front().cocycle;
        const bool base = essential_certificate(g.complex, a).essential();
        for (int k = 1; k <= 2; ++k) {
            auto rc = subdivide_with_cocycle(g.complex, a, k);
            EXPECT_TRUE(validate_cocycle(rc.refined.complex, rc.cocycle).pass()) << name;
            EXPECT_EQ(essential_certificate(rc.refined.complex, rc.cocycle).essential(), base) << name << " level " << k;
        }
    }
}

TEST(Refinement, LabelsSumAlongSplitEdges) {
    auto g = corpus::gen_moore(3, 4, 2, corpus::moore_height(3, 1.0));
    const auto& a = g.cocycle("generator");
    auto rc = subdivide_with_cocycle(g.complex, a, 1);
    for (int e = 0; e < g.complex.edge_count(); ++e) {
        auto [h0, h1] = rc.refined.last_halves[static_cast<std::size_t>(e)];
        EXPECT_EQ(rc.cocycle.label(h0), a.label(e));
        EXPECT_EQ(rc.cocycle.label(h1), 0u);
    }
    std::mt19937_64 rng(8);
    for (int k = 0; k < 30; ++k) {
        auto loop = fixtures::random_closed_walk(g.complex, 0, 12, rng);
        EdgePath fine;
        for (const auto& s : loop) {
            auto [h0, h1] = rc.refined.last_halves[static_cast<std::size_t>(s.edge)];
            if (s.forward)
                fine.insert(fine.end(), {{h0, true}, {h1, true}});
            else
                fine.insert(fine.end(), {{h1, false}, {h0, false}});
        }
        EXPECT_EQ(holonomy(rc.refined.complex, rc.cocycle, fine), holonomy(g.complex, a, loop));
    }
}

TEST(Classes, Enumerate) {
    auto t = corpus::gen_torus(4);
    auto tc = enumerate_classes(t.complex, modp::Prime(2));
    EXPECT_EQ(tc.size(), 4u);
    EXPECT_TRUE(tc.front().is_zero());
    EXPECT_EQ(enumerate_classes(moore(3), modp::Prime(3)).size(), 3u);
    EXPECT_EQ(enumerate_classes(single_triangle(), modp::Prime(5)).size(), 1u);
    EXPECT_EQ(enumerate_classes(corpus::gen_torus(3).complex, modp::Prime(5)).size(), 25u);
}

TEST(Classes, DistinctAndValid) {
    auto t = corpus::gen_torus(3, 1.0, 3);
    auto cls = enumerate_classes(t.complex, modp::Prime(3));
    ASSERT_EQ(cls.size(), 9u);
    for (std::size_t i = 0; i < cls.size(); ++i) {
        EXPECT_TRUE(validate_cocycle(t.complex, cls[i]).pass());
        EXPECT_EQ(is_coboundary(t.complex, cls[i]).has_value(), i == 0);
        for (std::size_t j = i + 1; j < cls.size(); ++j) {
            // Distinct classes differ by a non-coboundary.
            auto diff = cls[i].plus(cls[j].times(2));
            EXPECT_FALSE(is_coboundary(t.complex, diff).has_value());
        }
    }
}

TEST(Classes, CapRefusesHugeGroups) {
    // Wedge of 20 circles: H¹ = (Z_2)^20 > 10⁶.
    ComplexBuilder b(1 + 20);
    for (int i = 0; i < 20; ++i) {
        b.add_edge(0, 1 + i, 1);
        b.add_edge(1 + i, 0, 1);
    }
    EXPECT_THROW(enumerate_classes(b.build(), modp::Prime(2)), SizeCapExceeded);
}

TEST(Cover, MooreCover) {
    auto x = moore(3);
    auto cover = build_cyclic_cover(x, moore_generator(3));
    EXPECT_EQ(cover.complex.vertex_count(), 3 * x.vertex_count());
    EXPECT_TRUE(validate(cover.complex).pass());
    EXPECT_NEAR(total_area(cover.complex) / total_area(x), 3.0, 1e-9);
    EXPECT_EQ(component_count(cover.complex), 1);
}

TEST(Cover, TorusDoubleCover) {
    auto t = corpus::gen_torus(4);
    auto cover = build_cyclic_cover(t.complex, t.cocycle("meridian"));
    EXPECT_EQ(component_count(cover.complex), 1);
    EXPECT_TRUE(validate(cover.complex).pass());
    EXPECT_EQ(betti1(cover.complex), 2);
    for (int v = 0; v < cover.complex.vertex_count(); ++v) {
        EXPECT_EQ(cover.base_vertex(cover.deck_shift(v)), cover.base_vertex(v));
        EXPECT_NE(cover.deck_shift(v), v);
    }
}

TEST(Cover, ZeroCocycleRejected) {
    auto t = corpus::gen_torus(3);
    EXPECT_THROW(build_cyclic_cover(t.complex, CocycleModP::zero(modp::Prime(2), t.complex)), TrivialCocycle);
}

TEST(Cover, LoopsLiftClosedIffHolonomyVanishes) {
    std::mt19937_64 rng(100);
    for (const auto& [name, g] : fixtures::small_corpus()) {
        const auto& a = g.cocycles.front().cocycle;
        if (is_coboundary(g.complex, a)) continue;
        auto cover = build_cyclic_cover(g.complex, a);
        for (int k = 0; k < 100; ++k) {
            const int start = static_cast<int>(rng() % g.complex.vertex_count());
            auto loop = fixtures::random_closed_walk(g.complex, start, 1 + static_cast<int>(rng() % 20), rng);
            const int sheet = static_cast<int>(rng() % cover.sheets);
            auto lifted = lift_path(cover, a, loop, sheet);
            ASSERT_EQ(lifted.size(), loop.size());
            for (std::size_t i = 0; i + 1 < lifted.size(); ++i)
                EXPECT_EQ(step_head(cover.complex, lifted[i]), step_tail(cover.complex, lifted[i + 1]));
            const bool closed = lifted.empty() ||
                                step_head(cover.complex, lifted.back()) == step_tail(cover.complex, lifted.front());
            EXPECT_EQ(closed, holonomy(g.complex, a, loop) == 0) << name;
            EXPECT_EQ(lift_endpoint_sheet(g.complex, a, loop, sheet) == sheet, closed);
        }
    }
}

TEST(PathLength, CanonicalLengthIgnoresTraversalOrder) {
    ComplexBuilder b(2);
    const double ls[] = {0.1, 0.7, 1e-9, 0.3, 0.2};
    for (double l : ls) b.add_edge(0, 1, l);
    auto x = b.build();
    EdgePath p{{0, true}, {1, false}, {2, true}, {3, false}, {4, true}, {0, false}};
    EdgePath q(p.rbegin(), p.rend());
    std::swap(q[1], q[4]);
    EXPECT_EQ(canonical_length(x, p), canonical_length(x, q));
    EXPECT_NEAR(canonical_length(x, p), path_length(x, p), 1e-15);
}
