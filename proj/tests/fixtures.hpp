#pragma once

// Small hand-built complexes and independent oracles shared by the unit tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "systolic/cocycle.hpp"
#include "systolic/complex.hpp"
#include "systolic/corpus.hpp"

namespace fixtures {

using namespace systolic;

inline TwoComplex single_triangle(double a = 1, double b = 1, double c = 1) {
    ComplexBuilder bl(3);
    bl.add_triangle_auto(0, 1, 2, a, b, c);
    return bl.build();
}

/// Unit square [0,1]² split along (0,0)-(1,1). Vertices: 0=(0,0) 1=(1,0) 2=(1,1) 3=(0,1).
inline TwoComplex unit_square() {
    ComplexBuilder b(4);
    b.add_triangle_auto(0, 1, 2, 1, 1, std::sqrt(2.0));
    b.add_triangle_auto(0, 2, 3, std::sqrt(2.0), 1, 1);
    return b.build();
}

inline std::vector<double> square_x() { return {0, 1, 1, 0}; }

/// Six-vertex real projective plane with unit edges.
inline TwoComplex rp2() {
    ComplexBuilder b(6);
    const int tris[10][3] = {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 1},
                             {1, 2, 4}, {2, 3, 5}, {3, 4, 1}, {4, 5, 2}, {5, 1, 3}};
    for (const auto& t : tris) b.add_triangle_auto(t[0], t[1], t[2], 1, 1, 1);
    return b.build();
}

inline TwoComplex path_graph() {
    ComplexBuilder b(3);
    b.add_edge(0, 1, 1);
    b.add_edge(1, 2, 1);
    return b.build();
}

/// Two loops of three unit edges sharing vertex 0, no triangles.
inline TwoComplex two_circle_graph() {
    ComplexBuilder b(5);
    b.add_edge(0, 1, 1);
    b.add_edge(1, 2, 1);
    b.add_edge(2, 0, 1);
    b.add_edge(0, 3, 1);
    b.add_edge(3, 4, 1);
    b.add_edge(4, 0, 1);
    return b.build();
}

/// Random potential δ⁰f of a seed.
inline CocycleModP random_coboundary(const TwoComplex& x, modp::Prime p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    modp::Vector f(static_cast<std::size_t>(x.vertex_count()));
    for (auto& v : f) v = static_cast<modp::Scalar>(rng() % p.value());
    return coboundary0(x, p, f);
}

/// Random closed walk from `start`: a random walk of `steps` edges, closed by a
/// breadth-first path back.
inline EdgePath random_closed_walk(const TwoComplex& x, int start, int steps, std::mt19937_64& rng) {
    EdgePath path;
    int u = start;
    for (int i = 0; i < steps; ++i) {
        const auto& inc = x.incident(u);
        if (inc.empty()) break;
        const auto& pick = inc[rng() % inc.size()];
        path.push_back({pick.edge, pick.forward});
        u = pick.neighbor;
    }
    std::vector<int> via(static_cast<std::size_t>(x.vertex_count()), -2);
    std::vector<int> q{u};
    via[static_cast<std::size_t>(u)] = -1;
    for (std::size_t h = 0; h < q.size(); ++h)
        for (const auto& inc : x.incident(q[h]))
            if (via[static_cast<std::size_t>(inc.neighbor)] == -2) {
                via[static_cast<std::size_t>(inc.neighbor)] = inc.edge;
                q.push_back(inc.neighbor);
            }
    EdgePath back;
    for (int v = start; v != u;) {
        int e = via[static_cast<std::size_t>(v)];
        const auto& ed = x.edge(e);
        int prev = ed.other(v);
        back.push_back({e, ed.tail == prev});
        v = prev;
    }
    std::reverse(back.begin(), back.end());
    path.insert(path.end(), back.begin(), back.end());
    return path;
}

/// Integer Smith normal form diagonal (nonzero invariant factors), small inputs only.
inline std::vector<std::int64_t> smith_diagonal(std::vector<std::vector<std::int64_t>> a) {
    std::vector<std::int64_t> diag;
    const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    std::size_t t = 0;
    while (t < rows && t < cols) {
        // Pivot: smallest nonzero |entry| in the trailing block.
        std::size_t pr = rows, pc = cols;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j)
                if (a[i][j] != 0 && (pr == rows || std::llabs(a[i][j]) < std::llabs(a[pr][pc]))) pr = i, pc = j;
        if (pr == rows) break;
        std::swap(a[t], a[pr]);
        for (auto& row : a) std::swap(row[t], row[pc]);
        bool clean = false;
        while (!clean) {
            clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                std::int64_t q = a[i][t] / a[t][t];
                if (q)
                    for (std::size_t j = t; j < cols; ++j) a[i][j] -= q * a[t][j];
                if (a[i][t] != 0) {
                    std::swap(a[t], a[i]);
                    clean = false;
                }
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                std::int64_t q = a[t][j] / a[t][t];
                if (q)
                    for (std::size_t i = t; i < rows; ++i) a[i][j] -= q * a[i][t];
                if (a[t][j] != 0) {
                    for (auto& row : a) std::swap(row[t], row[j]);
                    clean = false;
                }
            }
            if (clean) {
                // Divisibility condition on the trailing block.
                for (std::size_t i = t + 1; i < rows && clean; ++i)
                    for (std::size_t j = t + 1; j < cols && clean; ++j)
                        if (a[i][j] % a[t][t] != 0) {
                            for (std::size_t k = t; k < cols; ++k) a[t][k] += a[i][k];
                            clean = false;
                        }
            }
        }
        diag.push_back(std::llabs(a[t][t]));
        ++t;
    }
    return diag;
}

/// Integer ∂₂ of a complex (edges × triangles).
inline std::vector<std::vector<std::int64_t>> integer_boundary2(const TwoComplex& x) {
    std::vector<std::vector<std::int64_t>> m(static_cast<std::size_t>(x.edge_count()),
                                             std::vector<std::int64_t>(static_cast<std::size_t>(x.triangle_count()), 0));
    for (int t = 0; t < x.triangle_count(); ++t) {
        const auto& tr = x.triangle(t);
        for (int i = 0; i < 3; ++i) m[static_cast<std::size_t>(tr.edges[i])][static_cast<std::size_t>(t)] += tr.signs[i];
    }
    return m;
}

/// Named corpus instances with their default cocycle, built from the corpus specs.
inline std::vector<std::pair<std::string, corpus::Generated>> small_corpus() {
    std::vector<std::pair<std::string, corpus::Generated>> out;
    out.emplace_back("torus-n4", corpus::gen_torus(4));
    out.emplace_back("circle-n5", corpus::gen_circle(5));
    for (std::uint64_t p : {2ull, 3ull, 5ull}) {
        corpus::CorpusSpec s;
        s.family = "moore";
        s.p = p;
        out.emplace_back(corpus::spec_id(s), corpus::materialize(s));
        s.family = "wedge";
        out.emplace_back(corpus::spec_id(s), corpus::materialize(s));
    }
    out.emplace_back("dumbbell", corpus::gen_dumbbell());
    return out;
}

}  // namespace fixtures
