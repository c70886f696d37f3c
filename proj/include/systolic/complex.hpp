#pragma once

// Finite piecewise-flat triangulated 2-complexes.
//
// The metric lives entirely on edge lengths: every triangle is the flat
// triangle with its three side lengths. Triangles list their vertices
// (v0, v1, v2) and edges (v0v1, v1v2, v2v0); the sign of each edge records
// whether its stored direction agrees with the boundary orientation.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "systolic/errors.hpp"
#include "systolic/modp.hpp"

namespace systolic {

struct Edge {
    int tail = 0;
    int head = 0;
    double length = 0.0;

    int other(int v) const noexcept { return v == tail ? head : tail; }
};

struct Triangle {
    std::array<int, 3> vertices{};
    /// edges[i] joins vertices[i] and vertices[(i + 1) % 3].
    std::array<int, 3> edges{};
    /// +1 when edges[i] is stored as vertices[i] → vertices[i + 1], else −1.
    std::array<int, 3> signs{};
};

/// One entry of a vertex's adjacency list.
struct Incidence {
    int edge;
    int neighbor;
    bool forward;  // true when the vertex is the edge's tail
};

/// Flat-triangle area by Heron's formula in the cancellation-stable ordering.
inline double triangle_area(double a, double b, double c) {
    if (!(a > 0 && b > 0 && c > 0)) throw InvalidGeometry("triangle side lengths must be positive");
    std::array<double, 3> s{a, b, c};
    std::sort(s.begin(), s.end(), std::greater<>());
    const double x = s[0], y = s[1], z = s[2];
    if (!(x < y + z)) throw InvalidGeometry("side lengths violate the strict triangle inequality");
    const double prod = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
    return 0.25 * std::sqrt(prod);
}

inline bool strict_triangle_inequality(double a, double b, double c) {
    return a > 0 && b > 0 && c > 0 && a < b + c && b < a + c && c < a + b;
}

class TwoComplex;

/// Accumulates simplices; `build()` produces an immutable complex.
class ComplexBuilder {
public:
    explicit ComplexBuilder(int vertex_count = 0) : vertex_count_(vertex_count) {}

    int add_vertex() { return vertex_count_++; }
    int add_vertices(int n) {
        int first = vertex_count_;
        vertex_count_ += n;
        return first;
    }
    int add_edge(int tail, int head, double length) {
        edges_.push_back({tail, head, length});
        return static_cast<int>(edges_.size()) - 1;
    }
    /// Edges are given as (v0v1, v1v2, v2v0); orientation signs are derived.
    int add_triangle(int v0, int v1, int v2, int e01, int e12, int e20) {
        Triangle t;
        t.vertices = {v0, v1, v2};
        t.edges = {e01, e12, e20};
        for (int i = 0; i < 3; ++i) {
            int e = t.edges[i];
            if (e < 0 || e >= static_cast<int>(edges_.size()))
                throw IndexOutOfRange("triangle references unknown edge " + std::to_string(e));
            t.signs[i] = edges_[e].tail == t.vertices[i] ? 1 : -1;
        }
        triangles_.push_back(t);
        return static_cast<int>(triangles_.size()) - 1;
    }
    /// Adds the triangle, creating or reusing the edge for each vertex pair.
    int add_triangle_auto(int v0, int v1, int v2, double l01, double l12, double l20) {
        return add_triangle(v0, v1, v2, edge_between(v0, v1, l01), edge_between(v1, v2, l12),
                            edge_between(v2, v0, l20));
    }
    /// Returns the unique edge joining a and b, creating it if absent.
    int edge_between(int a, int b, double length) {
        auto key = std::minmax(a, b);
        auto it = pair_index_.find(key);
        if (it != pair_index_.end()) return it->second;
        int e = add_edge(a, b, length);
        pair_index_.emplace(key, e);
        return e;
    }

    int vertex_count() const noexcept { return vertex_count_; }
    std::vector<Edge>& edges() noexcept { return edges_; }

    TwoComplex build() const;

private:
    int vertex_count_;
    std::vector<Edge> edges_;
    std::vector<Triangle> triangles_;
    std::map<std::pair<int, int>, int> pair_index_;
};

struct Violation {
    enum class Kind { NonPositiveLength, TriangleInequality, DisconnectedSkeleton, EdgeTriangleMismatch, LoopEdge, BadIndex };
    Kind kind;
    /// Offending simplex: (dimension, index).
    int dimension;
    int index;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool pass() const noexcept { return violations.empty(); }
};

inline const char* to_string(Violation::Kind k) {
    switch (k) {
        case Violation::Kind::NonPositiveLength: return "non-positive-length";
        case Violation::Kind::TriangleInequality: return "triangle-inequality";
        case Violation::Kind::DisconnectedSkeleton: return "disconnected";
        case Violation::Kind::EdgeTriangleMismatch: return "edge-triangle-mismatch";
        case Violation::Kind::LoopEdge: return "loop-edge";
        case Violation::Kind::BadIndex: return "bad-index";
    }
    return "unknown";
}

/// Union-find with path halving.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[std::max(a, b)] = std::min(a, b);
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

/// Where a simplex of a subdivided complex came from: (dimension, index) in the original.
struct Origin {
    int dimension;
    int index;
};

struct Lineage {
    std::vector<Origin> vertex_origin;
    std::vector<Origin> edge_origin;
    std::vector<int> triangle_origin;
};

class TwoComplex {
public:
    TwoComplex() = default;

    int vertex_count() const noexcept { return vertex_count_; }
    int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    int triangle_count() const noexcept { return static_cast<int>(triangles_.size()); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    const Edge& edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }
    const Triangle& triangle(int t) const { return triangles_.at(static_cast<std::size_t>(t)); }
    const std::vector<Incidence>& incident(int v) const { return adjacency_.at(static_cast<std::size_t>(v)); }
    /// Triangles containing each edge.
    const std::vector<int>& cofaces(int e) const { return edge_triangles_.at(static_cast<std::size_t>(e)); }

    int euler_characteristic() const noexcept { return vertex_count_ - edge_count() + triangle_count(); }

    double edge_length(int e) const { return edge(e).length; }
    double triangle_area(int t) const {
        const auto& tr = triangle(t);
        return systolic::triangle_area(edge_length(tr.edges[0]), edge_length(tr.edges[1]),
                                       edge_length(tr.edges[2]));
    }
    double max_edge_length() const {
        double m = 0;
        for (const auto& e : edges_) m = std::max(m, e.length);
        return m;
    }

    /// Same combinatorics, every length multiplied by `factor`.
    TwoComplex scaled(double factor) const {
        TwoComplex out = *this;
        for (auto& e : out.edges_) e.length *= factor;
        return out;
    }
    /// Same combinatorics with replacement lengths.
    TwoComplex with_lengths(const std::vector<double>& lengths) const {
        if (lengths.size() != edges_.size()) throw DimensionMismatch("length vector size differs from edge count");
        TwoComplex out = *this;
        for (std::size_t i = 0; i < lengths.size(); ++i) out.edges_[i].length = lengths[i];
        return out;
    }
    /// Drops one edge that belongs to no triangle.
    TwoComplex without_free_edge(int e) const;

    /// Planar coordinates of a triangle's vertices: v0 at the origin, v1 on the x axis.
    std::array<std::array<double, 2>, 3> layout(int t) const {
        const auto& tr = triangle(t);
        const double a = edge_length(tr.edges[0]);  // v0v1
        const double b = edge_length(tr.edges[1]);  // v1v2
        const double c = edge_length(tr.edges[2]);  // v2v0
        const double x = (a * a + c * c - b * b) / (2 * a);
        const double y = std::sqrt(std::max(0.0, c * c - x * x));
        return {{{0.0, 0.0}, {a, 0.0}, {x, y}}};
    }

private:
    friend class ComplexBuilder;
    void index();

    int vertex_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<Triangle> triangles_;
    std::vector<std::vector<Incidence>> adjacency_;
    std::vector<std::vector<int>> edge_triangles_;
};

inline void TwoComplex::index() {
    adjacency_.assign(static_cast<std::size_t>(vertex_count_), {});
    edge_triangles_.assign(edges_.size(), {});
    for (int e = 0; e < edge_count(); ++e) {
        const auto& ed = edges_[static_cast<std::size_t>(e)];
        if (ed.tail < 0 || ed.tail >= vertex_count_ || ed.head < 0 || ed.head >= vertex_count_) continue;
        adjacency_[static_cast<std::size_t>(ed.tail)].push_back({e, ed.head, true});
        adjacency_[static_cast<std::size_t>(ed.head)].push_back({e, ed.tail, false});
    }
    for (int t = 0; t < triangle_count(); ++t)
        for (int e : triangles_[static_cast<std::size_t>(t)].edges)
            if (e >= 0 && e < edge_count()) edge_triangles_[static_cast<std::size_t>(e)].push_back(t);
}

inline TwoComplex ComplexBuilder::build() const {
    TwoComplex c;
    c.vertex_count_ = vertex_count_;
    c.edges_ = edges_;
    c.triangles_ = triangles_;
    c.index();
    return c;
}

inline TwoComplex TwoComplex::without_free_edge(int e) const {
    if (!cofaces(e).empty()) throw PreconditionViolation("edge " + std::to_string(e) + " bounds a triangle");
    TwoComplex out;
    out.vertex_count_ = vertex_count_;
    for (int i = 0; i < edge_count(); ++i)
        if (i != e) out.edges_.push_back(edges_[static_cast<std::size_t>(i)]);
    out.triangles_ = triangles_;
    for (auto& t : out.triangles_)
        for (auto& id : t.edges)
            if (id > e) --id;
    out.index();
    return out;
}

using ComplexPtr = std::shared_ptr<const TwoComplex>;

inline ComplexPtr share(TwoComplex c) { return std::make_shared<const TwoComplex>(std::move(c)); }

inline int component_count(const TwoComplex& x) {
    DisjointSets ds(static_cast<std::size_t>(x.vertex_count()));
    int comps = x.vertex_count();
    for (const auto& e : x.edges())
        if (ds.unite(static_cast<std::size_t>(e.tail), static_cast<std::size_t>(e.head))) --comps;
    return comps;
}

inline ValidationReport validate(const TwoComplex& x) {
    ValidationReport rep;
    using K = Violation::Kind;
    const int V = x.vertex_count();
    for (int e = 0; e < x.edge_count(); ++e) {
        const auto& ed = x.edge(e);
        if (ed.tail < 0 || ed.tail >= V || ed.head < 0 || ed.head >= V) {
            rep.violations.push_back({K::BadIndex, 1, e, "edge endpoint out of range"});
            continue;
        }
        if (!(ed.length > 0) || !std::isfinite(ed.length))
            rep.violations.push_back({K::NonPositiveLength, 1, e, "edge length must be positive"});
        if (ed.tail == ed.head) rep.violations.push_back({K::LoopEdge, 1, e, "edge joins a vertex to itself"});
    }
    for (int t = 0; t < x.triangle_count(); ++t) {
        const auto& tr = x.triangle(t);
        bool ok = true;
        for (int i = 0; i < 3; ++i) {
            int e = tr.edges[i];
            if (e < 0 || e >= x.edge_count()) {
                rep.violations.push_back({K::BadIndex, 2, t, "triangle edge out of range"});
                ok = false;
                continue;
            }
            const auto& ed = x.edge(e);
            int a = tr.vertices[i], b = tr.vertices[(i + 1) % 3];
            if (!((ed.tail == a && ed.head == b) || (ed.tail == b && ed.head == a))) {
                rep.violations.push_back({K::EdgeTriangleMismatch, 2, t,
                                          "edge " + std::to_string(e) + " does not join the triangle's vertices"});
                ok = false;
            }
        }
        if (tr.vertices[0] == tr.vertices[1] || tr.vertices[1] == tr.vertices[2] || tr.vertices[0] == tr.vertices[2]) {
            rep.violations.push_back({K::EdgeTriangleMismatch, 2, t, "triangle repeats a vertex"});
            ok = false;
        }
        if (ok && !strict_triangle_inequality(x.edge_length(tr.edges[0]), x.edge_length(tr.edges[1]),
                                              x.edge_length(tr.edges[2])))
            rep.violations.push_back({K::TriangleInequality, 2, t, "side lengths violate the strict triangle inequality"});
    }
    bool indices_ok = std::none_of(rep.violations.begin(), rep.violations.end(),
                                   [](const Violation& v) { return v.kind == K::BadIndex; });
    if (indices_ok && V > 0 && component_count(x) != 1)
        rep.violations.push_back({K::DisconnectedSkeleton, 0, 0, "1-skeleton is not connected"});
    return rep;
}

/// Throws InvalidGeometry naming the first violation.
inline void require_valid(const TwoComplex& x) {
    auto rep = validate(x);
    if (!rep.pass()) {
        const auto& v = rep.violations.front();
        throw InvalidGeometry(std::string(to_string(v.kind)) + " at simplex (" + std::to_string(v.dimension) + ", " +
                              std::to_string(v.index) + "): " + v.message);
    }
}

inline double total_area(const TwoComplex& x) {
    require_valid(x);
    double sum = 0;
    for (int t = 0; t < x.triangle_count(); ++t) sum += x.triangle_area(t);
    return sum;
}

// ---------------------------------------------------------------------------
// Chains and homology

/// A k-chain with Z_p coefficients; only nonzero coefficients are stored.
class ChainModP {
public:
    ChainModP(int dimension, modp::Prime p) : dimension_(dimension), p_(p) {
        if (dimension < 0 || dimension > 2) throw DimensionMismatch("chain dimension must be 0, 1 or 2");
    }
    int dimension() const noexcept { return dimension_; }
    const modp::Prime& prime() const noexcept { return p_; }
    void set(int simplex, std::int64_t coefficient) {
        auto c = p_.reduce(coefficient);
        if (c == 0)
            coeffs_.erase(simplex);
        else
            coeffs_[simplex] = c;
    }
    modp::Scalar coefficient(int simplex) const {
        auto it = coeffs_.find(simplex);
        return it == coeffs_.end() ? 0 : it->second;
    }
    const std::map<int, modp::Scalar>& terms() const noexcept { return coeffs_; }
    ChainModP scaled(modp::Scalar unit) const {
        ChainModP out(dimension_, p_);
        for (auto [s, c] : coeffs_) out.set(s, p_.mul(c, unit));
        return out;
    }

private:
    int dimension_;
    modp::Prime p_;
    std::map<int, modp::Scalar> coeffs_;
};

/// Area of a 2-chain counting each simplex with nonzero coefficient once.
inline double chain_area(const ChainModP& chain, const TwoComplex& x) {
    if (chain.dimension() != 2) throw DimensionMismatch("chain_area needs a 2-chain");
    double sum = 0;
    for (auto [t, c] : chain.terms()) {
        if (t < 0 || t >= x.triangle_count()) throw IndexOutOfRange("chain references unknown triangle " + std::to_string(t));
        sum += x.triangle_area(t);
    }
    return sum;
}

/// ∂₂ as sparse columns (one per triangle) over the edge index space.
inline std::vector<modp::SparseColumn> boundary2_columns(const TwoComplex& x, const modp::Prime& p) {
    std::vector<modp::SparseColumn> cols(static_cast<std::size_t>(x.triangle_count()));
    for (int t = 0; t < x.triangle_count(); ++t) {
        std::map<std::uint32_t, std::int64_t> acc;
        const auto& tr = x.triangle(t);
        for (int i = 0; i < 3; ++i) acc[static_cast<std::uint32_t>(tr.edges[i])] += tr.signs[i];
        for (auto [e, v] : acc) {
            auto r = p.reduce(v);
            if (r) cols[static_cast<std::size_t>(t)].emplace_back(e, r);
        }
    }
    return cols;
}

/// Dense ∂₁ (vertices × edges) and ∂₂ (edges × triangles), for small complexes and tests.
inline modp::MatrixModP boundary1_matrix(const TwoComplex& x, const modp::Prime& p) {
    modp::MatrixModP m(p, static_cast<std::size_t>(x.vertex_count()), static_cast<std::size_t>(x.edge_count()));
    for (int e = 0; e < x.edge_count(); ++e) {
        const auto& ed = x.edge(e);
        m.set(static_cast<std::size_t>(ed.head), static_cast<std::size_t>(e),
              p.add(m.at(static_cast<std::size_t>(ed.head), static_cast<std::size_t>(e)), 1));
        m.set(static_cast<std::size_t>(ed.tail), static_cast<std::size_t>(e),
              p.sub(m.at(static_cast<std::size_t>(ed.tail), static_cast<std::size_t>(e)), 1));
    }
    return m;
}

inline modp::MatrixModP boundary2_matrix(const TwoComplex& x, const modp::Prime& p) {
    modp::MatrixModP m(p, static_cast<std::size_t>(x.edge_count()), static_cast<std::size_t>(x.triangle_count()));
    auto cols = boundary2_columns(x, p);
    for (std::size_t t = 0; t < cols.size(); ++t)
        for (auto [e, v] : cols[t]) m.set(e, t, v);
    return m;
}

/// Coefficient field of a homology computation: the rationals or Z_p.
struct Coefficients {
    std::uint64_t prime = 0;  // 0 = rational
    static Coefficients rational() { return {0}; }
    static Coefficients mod(std::uint64_t p) { return {p}; }
    bool is_rational() const noexcept { return prime == 0; }
};

/// Rank of ∂₂ over the field. Rational ranks are taken modulo a 31-bit prime.
inline std::size_t boundary2_rank(const TwoComplex& x, Coefficients k) {
    modp::Prime p(k.is_rational() ? modp::kRationalProxyPrime : k.prime);
    return modp::reduce_columns(p, boundary2_columns(x, p), false).rank;
}

inline int betti0(const TwoComplex& x) { return component_count(x); }

inline int betti1(const TwoComplex& x, Coefficients k = Coefficients::rational()) {
    const int rank1 = x.vertex_count() - component_count(x);
    return x.edge_count() - rank1 - static_cast<int>(boundary2_rank(x, k));
}

inline int betti2(const TwoComplex& x, Coefficients k = Coefficients::rational()) {
    return x.triangle_count() - static_cast<int>(boundary2_rank(x, k));
}

// ---------------------------------------------------------------------------
// Midpoint subdivision

struct Subdivision {
    TwoComplex complex;
    /// Relates every simplex to the original (level-0) complex.
    Lineage lineage;
    /// For each edge of the previous level, its two halves: [0] starts at the tail.
    std::vector<std::array<int, 2>> last_halves;
};

namespace detail {

inline Subdivision subdivide_once(const TwoComplex& x, const Lineage& parent) {
    const int V = x.vertex_count();
    ComplexBuilder b(V + x.edge_count());
    Subdivision out;
    auto& lin = out.lineage;
    lin.vertex_origin = parent.vertex_origin;
    lin.vertex_origin.resize(static_cast<std::size_t>(V + x.edge_count()));
    out.last_halves.resize(static_cast<std::size_t>(x.edge_count()));
    for (int e = 0; e < x.edge_count(); ++e) {
        const auto& ed = x.edge(e);
        const int mid = V + e;
        lin.vertex_origin[static_cast<std::size_t>(mid)] = parent.edge_origin[static_cast<std::size_t>(e)];
        int h0 = b.add_edge(ed.tail, mid, ed.length / 2);
        int h1 = b.add_edge(mid, ed.head, ed.length / 2);
        out.last_halves[static_cast<std::size_t>(e)] = {h0, h1};
        lin.edge_origin.push_back(parent.edge_origin[static_cast<std::size_t>(e)]);
        lin.edge_origin.push_back(parent.edge_origin[static_cast<std::size_t>(e)]);
    }
    auto half_at = [&](int e, int v) {
        const auto& ed = x.edge(e);
        return ed.tail == v ? 2 * e : 2 * e + 1;
    };
    for (int t = 0; t < x.triangle_count(); ++t) {
        const auto& tr = x.triangle(t);
        const int v0 = tr.vertices[0], v1 = tr.vertices[1], v2 = tr.vertices[2];
        const int m0 = V + tr.edges[0], m1 = V + tr.edges[1], m2 = V + tr.edges[2];
        const double l0 = x.edge_length(tr.edges[0]), l1 = x.edge_length(tr.edges[1]), l2 = x.edge_length(tr.edges[2]);
        const Origin from{2, parent.triangle_origin[static_cast<std::size_t>(t)]};
        // Midsegments: m0m1 ∥ v0v2, m1m2 ∥ v0v1, m2m0 ∥ v1v2.
        int s01 = b.add_edge(m0, m1, l2 / 2);
        int s12 = b.add_edge(m1, m2, l0 / 2);
        int s20 = b.add_edge(m2, m0, l1 / 2);
        lin.edge_origin.insert(lin.edge_origin.end(), {from, from, from});
        b.add_triangle(v0, m0, m2, half_at(tr.edges[0], v0), s20, half_at(tr.edges[2], v0));
        b.add_triangle(m0, v1, m1, half_at(tr.edges[0], v1), half_at(tr.edges[1], v1), s01);
        b.add_triangle(m2, m1, v2, s12, half_at(tr.edges[1], v2), half_at(tr.edges[2], v2));
        b.add_triangle(m0, m1, m2, s01, s12, s20);
        for (int k = 0; k < 4; ++k) lin.triangle_origin.push_back(from.index);
    }
    out.complex = b.build();
    return out;
}

}  // namespace detail

inline Lineage identity_lineage(const TwoComplex& x) {
    Lineage l;
    for (int v = 0; v < x.vertex_count(); ++v) l.vertex_origin.push_back({0, v});
    for (int e = 0; e < x.edge_count(); ++e) l.edge_origin.push_back({1, e});
    for (int t = 0; t < x.triangle_count(); ++t) l.triangle_origin.push_back(t);
    return l;
}

/// `levels` rounds of medial subdivision. Vertex ids of every coarser level are
/// preserved, so a level-k vertex keeps its id at every finer level.
inline Subdivision subdivide(const TwoComplex& x, int levels) {
    if (levels < 0) throw PreconditionViolation("subdivision level must be nonnegative");
    Subdivision cur{x, identity_lineage(x), {}};
    for (int i = 0; i < levels; ++i) {
        auto next = detail::subdivide_once(cur.complex, cur.lineage);
        cur = std::move(next);
    }
    return cur;
}

}  // namespace systolic
