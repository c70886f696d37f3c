#pragma once

// Deterministic test complexes with known topology and canonical cocycles.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "systolic/cocycle.hpp"
#include "systolic/complex.hpp"

namespace systolic::corpus {

struct NamedCocycle {
    std::string name;
    CocycleModP cocycle;
};

struct Generated {
    TwoComplex complex;
    std::vector<NamedCocycle> cocycles;
    /// Distinguished vertices (wedge points, basepoints); meaning depends on the family.
    std::vector<int> marked;

    const CocycleModP& cocycle(const std::string& name) const {
        for (const auto& c : cocycles)
            if (c.name == name) return c.cocycle;
        throw PreconditionViolation("no cocycle named " + name);
    }
};

// ---------------------------------------------------------------------------
// Generators

/// n×n grid of squares with widths 1/n and aspect/n, each split along (i,j)→(i+1,j+1).
/// Vertex (i,j) has id i + n·j. The meridian cocycle counts wraps in i, the longitude wraps in j.
inline Generated gen_torus(int n, double aspect = 1.0, std::uint64_t p = 2) {
    if (n < 2) throw PreconditionViolation("torus grid needs n >= 2");
    if (!(aspect > 0)) throw InvalidGeometry("torus aspect must be positive");
    const modp::Prime prime(p);
    ComplexBuilder b(n * n);
    auto id = [n](int i, int j) { return ((i % n + n) % n) + n * ((j % n + n) % n); };
    const double w = 1.0 / n, h = aspect / n, d = std::hypot(w, h);
    std::vector<int> hor(static_cast<std::size_t>(n * n)), ver(hor.size()), diag(hor.size());
    std::vector<modp::Scalar> mer, lon;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            auto k = static_cast<std::size_t>(id(i, j));
            hor[k] = b.add_edge(id(i, j), id(i + 1, j), w);
            mer.push_back(i == n - 1);
            lon.push_back(0);
            ver[k] = b.add_edge(id(i, j), id(i, j + 1), h);
            mer.push_back(0);
            lon.push_back(j == n - 1);
            diag[k] = b.add_edge(id(i, j), id(i + 1, j + 1), d);
            mer.push_back(i == n - 1);
            lon.push_back(j == n - 1);
        }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            auto k = static_cast<std::size_t>(id(i, j));
            b.add_triangle(id(i, j), id(i + 1, j), id(i + 1, j + 1), hor[k], ver[static_cast<std::size_t>(id(i + 1, j))],
                           diag[k]);
            b.add_triangle(id(i, j), id(i + 1, j + 1), id(i, j + 1), diag[k], hor[static_cast<std::size_t>(id(i, j + 1))],
                           ver[k]);
        }
    Generated g{b.build(), {}, {0}};
    g.cocycles.push_back({"meridian", CocycleModP(prime, std::move(mer))});
    g.cocycles.push_back({"longitude", CocycleModP(prime, std::move(lon))});
    return g;
}

/// Polygonal circle with n edges; the generator labels the edge n−1 → 0.
inline Generated gen_circle(int n, double length = 1.0, std::uint64_t p = 2) {
    if (n < 2) throw PreconditionViolation("circle needs n >= 2");
    const modp::Prime prime(p);
    ComplexBuilder b(n);
    std::vector<modp::Scalar> gen;
    for (int i = 0; i < n; ++i) {
        b.add_edge(i, (i + 1) % n, length / n);
        gen.push_back(i == n - 1);
    }
    Generated g{b.build(), {}, {0}};
    g.cocycles.push_back({"generator", CocycleModP(prime, std::move(gen))});
    return g;
}

/// Cone height giving a disk of the given shape: shape·p/(2π).
inline double moore_height(std::uint64_t p, double shape) { return shape * static_cast<double>(p) / (2 * std::numbers::pi); }

/// Moore complex M(Z_p): a circle of length 1 (n edges) and a flat cone disk of
/// height `height` whose boundary (p·n chords of length 1/n) wraps the circle p
/// times. The disk has `rings` concentric rings; ring k sits at radius height·k/rings.
/// Vertex ids: circle 0..n−1, inner rings next, apex last. Marked: c₀ and the apex.
inline Generated gen_moore(std::uint64_t p, int n, int rings, double height, double scale = 1.0) {
    if (p < 2) throw InvalidModulus("Moore complex needs p >= 2");
    const modp::Prime prime(p);
    if (n < 3) throw PreconditionViolation("Moore complex needs n >= 3");
    if (rings < 1) throw PreconditionViolation("Moore complex needs at least one ring");
    if (!(height > 0.5 / n)) throw InvalidGeometry("cone height must exceed 1/(2n)");
    const int P = static_cast<int>(p), m = P * n;
    const double delta = 2 * std::asin(1.0 / (2 * height * n));
    const int apex = n + (rings - 1) * m;
    auto vid = [&](int k, int j) {
        j = ((j % m) + m) % m;
        if (k == 0) return apex;
        if (k == rings) return j % n;
        return n + (k - 1) * m + j;
    };
    auto rho = [&](int k) { return height * k / rings; };
    auto pot = [&](int k, int j) -> std::int64_t { return k == 0 ? 0 : (((j % m) + m) % m) / n; };
    ComplexBuilder b(apex + 1);
    std::vector<modp::Scalar> gen;
    auto edge = [&](int k0, int j0, int k1, int j1, double len) {
        gen.push_back(prime.reduce(pot(k1, j1) - pot(k0, j0)));
        return b.add_edge(vid(k0, j0), vid(k1, j1), len * scale);
    };
    // Circle edges double as the outer chords: position j uses circle edge j mod n.
    for (int i = 0; i < n; ++i) edge(rings, i, rings, i + 1, 1.0 / n);
    std::vector<std::vector<int>> chord(static_cast<std::size_t>(rings + 1), std::vector<int>(static_cast<std::size_t>(m)));
    std::vector<std::vector<int>> radial = chord, diag = chord;
    for (int k = 1; k < rings; ++k)
        for (int j = 0; j < m; ++j) chord[k][j] = edge(k, j, k, j + 1, (static_cast<double>(k) / rings) / n);
    for (int j = 0; j < m; ++j) chord[rings][j] = j % n;
    for (int k = 0; k < rings; ++k)
        for (int j = 0; j < m; ++j) radial[k][j] = edge(k, j, k + 1, j, height / rings);
    for (int k = 1; k < rings; ++k)
        for (int j = 0; j < m; ++j) {
            double a = rho(k), c = rho(k + 1);
            diag[k][j] = edge(k, j, k + 1, j + 1, std::sqrt(a * a + c * c - 2 * a * c * std::cos(delta)));
        }
    for (int j = 0; j < m; ++j) b.add_triangle(apex, vid(1, j), vid(1, j + 1), radial[0][j], chord[1][j], radial[0][(j + 1) % m]);
    for (int k = 1; k < rings; ++k)
        for (int j = 0; j < m; ++j) {
            int jn = (j + 1) % m;
            b.add_triangle(vid(k, j), vid(k + 1, j), vid(k + 1, j + 1), radial[k][j], chord[k + 1][j], diag[k][j]);
            b.add_triangle(vid(k, j), vid(k + 1, j + 1), vid(k, j + 1), diag[k][j], radial[k][jn], chord[k][j]);
        }
    Generated g{b.build(), {}, {0, apex}};
    g.cocycles.push_back({"generator", CocycleModP(prime, std::move(gen))});
    return g;
}

/// Wedge of the parts at one marked vertex each (`wedge_points[i]` in part i).
/// Cocycles are extended by zero and renamed "<part>:<name>". Marked: the wedge
/// point, then each part's marked vertices in the new numbering.
inline Generated gen_wedge(const std::vector<Generated>& parts, const std::vector<int>& wedge_points) {
    if (parts.empty() || parts.size() != wedge_points.size())
        throw DimensionMismatch("wedge needs one wedge point per part");
    ComplexBuilder b;
    std::vector<std::vector<int>> vmap(parts.size()), emap(parts.size());
    int hub = -1;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto& x = parts[i].complex;
        if (wedge_points[i] < 0 || wedge_points[i] >= x.vertex_count()) throw IndexOutOfRange("wedge point out of range");
        for (int v = 0; v < x.vertex_count(); ++v) {
            if (v == wedge_points[i] && hub >= 0) {
                vmap[i].push_back(hub);
                continue;
            }
            int nv = b.add_vertex();
            if (v == wedge_points[i]) hub = nv;
            vmap[i].push_back(nv);
        }
        for (const auto& e : x.edges()) emap[i].push_back(b.add_edge(vmap[i][e.tail], vmap[i][e.head], e.length));
        for (const auto& t : x.triangles())
            b.add_triangle(vmap[i][t.vertices[0]], vmap[i][t.vertices[1]], vmap[i][t.vertices[2]], emap[i][t.edges[0]],
                           emap[i][t.edges[1]], emap[i][t.edges[2]]);
    }
    Generated g{b.build(), {}, {hub}};
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (int v : parts[i].marked) g.marked.push_back(vmap[i][static_cast<std::size_t>(v)]);
        for (const auto& c : parts[i].cocycles) {
            std::vector<modp::Scalar> labels(static_cast<std::size_t>(g.complex.edge_count()), 0);
            for (std::size_t e = 0; e < emap[i].size(); ++e) labels[static_cast<std::size_t>(emap[i][e])] = c.cocycle.label(static_cast<int>(e));
            g.cocycles.push_back({std::to_string(i) + ":" + c.name, CocycleModP(c.cocycle.prime(), std::move(labels))});
        }
    }
    return g;
}

/// Regular octahedron with unit edges. Vertices: 0 = north, 1 = south, 2..5 = equator.
inline TwoComplex octahedron(double edge = 1.0) {
    ComplexBuilder b(6);
    for (int i = 0; i < 4; ++i) {
        int e = 2 + i, f = 2 + (i + 1) % 4;
        b.add_triangle_auto(0, e, f, edge, edge, edge);
        b.add_triangle_auto(1, f, e, edge, edge, edge);
    }
    return b.build();
}

/// Two unit octahedra A and B joined by tubes A.N–B.N and A.S–B.S, with a scaled
/// Moore complex M(Z_p) wedged at an equatorial vertex of B. The cocycle "phi"
/// is the Moore generator plus 1 on the first tube. Marked: A.N, A.S, B.N, B.S.
inline Generated gen_dumbbell(std::uint64_t p = 3, double tube = 2.0, double moore_scale = 12.0) {
    auto oct = octahedron();
    auto moore = gen_moore(p, 4, 2, moore_height(p, 1.0), moore_scale);
    ComplexBuilder b;
    std::vector<int> A, B;
    auto copy = [&](const TwoComplex& x, std::vector<int>& vmap) {
        for (int v = 0; v < x.vertex_count(); ++v) vmap.push_back(b.add_vertex());
        std::vector<int> emap;
        for (const auto& e : x.edges()) emap.push_back(b.add_edge(vmap[e.tail], vmap[e.head], e.length));
        for (const auto& t : x.triangles())
            b.add_triangle(vmap[t.vertices[0]], vmap[t.vertices[1]], vmap[t.vertices[2]], emap[t.edges[0]], emap[t.edges[1]],
                           emap[t.edges[2]]);
        return emap;
    };
    copy(oct, A);
    copy(oct, B);
    const int tube1 = b.add_edge(A[0], B[0], tube);
    b.add_edge(A[1], B[1], tube);
    const std::size_t before = b.edges().size();
    std::vector<int> M;
    const auto& mx = moore.complex;
    for (int v = 0; v < mx.vertex_count(); ++v) M.push_back(v == 0 ? B[2] : b.add_vertex());
    std::vector<int> memap;
    for (const auto& e : mx.edges()) memap.push_back(b.add_edge(M[e.tail], M[e.head], e.length));
    for (const auto& t : mx.triangles())
        b.add_triangle(M[t.vertices[0]], M[t.vertices[1]], M[t.vertices[2]], memap[t.edges[0]], memap[t.edges[1]],
                       memap[t.edges[2]]);
    Generated g{b.build(), {}, {A[0], A[1], B[0], B[1]}};
    const modp::Prime prime(p);
    std::vector<modp::Scalar> labels(static_cast<std::size_t>(g.complex.edge_count()), 0);
    labels[static_cast<std::size_t>(tube1)] = 1;
    const auto& mg = moore.cocycle("generator");
    for (std::size_t e = 0; e < memap.size(); ++e) labels[before + e] = mg.label(static_cast<int>(e));
    g.cocycles.push_back({"phi", CocycleModP(prime, std::move(labels))});
    return g;
}

/// Theta graph: two vertices joined by edges of the given lengths.
inline TwoComplex theta_graph(const std::vector<double>& lengths) {
    ComplexBuilder b(2);
    for (double l : lengths) b.add_edge(0, 1, l);
    return b.build();
}

/// Complete graph K₄ with unit edges and the triangle (0,1,2) filled.
inline TwoComplex k4_one_face() {
    ComplexBuilder b(4);
    b.add_triangle_auto(0, 1, 2, 1, 1, 1);
    b.edge_between(0, 3, 1);
    b.edge_between(1, 3, 1);
    b.edge_between(2, 3, 1);
    return b.build();
}

// ---------------------------------------------------------------------------
// Random metrics

/// 64-bit LCG with Knuth's MMIX constants; doubles take the top 53 bits.
class Lcg64 {
public:
    static constexpr std::uint64_t kMultiplier = 6364136223846793005ull;
    static constexpr std::uint64_t kIncrement = 1442695040888963407ull;

    explicit Lcg64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        state_ = state_ * kMultiplier + kIncrement;
        return state_;
    }
    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

inline constexpr int kPerturbAttempts = 100;

/// Multiplies each edge length by 1 + amplitude·(2u − 1). An edge whose new
/// length breaks a strict triangle inequality is resampled; after 100 failures
/// it keeps its length.
inline TwoComplex perturb_metric(const TwoComplex& x, std::uint64_t seed, double amplitude) {
    if (!(amplitude >= 0 && amplitude < 0.3)) throw PreconditionViolation("perturbation amplitude must lie in [0, 0.3)");
    std::vector<double> len(static_cast<std::size_t>(x.edge_count()));
    for (int e = 0; e < x.edge_count(); ++e) len[static_cast<std::size_t>(e)] = x.edge_length(e);
    if (amplitude == 0) return x.with_lengths(len);
    Lcg64 rng(seed);
    auto faces_ok = [&](int e) {
        for (int t : x.cofaces(e)) {
            const auto& tr = x.triangle(t);
            if (!strict_triangle_inequality(len[static_cast<std::size_t>(tr.edges[0])], len[static_cast<std::size_t>(tr.edges[1])],
                                            len[static_cast<std::size_t>(tr.edges[2])]))
                return false;
        }
        return true;
    };
    for (int e = 0; e < x.edge_count(); ++e) {
        const double original = len[static_cast<std::size_t>(e)];
        bool accepted = false;
        for (int attempt = 0; attempt < kPerturbAttempts && !accepted; ++attempt) {
            len[static_cast<std::size_t>(e)] = original * (1 + amplitude * (2 * rng.uniform() - 1));
            accepted = faces_ok(e);
        }
        if (!accepted) len[static_cast<std::size_t>(e)] = original;
    }
    auto out = x.with_lengths(len);
    require_valid(out);
    return out;
}

// ---------------------------------------------------------------------------
// Specs

struct Expected {
    std::optional<int> b1_rational;
    std::optional<int> b1_mod_p;
    std::optional<bool> essential;
    std::optional<double> systole;
};

struct CorpusSpec {
    std::string id;
    /// torus | moore | circle | wedge | dumbbell
    std::string family = "moore";
    std::uint64_t p = 2;
    int n = 4;
    int rings = 3;
    /// Moore cone shape: height = shape·p/(2π).
    double shape = 1.0;
    double aspect = 1.0;
    /// Length of the circle factor of a wedge.
    double length = 1.0;
    double scale = 1.0;
    std::uint64_t seed = 0;
    double amplitude = 0;
    /// Cocycle name; empty selects the family default.
    std::string cocycle;
    Expected expected;
};

/// Default cocycle name of a family.
inline std::string default_cocycle(const std::string& family) {
    if (family == "torus") return "meridian";
    if (family == "wedge") return "0:generator";
    if (family == "dumbbell") return "phi";
    return "generator";
}

inline std::vector<std::string> families() { return {"torus", "moore", "circle", "wedge", "dumbbell"}; }

/// Topological invariants of a family, independent of metric parameters.
inline Expected expected_for(const CorpusSpec& s) {
    Expected e;
    if (s.family == "torus") {
        e = {2, 2, false, std::nullopt};
        if (s.amplitude == 0) e.systole = s.scale;
    } else if (s.family == "moore") {
        e = {0, 1, true, std::nullopt};
    } else if (s.family == "circle") {
        e = {1, 1, false, std::nullopt};
        if (s.amplitude == 0) e.systole = s.length * s.scale;
    } else if (s.family == "wedge") {
        e = {1, 2, true, std::nullopt};
    } else if (s.family == "dumbbell") {
        e = {1, 2, true, std::nullopt};
    }
    return e;
}

/// Builds the instance described by `s` (perturbed when amplitude > 0).
inline Generated materialize(const CorpusSpec& s) {
    Generated g = [&] {
        if (s.family == "torus") return gen_torus(s.n, s.aspect, s.p);
        if (s.family == "moore") return gen_moore(s.p, s.n, s.rings, moore_height(s.p, s.shape));
        if (s.family == "circle") return gen_circle(s.n, s.length, s.p);
        if (s.family == "wedge") {
            auto m = gen_moore(s.p, s.n, s.rings, moore_height(s.p, s.shape));
            auto c = gen_circle(std::max(2, s.n), s.length, s.p);
            return gen_wedge({m, c}, {0, 0});
        }
        if (s.family == "dumbbell") return gen_dumbbell(s.p);
        throw ConfigError("unknown family '" + s.family + "'");
    }();
    if (s.scale != 1.0) g.complex = g.complex.scaled(s.scale);
    if (s.amplitude > 0) g.complex = perturb_metric(g.complex, s.seed, s.amplitude);
    return g;
}

inline const CocycleModP& selected_cocycle(const Generated& g, const CorpusSpec& s) {
    return g.cocycle(s.cocycle.empty() ? default_cocycle(s.family) : s.cocycle);
}

/// Label used in reports, e.g. "moore-p3-s1.6" or "moore-p3-s1.6#17".
inline std::string spec_id(const CorpusSpec& s) {
    if (!s.id.empty()) return s.id;
    std::string out = s.family + "-p" + std::to_string(s.p);
    if (s.family == "moore" || s.family == "wedge") {
        char buf[32];
        std::snprintf(buf, sizeof buf, "-s%g", s.shape);
        out += buf;
    }
    if (s.family == "torus") out += "-n" + std::to_string(s.n);
    if (s.amplitude > 0) out += "#" + std::to_string(s.seed);
    return out;
}

inline constexpr double kCampaignShapes[] = {0.6, 1.0, 1.6};
inline constexpr std::uint64_t kCampaignPrimes[] = {2, 3, 5};

/// Moore p ∈ {2,3,5} × three cone shapes, Moore∨S¹ wedges, each with `perturbations`
/// random metrics of the given amplitude.
inline std::vector<CorpusSpec> default_campaign(int perturbations = 50, double amplitude = 0.1) {
    std::vector<CorpusSpec> base;
    for (auto p : kCampaignPrimes) {
        for (double shape : kCampaignShapes) {
            CorpusSpec s;
            s.family = "moore";
            s.p = p;
            s.shape = shape;
            base.push_back(s);
        }
        CorpusSpec w;
        w.family = "wedge";
        w.p = p;
        base.push_back(w);
    }
    std::vector<CorpusSpec> out;
    for (std::size_t i = 0; i < base.size(); ++i) {
        auto& s = base[i];
        s.expected = expected_for(s);
        out.push_back(s);
        for (int k = 0; k < perturbations; ++k) {
            CorpusSpec q = s;
            q.seed = 1000u * (i + 1) + static_cast<std::uint64_t>(k);
            q.amplitude = amplitude;
            out.push_back(q);
        }
    }
    return out;
}

}  // namespace systolic::corpus
