#pragma once

// Z_p-valued cellular 1-cocycles: holonomy, cohomology classes, cup squares,
// Bockstein classes, essentialness certificates and cyclic covers.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "systolic/complex.hpp"
#include "systolic/modp.hpp"

namespace systolic {

/// Label per edge, read in the edge's stored direction; the reversed edge carries −label.
class CocycleModP {
public:
    CocycleModP(modp::Prime p, std::vector<modp::Scalar> labels) : p_(p), labels_(std::move(labels)) {
        for (auto& l : labels_) l = static_cast<modp::Scalar>(l % p_.value());
    }
    static CocycleModP zero(modp::Prime p, const TwoComplex& x) {
        return CocycleModP(p, std::vector<modp::Scalar>(static_cast<std::size_t>(x.edge_count()), 0));
    }

    const modp::Prime& prime() const noexcept { return p_; }
    const std::vector<modp::Scalar>& labels() const noexcept { return labels_; }
    std::size_t size() const noexcept { return labels_.size(); }
    modp::Scalar label(int e) const { return labels_.at(static_cast<std::size_t>(e)); }
    modp::Scalar label(int e, bool forward) const { return forward ? label(e) : p_.neg(label(e)); }

    CocycleModP plus(const CocycleModP& o) const {
        check_same(o);
        auto out = labels_;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = p_.add(out[i], o.labels_[i]);
        return CocycleModP(p_, std::move(out));
    }
    CocycleModP times(modp::Scalar k) const {
        auto out = labels_;
        for (auto& l : out) l = p_.mul(l, k);
        return CocycleModP(p_, std::move(out));
    }
    bool is_zero() const {
        return std::all_of(labels_.begin(), labels_.end(), [](modp::Scalar l) { return l == 0; });
    }
    friend bool operator==(const CocycleModP& a, const CocycleModP& b) {
        return a.p_ == b.p_ && a.labels_ == b.labels_;
    }

private:
    void check_same(const CocycleModP& o) const {
        if (!(o.p_ == p_) || o.labels_.size() != labels_.size())
            throw DimensionMismatch("cocycles live on different primes or complexes");
    }
    modp::Prime p_;
    std::vector<modp::Scalar> labels_;
};

/// One traversal of an edge; `forward` follows the stored direction.
struct Step {
    int edge;
    bool forward;
    friend bool operator==(const Step& a, const Step& b) { return a.edge == b.edge && a.forward == b.forward; }
};
using EdgePath = std::vector<Step>;

inline int step_tail(const TwoComplex& x, const Step& s) { return s.forward ? x.edge(s.edge).tail : x.edge(s.edge).head; }
inline int step_head(const TwoComplex& x, const Step& s) { return s.forward ? x.edge(s.edge).head : x.edge(s.edge).tail; }

inline EdgePath reversed(EdgePath path) {
    std::reverse(path.begin(), path.end());
    for (auto& s : path) s.forward = !s.forward;
    return path;
}

/// Throws InvalidPath unless consecutive steps meet and the path closes up.
inline void require_closed(const TwoComplex& x, const EdgePath& path) {
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (path[i].edge < 0 || path[i].edge >= x.edge_count())
            throw InvalidPath("path references unknown edge " + std::to_string(path[i].edge));
    }
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (step_head(x, path[i]) != step_tail(x, path[i + 1]))
            throw InvalidPath("steps " + std::to_string(i) + " and " + std::to_string(i + 1) + " are not adjacent");
    if (!path.empty() && step_head(x, path.back()) != step_tail(x, path.front()))
        throw InvalidPath("path does not close up");
}

inline double path_length(const TwoComplex& x, const EdgePath& path) {
    double s = 0;
    for (const auto& st : path) s += x.edge_length(st.edge);
    return s;
}

/// Length summed in ascending order, so loops with the same edge multiset get
/// bit-identical lengths whatever their traversal order.
inline double canonical_length(const TwoComplex& x, const EdgePath& path) {
    std::vector<double> ls;
    ls.reserve(path.size());
    for (const auto& st : path) ls.push_back(x.edge_length(st.edge));
    std::sort(ls.begin(), ls.end());
    double s = 0;
    for (double l : ls) s += l;
    return s;
}

inline void require_labels(const TwoComplex& x, const CocycleModP& a) {
    if (a.size() != static_cast<std::size_t>(x.edge_count()))
        throw DimensionMismatch("cocycle has " + std::to_string(a.size()) + " labels for " +
                                std::to_string(x.edge_count()) + " edges");
}

/// Signed label sum around triangle t (the coboundary value).
inline modp::Scalar triangle_coboundary(const TwoComplex& x, const CocycleModP& a, int t) {
    const auto& tr = x.triangle(t);
    modp::Scalar s = 0;
    for (int i = 0; i < 3; ++i) s = a.prime().add(s, a.label(tr.edges[i], tr.signs[i] > 0));
    return s;
}

inline ValidationReport validate_cocycle(const TwoComplex& x, const CocycleModP& a) {
    require_labels(x, a);
    ValidationReport rep;
    for (int t = 0; t < x.triangle_count(); ++t)
        if (triangle_coboundary(x, a, t) != 0)
            rep.violations.push_back({Violation::Kind::EdgeTriangleMismatch, 2, t,
                                      "label sum around triangle is " + std::to_string(triangle_coboundary(x, a, t))});
    return rep;
}

inline modp::Scalar holonomy(const TwoComplex& x, const CocycleModP& a, const EdgePath& loop) {
    require_labels(x, a);
    require_closed(x, loop);
    modp::Scalar h = 0;
    for (const auto& s : loop) h = a.prime().add(h, a.label(s.edge, s.forward));
    return h;
}

/// δ⁰f: the label of u→v is f(v) − f(u).
inline CocycleModP coboundary0(const TwoComplex& x, modp::Prime p, const modp::Vector& potential) {
    if (potential.size() != static_cast<std::size_t>(x.vertex_count()))
        throw DimensionMismatch("potential size differs from vertex count");
    std::vector<modp::Scalar> labels(static_cast<std::size_t>(x.edge_count()));
    for (int e = 0; e < x.edge_count(); ++e) {
        const auto& ed = x.edge(e);
        labels[static_cast<std::size_t>(e)] = p.sub(potential[static_cast<std::size_t>(ed.head)] % p.value(),
                                                    potential[static_cast<std::size_t>(ed.tail)] % p.value());
    }
    return CocycleModP(p, std::move(labels));
}

/// Integrates α along a breadth-first forest restricted to `edge_ok`; returns
/// the potential when every allowed edge is consistent with it.
template <class EdgeFilter>
std::optional<modp::Vector> integrate_potential(const TwoComplex& x, const CocycleModP& a, EdgeFilter edge_ok,
                                                std::vector<int> roots = {}) {
    const auto& p = a.prime();
    const auto V = static_cast<std::size_t>(x.vertex_count());
    modp::Vector f(V, 0);
    std::vector<bool> seen(V, false);
    if (roots.empty())
        for (int v = 0; v < x.vertex_count(); ++v) roots.push_back(v);
    std::deque<int> queue;
    for (int root : roots) {
        if (seen[static_cast<std::size_t>(root)]) continue;
        seen[static_cast<std::size_t>(root)] = true;
        queue.push_back(root);
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (const auto& inc : x.incident(u)) {
                if (!edge_ok(inc.edge) || seen[static_cast<std::size_t>(inc.neighbor)]) continue;
                seen[static_cast<std::size_t>(inc.neighbor)] = true;
                f[static_cast<std::size_t>(inc.neighbor)] = p.add(f[static_cast<std::size_t>(u)], a.label(inc.edge, inc.forward));
                queue.push_back(inc.neighbor);
            }
        }
    }
    for (int e = 0; e < x.edge_count(); ++e) {
        if (!edge_ok(e)) continue;
        const auto& ed = x.edge(e);
        if (p.sub(f[static_cast<std::size_t>(ed.head)], f[static_cast<std::size_t>(ed.tail)]) != a.label(e))
            return std::nullopt;
    }
    return f;
}

/// A potential f with δ⁰f = α, or nullopt when α has nonzero holonomy somewhere.
inline std::optional<modp::Vector> is_coboundary(const TwoComplex& x, const CocycleModP& a) {
    require_labels(x, a);
    return integrate_potential(x, a, [](int) { return true; });
}

// ---------------------------------------------------------------------------
// 2-cochains and 2-cycles

/// One value per triangle.
using Cochain2 = modp::Vector;

inline Cochain2 coboundary1(const TwoComplex& x, const CocycleModP& c) {
    require_labels(x, c);
    Cochain2 out(static_cast<std::size_t>(x.triangle_count()));
    for (int t = 0; t < x.triangle_count(); ++t) out[static_cast<std::size_t>(t)] = triangle_coboundary(x, c, t);
    return out;
}

/// Basis of the 2-cycles Z₂(X; Z_p) = ker ∂₂.
inline std::vector<modp::SparseColumn> two_cycles(const TwoComplex& x, const modp::Prime& p) {
    return modp::reduce_columns(p, boundary2_columns(x, p), true).kernel;
}

inline modp::Scalar pair(const modp::Prime& p, const Cochain2& c, const modp::SparseColumn& z) {
    modp::Scalar s = 0;
    for (auto [t, v] : z) s = p.add(s, p.mul(c[t], v));
    return s;
}

/// A 2-cochain is a coboundary iff it annihilates every 2-cycle (im δ¹ = (ker ∂₂)^⊥
/// over a field). Returns a 2-cycle with nonzero pairing when it is not.
inline std::optional<modp::SparseColumn> coboundary_obstruction(const TwoComplex& x, const modp::Prime& p,
                                                                const Cochain2& c) {
    if (c.size() != static_cast<std::size_t>(x.triangle_count())) throw DimensionMismatch("2-cochain size mismatch");
    if (std::all_of(c.begin(), c.end(), [](modp::Scalar v) { return v == 0; })) return std::nullopt;
    for (auto& z : two_cycles(x, p))
        if (pair(p, c, z) != 0) return z;
    return std::nullopt;
}

/// δ¹ as a dense triangles × edges matrix, for direct solves on small complexes.
inline modp::MatrixModP coboundary1_matrix(const TwoComplex& x, const modp::Prime& p) {
    modp::MatrixModP m(p, static_cast<std::size_t>(x.triangle_count()), static_cast<std::size_t>(x.edge_count()));
    for (int t = 0; t < x.triangle_count(); ++t) {
        const auto& tr = x.triangle(t);
        for (int i = 0; i < 3; ++i) {
            auto r = static_cast<std::size_t>(t), c = static_cast<std::size_t>(tr.edges[i]);
            m.set(r, c, p.add(m.at(r, c), p.reduce(tr.signs[i])));
        }
    }
    return m;
}

struct ClassTest {
    Cochain2 cochain;
    bool trivial;  // the class vanishes in H²
    /// When nontrivial: a 2-cycle z with ⟨cochain, z⟩ ≠ 0, so δ¹c = cochain has no solution.
    std::optional<modp::SparseColumn> obstruction;
};

inline ClassTest test_class(const TwoComplex& x, const modp::Prime& p, Cochain2 c) {
    auto obs = coboundary_obstruction(x, p, c);
    bool trivial = !obs.has_value();
    return {std::move(c), trivial, std::move(obs)};
}

/// Bockstein of α for 0 → Z_p → Z_{p²} → Z_p → 0: lift labels to {0,…,p−1},
/// take the integer coboundary, divide by p, reduce.
inline ClassTest bockstein_class(const TwoComplex& x, const CocycleModP& a) {
    require_labels(x, a);
    const auto& p = a.prime();
    const auto P = static_cast<std::int64_t>(p.value());
    Cochain2 beta(static_cast<std::size_t>(x.triangle_count()));
    for (int t = 0; t < x.triangle_count(); ++t) {
        const auto& tr = x.triangle(t);
        std::int64_t sum = 0;
        for (int i = 0; i < 3; ++i) sum += tr.signs[i] * static_cast<std::int64_t>(a.label(tr.edges[i]));
        if (sum % P != 0) throw PreconditionViolation("labels are not a cocycle at triangle " + std::to_string(t));
        beta[static_cast<std::size_t>(t)] = p.reduce(sum / P);
    }
    return test_class(x, p, std::move(beta));
}

/// α ∪ α with the simplicial convention (α∪α)(w₀w₁w₂) = α(w₀w₁)·α(w₁w₂) on
/// triangles sorted by `vertex_rank` (defaults to vertex index), signed by the
/// parity of the sort against the stored orientation.
inline ClassTest cup_square(const TwoComplex& x, const CocycleModP& a, const std::vector<int>& vertex_rank = {}) {
    require_labels(x, a);
    const auto& p = a.prime();
    auto rank_of = [&](int v) { return vertex_rank.empty() ? v : vertex_rank.at(static_cast<std::size_t>(v)); };
    Cochain2 cup(static_cast<std::size_t>(x.triangle_count()));
    for (int t = 0; t < x.triangle_count(); ++t) {
        const auto& tr = x.triangle(t);
        std::array<int, 3> pos{0, 1, 2};
        std::sort(pos.begin(), pos.end(), [&](int i, int j) { return rank_of(tr.vertices[i]) < rank_of(tr.vertices[j]); });
        // Label of the triangle's edge from local vertex i to local vertex j.
        auto edge_label = [&](int i, int j) {
            for (int k = 0; k < 3; ++k) {
                if (k == i && (k + 1) % 3 == j) return a.label(tr.edges[k], tr.signs[k] > 0);
                if (k == j && (k + 1) % 3 == i) return a.label(tr.edges[k], tr.signs[k] < 0);
            }
            return modp::Scalar{0};
        };
        modp::Scalar v = p.mul(edge_label(pos[0], pos[1]), edge_label(pos[1], pos[2]));
        // Sorted order is an even permutation of (0,1,2) iff it is a rotation.
        bool even = (pos[1] == (pos[0] + 1) % 3);
        cup[static_cast<std::size_t>(t)] = even ? v : p.neg(v);
    }
    return test_class(x, p, std::move(cup));
}

struct EssentialCertificate {
    enum class Verdict { Essential, Inconclusive };
    Verdict verdict = Verdict::Inconclusive;
    /// Which obstruction fired: "bockstein" or "cup-square".
    std::string source;
    Cochain2 representative;
    modp::SparseColumn obstruction;
    bool essential() const noexcept { return verdict == Verdict::Essential; }
};

/// Sufficient test: a nonzero pullback of a degree-2 class of K(Z_p,1)
/// (the Bockstein of α, or α² when p = 2) keeps the classifying map off the 1-skeleton.
inline EssentialCertificate essential_certificate(const TwoComplex& x, const CocycleModP& a) {
    EssentialCertificate cert;
    auto b = bockstein_class(x, a);
    if (!b.trivial) {
        cert.verdict = EssentialCertificate::Verdict::Essential;
        cert.source = "bockstein";
        cert.representative = std::move(b.cochain);
        cert.obstruction = std::move(*b.obstruction);
        return cert;
    }
    if (a.prime().value() == 2) {
        auto c = cup_square(x, a);
        if (!c.trivial) {
            cert.verdict = EssentialCertificate::Verdict::Essential;
            cert.source = "cup-square";
            cert.representative = std::move(c.cochain);
            cert.obstruction = std::move(*c.obstruction);
        }
    }
    return cert;
}

/// Re-checks an Essential verdict: the obstruction is a 2-cycle pairing nontrivially.
inline bool verify_certificate(const TwoComplex& x, const modp::Prime& p, const EssentialCertificate& cert) {
    if (!cert.essential()) return false;
    auto cols = boundary2_columns(x, p);
    std::vector<modp::Scalar> boundary(static_cast<std::size_t>(x.edge_count()), 0);
    for (auto [t, v] : cert.obstruction)
        for (auto [e, w] : cols[t]) boundary[e] = p.add(boundary[e], p.mul(v, w));
    bool is_cycle = std::all_of(boundary.begin(), boundary.end(), [](modp::Scalar s) { return s == 0; });
    return is_cycle && pair(p, cert.representative, cert.obstruction) != 0;
}

// ---------------------------------------------------------------------------
// Cohomology classes

/// Spanning-forest edges found by breadth-first search from vertex 0.
inline std::vector<bool> spanning_tree_edges(const TwoComplex& x) {
    std::vector<bool> tree(static_cast<std::size_t>(x.edge_count()), false);
    std::vector<bool> seen(static_cast<std::size_t>(x.vertex_count()), false);
    std::deque<int> q;
    for (int root = 0; root < x.vertex_count(); ++root) {
        if (seen[static_cast<std::size_t>(root)]) continue;
        seen[static_cast<std::size_t>(root)] = true;
        q.push_back(root);
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            for (const auto& inc : x.incident(u)) {
                if (seen[static_cast<std::size_t>(inc.neighbor)]) continue;
                seen[static_cast<std::size_t>(inc.neighbor)] = true;
                tree[static_cast<std::size_t>(inc.edge)] = true;
                q.push_back(inc.neighbor);
            }
        }
    }
    return tree;
}

/// Basis of H¹(X; Z_p): cocycles vanishing on a spanning tree, one per class.
inline std::vector<CocycleModP> cohomology_basis(const TwoComplex& x, modp::Prime p) {
    auto tree = spanning_tree_edges(x);
    std::vector<int> free_edges;
    std::vector<int> column(static_cast<std::size_t>(x.edge_count()), -1);
    for (int e = 0; e < x.edge_count(); ++e)
        if (!tree[static_cast<std::size_t>(e)]) {
            column[static_cast<std::size_t>(e)] = static_cast<int>(free_edges.size());
            free_edges.push_back(e);
        }
    modp::MatrixModP m(p, static_cast<std::size_t>(x.triangle_count()), free_edges.size());
    for (int t = 0; t < x.triangle_count(); ++t) {
        const auto& tr = x.triangle(t);
        for (int i = 0; i < 3; ++i) {
            int c = column[static_cast<std::size_t>(tr.edges[i])];
            if (c < 0) continue;
            auto r = static_cast<std::size_t>(t);
            m.set(r, static_cast<std::size_t>(c), p.add(m.at(r, static_cast<std::size_t>(c)), p.reduce(tr.signs[i])));
        }
    }
    std::vector<CocycleModP> basis;
    for (auto& v : modp::kernel_basis(m)) {
        std::vector<modp::Scalar> labels(static_cast<std::size_t>(x.edge_count()), 0);
        for (std::size_t k = 0; k < free_edges.size(); ++k) labels[static_cast<std::size_t>(free_edges[k])] = v[k];
        basis.emplace_back(p, std::move(labels));
    }
    return basis;
}

inline constexpr std::uint64_t kMaxEnumeratedClasses = 1'000'000;

/// One representative per element of H¹(X; Z_p), the zero class first.
inline std::vector<CocycleModP> enumerate_classes(const TwoComplex& x, modp::Prime p) {
    auto basis = cohomology_basis(x, p);
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        count *= p.value();
        if (count > kMaxEnumeratedClasses)
            throw SizeCapExceeded("H^1 has " + std::to_string(p.value()) + "^" + std::to_string(basis.size()) +
                                  " elements, more than the enumeration cap");
    }
    std::vector<CocycleModP> out;
    out.reserve(count);
    std::vector<modp::Scalar> digits(basis.size(), 0);
    for (std::uint64_t n = 0; n < count; ++n) {
        auto c = CocycleModP::zero(p, x);
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (digits[i]) c = c.plus(basis[i].times(digits[i]));
        out.push_back(std::move(c));
        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (++digits[i] < p.value()) break;
            digits[i] = 0;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Refinement transport

struct RefinedCocycle {
    Subdivision refined;
    CocycleModP cocycle;
};

/// Subdivides and carries α along: a split edge gives its label to the half at
/// its tail and 0 to the other; midsegments are fixed by the corner triangles.
inline RefinedCocycle subdivide_with_cocycle(const TwoComplex& x, const CocycleModP& a, int levels) {
    require_labels(x, a);
    const auto& p = a.prime();
    Subdivision cur{x, identity_lineage(x), {}};
    CocycleModP alpha = a;
    for (int level = 0; level < levels; ++level) {
        auto next = detail::subdivide_once(cur.complex, cur.lineage);
        const auto& y = next.complex;
        std::vector<modp::Scalar> labels(static_cast<std::size_t>(y.edge_count()), 0);
        std::vector<bool> known(labels.size(), false);
        for (int e = 0; e < cur.complex.edge_count(); ++e) {
            auto [h0, h1] = next.last_halves[static_cast<std::size_t>(e)];
            labels[static_cast<std::size_t>(h0)] = alpha.label(e);
            known[static_cast<std::size_t>(h0)] = known[static_cast<std::size_t>(h1)] = true;
        }
        // Child triangles come in groups of four; the first three are corners.
        for (int t = 0; t < y.triangle_count(); ++t) {
            if (t % 4 == 3) continue;
            const auto& tr = y.triangle(t);
            int unknown = -1;
            modp::Scalar sum = 0;
            for (int i = 0; i < 3; ++i) {
                int e = tr.edges[i];
                if (!known[static_cast<std::size_t>(e)]) {
                    unknown = i;
                    continue;
                }
                modp::Scalar l = labels[static_cast<std::size_t>(e)];
                sum = p.add(sum, tr.signs[i] > 0 ? l : p.neg(l));
            }
            if (unknown < 0) continue;
            int e = tr.edges[unknown];
            modp::Scalar needed = p.neg(sum);
            labels[static_cast<std::size_t>(e)] = tr.signs[unknown] > 0 ? needed : p.neg(needed);
            known[static_cast<std::size_t>(e)] = true;
        }
        alpha = CocycleModP(p, std::move(labels));
        cur = std::move(next);
    }
    return {std::move(cur), std::move(alpha)};
}

// ---------------------------------------------------------------------------
// Cyclic covers

struct CoveringComplex {
    TwoComplex complex;
    int sheets = 0;
    /// Cover vertex (v, k) has id v·p + k; cover edge over e starting on sheet k has id e·p + k;
    /// cover triangle over t whose first vertex sits on sheet k has id t·p + k.
    int vertex(int base_vertex, int sheet) const { return base_vertex * sheets + sheet; }
    int base_vertex(int cover_vertex) const { return cover_vertex / sheets; }
    int sheet(int cover_vertex) const { return cover_vertex % sheets; }
    int base_edge(int cover_edge) const { return cover_edge / sheets; }
    int base_triangle(int cover_triangle) const { return cover_triangle / sheets; }
    /// Deck transformation by +1 on vertices.
    int deck_shift(int cover_vertex) const {
        return vertex(base_vertex(cover_vertex), (sheet(cover_vertex) + 1) % sheets);
    }
};

/// The p-fold cyclic cover defined by α: (u, k) → (v, k + α(u→v)).
inline CoveringComplex build_cyclic_cover(const TwoComplex& x, const CocycleModP& a) {
    require_labels(x, a);
    if (!validate_cocycle(x, a).pass()) throw PreconditionViolation("labels do not form a cocycle");
    if (is_coboundary(x, a))
        throw TrivialCocycle("cocycle is a coboundary: every loop has zero holonomy and the cover is disconnected");
    const int p = static_cast<int>(a.prime().value());
    ComplexBuilder b(x.vertex_count() * p);
    for (int e = 0; e < x.edge_count(); ++e) {
        const auto& ed = x.edge(e);
        const int g = static_cast<int>(a.label(e));
        for (int k = 0; k < p; ++k) b.add_edge(ed.tail * p + k, ed.head * p + (k + g) % p, ed.length);
    }
    for (int t = 0; t < x.triangle_count(); ++t) {
        const auto& tr = x.triangle(t);
        for (int k = 0; k < p; ++k) {
            std::array<int, 3> sheet{};
            sheet[0] = k;
            for (int i = 0; i < 2; ++i)
                sheet[i + 1] = static_cast<int>((sheet[i] + a.label(tr.edges[i], tr.signs[i] > 0)) % p);
            std::array<int, 3> ids{};
            for (int i = 0; i < 3; ++i) {
                // The lifted edge is indexed by the sheet of its stored tail.
                int tail_sheet = tr.signs[i] > 0 ? sheet[i] : sheet[(i + 1) % 3];
                ids[i] = tr.edges[i] * p + tail_sheet;
            }
            b.add_triangle(tr.vertices[0] * p + sheet[0], tr.vertices[1] * p + sheet[1],
                           tr.vertices[2] * p + sheet[2], ids[0], ids[1], ids[2]);
        }
    }
    return {b.build(), p};
}

/// Lifts a path starting at (tail, start_sheet); returns the final sheet.
inline int lift_endpoint_sheet(const TwoComplex& x, const CocycleModP& a, const EdgePath& path, int start_sheet) {
    require_labels(x, a);
    const auto p = static_cast<int>(a.prime().value());
    int sheet = start_sheet;
    for (const auto& s : path) sheet = static_cast<int>((sheet + a.label(s.edge, s.forward)) % p);
    return sheet;
}

/// Lifts a path into the cover as a sequence of cover steps.
inline EdgePath lift_path(const CoveringComplex& cover, const CocycleModP& a,
                          const EdgePath& path, int start_sheet) {
    EdgePath out;
    const int p = cover.sheets;
    int sheet = start_sheet;
    for (const auto& s : path) {
        int next = static_cast<int>((sheet + a.label(s.edge, s.forward)) % p);
        int tail_sheet = s.forward ? sheet : next;
        out.push_back({s.edge * p + tail_sheet, s.forward});
        sheet = next;
    }
    return out;
}

}  // namespace systolic
