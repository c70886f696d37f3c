#pragma once

// Relative systoles sys(X, φ), based systoles sys(X, φ, x) and systolic area.
//
// For a root v, every closed walk through v with nonzero holonomy has length at
// least that of some tree cycle T(a)·e·T(b)⁻¹ of the shortest-path tree at v
// with nonzero holonomy (split the walk at each edge and telescope). So the
// based systole at v is the least such tree cycle, and searches stop once the
// frontier passes half the best length found. A vertex that has served as a
// root can be deleted for later roots: any shorter loop through it would have
// been found from it. Every such loop crosses an edge with nonzero label, so
// only tails of those edges need to act as roots.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <queue>
#include <vector>

#include "systolic/cocycle.hpp"
#include "systolic/complex.hpp"
#include "systolic/metric.hpp"

namespace systolic {

struct SystoleResult {
    double value = std::numeric_limits<double>::infinity();
    /// Closed walk in `refined`, starting and ending at `basepoint`.
    EdgePath witness;
    modp::Scalar holonomy = 0;
    int basepoint = -1;
    int refinement = 0;
    ComplexPtr refined;
    std::shared_ptr<const CocycleModP> cocycle;

    double witness_length() const { return path_length(*refined, witness); }
    /// Vertices visited by the witness, starting at the basepoint.
    std::vector<int> witness_vertices() const {
        std::vector<int> out;
        for (const auto& s : witness) out.push_back(step_tail(*refined, s));
        return out;
    }
};

namespace detail {

struct RootSearch {
    double value = std::numeric_limits<double>::infinity();
    int edge = -1;  // closing edge
    int near = -1, far = -1;
};

/// Tree-cycle search from `root` over alive vertices, pruned at `bound`.
/// Writes distances/parents into the scratch arrays; returns the best cycle below bound.
inline RootSearch search_root(const TwoComplex& x, const CocycleModP& a, int root, double bound,
                              const std::vector<char>& alive, std::vector<double>& dist, std::vector<int>& parent,
                              std::vector<modp::Scalar>& hol, std::vector<char>& settled, std::vector<int>& touched) {
    const auto& p = a.prime();
    for (int v : touched) {
        dist[static_cast<std::size_t>(v)] = std::numeric_limits<double>::infinity();
        parent[static_cast<std::size_t>(v)] = -1;
        settled[static_cast<std::size_t>(v)] = 0;
    }
    touched.clear();
    RootSearch best;
    best.value = bound;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[static_cast<std::size_t>(root)] = 0;
    hol[static_cast<std::size_t>(root)] = 0;
    touched.push_back(root);
    heap.emplace(0.0, root);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        const auto ui = static_cast<std::size_t>(u);
        if (settled[ui] || d > dist[ui]) continue;
        if (2 * d >= best.value) break;
        settled[ui] = 1;
        for (const auto& inc : x.incident(u)) {
            const auto w = static_cast<std::size_t>(inc.neighbor);
            if (!alive[w]) continue;
            const double len = x.edge_length(inc.edge);
            if (settled[w]) {
                if (inc.edge == parent[ui]) continue;
                // Holonomy of T(w) · (w→u) · T(u)⁻¹.
                modp::Scalar h = p.sub(p.add(hol[w], a.label(inc.edge, !inc.forward)), hol[ui]);
                double cyc = dist[w] + len + d;
                if (h != 0 && cyc < best.value) best = {cyc, inc.edge, u, inc.neighbor};
                continue;
            }
            double nd = d + len;
            if (nd < dist[w]) {
                if (!std::isfinite(dist[w])) touched.push_back(inc.neighbor);
                dist[w] = nd;
                parent[w] = inc.edge;
                hol[w] = p.add(hol[ui], a.label(inc.edge, inc.forward));
                heap.emplace(nd, inc.neighbor);
            }
        }
    }
    if (best.edge < 0) best.value = std::numeric_limits<double>::infinity();
    return best;
}

/// Tree path from the root to v as forward steps.
inline EdgePath tree_path(const TwoComplex& x, const std::vector<int>& parent, int v) {
    EdgePath rev;
    while (parent[static_cast<std::size_t>(v)] >= 0) {
        int e = parent[static_cast<std::size_t>(v)];
        const auto& ed = x.edge(e);
        bool forward = ed.head == v;
        rev.push_back({e, forward});
        v = forward ? ed.tail : ed.head;
    }
    std::reverse(rev.begin(), rev.end());
    return rev;
}

inline void require_nontrivial(const TwoComplex& x, const CocycleModP& a) {
    require_labels(x, a);
    if (!validate_cocycle(x, a).pass()) throw PreconditionViolation("labels do not form a cocycle");
    if (is_coboundary(x, a)) throw TrivialCocycle("φ trivial: the cocycle is a coboundary, no loop has nonzero holonomy");
}

}  // namespace detail

/// Systole search on an already refined complex. With a basepoint only loops
/// through it are considered.
inline SystoleResult systole_on(ComplexPtr x, std::shared_ptr<const CocycleModP> a, std::optional<int> basepoint,
                                int refinement_used = 0) {
    detail::require_nontrivial(*x, *a);
    const auto V = static_cast<std::size_t>(x->vertex_count());
    std::vector<double> dist(V, std::numeric_limits<double>::infinity());
    std::vector<int> parent(V, -1);
    std::vector<modp::Scalar> hol(V, 0);
    std::vector<char> settled(V, 0), alive(V, 1);
    std::vector<int> touched;

    std::vector<int> order;
    std::vector<double> lower(V, std::numeric_limits<double>::infinity());
    if (basepoint) {
        if (*basepoint < 0 || static_cast<std::size_t>(*basepoint) >= V) throw IndexOutOfRange("basepoint out of range");
        order.push_back(*basepoint);
        lower[static_cast<std::size_t>(*basepoint)] = 0;
    } else {
        std::vector<char> root(V, 0);
        for (int e = 0; e < x->edge_count(); ++e)
            if (a->label(e) != 0) root[static_cast<std::size_t>(x->edge(e).tail)] = 1;
        // A loop through v leaves and re-enters along incident edges.
        for (std::size_t v = 0; v < V; ++v) {
            if (!root[v]) continue;
            std::vector<double> ls;
            for (const auto& inc : x->incident(static_cast<int>(v))) ls.push_back(x->edge_length(inc.edge));
            if (ls.empty()) continue;
            std::sort(ls.begin(), ls.end());
            lower[v] = ls.size() > 1 ? ls[0] + ls[1] : 2 * ls[0];
            order.push_back(static_cast<int>(v));
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](int u, int v) { return lower[static_cast<std::size_t>(u)] < lower[static_cast<std::size_t>(v)]; });
    }

    SystoleResult res;
    res.refined = x;
    res.cocycle = a;
    res.refinement = refinement_used;
    detail::RootSearch best;
    int best_root = -1;
    std::vector<int> best_parent;
    for (int root : order) {
        if (lower[static_cast<std::size_t>(root)] >= best.value) break;
        auto found = detail::search_root(*x, *a, root, best.value, alive, dist, parent, hol, settled, touched);
        if (found.value < best.value) {
            best = found;
            best_root = root;
            best_parent = parent;
        }
        if (!basepoint) alive[static_cast<std::size_t>(root)] = 0;
    }
    if (best_root < 0) throw TrivialCocycle("no loop with nonzero holonomy was found");

    // Witness: T(far) · (far → near) · T(near)⁻¹.
    EdgePath loop = detail::tree_path(*x, best_parent, best.far);
    const auto& ce = x->edge(best.edge);
    loop.push_back({best.edge, ce.tail == best.far});
    auto back = reversed(detail::tree_path(*x, best_parent, best.near));
    loop.insert(loop.end(), back.begin(), back.end());

    res.witness = std::move(loop);
    res.basepoint = best_root;
    res.holonomy = holonomy(*x, *a, res.witness);
    res.value = canonical_length(*x, res.witness);
    return res;
}

/// sys(X, φ) on subdivide(x, refinement).
inline SystoleResult relative_systole(const TwoComplex& x, const CocycleModP& a, int refinement) {
    require_valid(x);
    auto rc = subdivide_with_cocycle(x, a, refinement);
    return systole_on(share(std::move(rc.refined.complex)), std::make_shared<const CocycleModP>(std::move(rc.cocycle)),
                      std::nullopt, refinement);
}

/// sys(X, φ, x): loops through `basepoint` (a vertex id of x, preserved by refinement).
inline SystoleResult based_systole(const TwoComplex& x, const CocycleModP& a, int basepoint, int refinement) {
    require_valid(x);
    auto rc = subdivide_with_cocycle(x, a, refinement);
    return systole_on(share(std::move(rc.refined.complex)), std::make_shared<const CocycleModP>(std::move(rc.cocycle)),
                      basepoint, refinement);
}

/// σ_φ(X) = area(X) / sys(X, φ)².
inline double systolic_area(const TwoComplex& x, const CocycleModP& a, int refinement) {
    auto s = relative_systole(x, a, refinement);
    return total_area(x) / (s.value * s.value);
}

/// Shortest path in the p-fold covering graph from (v, 0) to any (v, k ≠ 0).
/// Independent of the tree-cycle search; used to cross-check it.
inline double covering_graph_based_systole(const TwoComplex& x, const CocycleModP& a, int v) {
    const int p = static_cast<int>(a.prime().value());
    const auto N = static_cast<std::size_t>(x.vertex_count() * p);
    std::vector<double> dist(N, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[static_cast<std::size_t>(v * p)] = 0;
    heap.emplace(0.0, v * p);
    while (!heap.empty()) {
        auto [d, node] = heap.top();
        heap.pop();
        if (d > dist[static_cast<std::size_t>(node)]) continue;
        int u = node / p, k = node % p;
        if (u == v && k != 0) return d;
        for (const auto& inc : x.incident(u)) {
            int next = inc.neighbor * p + static_cast<int>((k + a.label(inc.edge, inc.forward)) % p);
            double nd = d + x.edge_length(inc.edge);
            if (nd < dist[static_cast<std::size_t>(next)]) {
                dist[static_cast<std::size_t>(next)] = nd;
                heap.emplace(nd, next);
            }
        }
    }
    return std::numeric_limits<double>::infinity();
}

inline constexpr int kBruteForceVertexCap = 12;

/// Exhaustive oracle: the least length over all simple cycles (including
/// 2-cycles on parallel edges) with nonzero holonomy.
inline SystoleResult brute_force_systole(const TwoComplex& x, const CocycleModP& a) {
    if (x.vertex_count() > kBruteForceVertexCap)
        throw SizeCapExceeded("brute-force systole is limited to " + std::to_string(kBruteForceVertexCap) + " vertices");
    detail::require_nontrivial(x, a);
    const auto& p = a.prime();
    SystoleResult res;
    res.refined = share(x);
    res.cocycle = std::make_shared<const CocycleModP>(a);
    EdgePath path;
    std::vector<char> on_path(static_cast<std::size_t>(x.vertex_count()), 0);
    // Cycles are enumerated from their smallest vertex.
    auto dfs = [&](auto&& self, int start, int u, double len, modp::Scalar h) -> void {
        for (const auto& inc : x.incident(u)) {
            const int w = inc.neighbor;
            const double nl = len + x.edge_length(inc.edge);
            const modp::Scalar nh = p.add(h, a.label(inc.edge, inc.forward));
            if (w == start) {
                if (path.size() == 1 && path[0].edge == inc.edge) continue;
                if (path.empty()) continue;
                if (nh != 0 && nl < res.value) {
                    res.value = nl;
                    res.witness = path;
                    res.witness.push_back({inc.edge, inc.forward});
                    res.basepoint = start;
                    res.holonomy = nh;
                }
                continue;
            }
            if (w < start || on_path[static_cast<std::size_t>(w)]) continue;
            on_path[static_cast<std::size_t>(w)] = 1;
            path.push_back({inc.edge, inc.forward});
            self(self, start, w, nl, nh);
            path.pop_back();
            on_path[static_cast<std::size_t>(w)] = 0;
        }
    };
    for (int s = 0; s < x.vertex_count(); ++s) {
        on_path[static_cast<std::size_t>(s)] = 1;
        dfs(dfs, s, s, 0.0, 0);
        on_path[static_cast<std::size_t>(s)] = 0;
    }
    if (res.basepoint < 0) throw TrivialCocycle("φ trivial: no simple cycle has nonzero holonomy");
    res.value = canonical_length(x, res.witness);
    return res;
}

/// Profile of balls at `source`; with a cocycle and r_max ≤ 0 the radius range
/// defaults to half the based systole at the source.
inline BallProfile ball_profile(const TwoComplex& x, int source, const CocycleModP* a, double r_max, int samples,
                                int refinement) {
    auto field = distance_field(x, source, refinement);
    if (!(r_max > 0)) r_max = a ? 0.5 * based_systole(x, *a, source, refinement).value : field.max_value();
    r_max = std::min(r_max, field.max_value());
    return ball_profile(field, r_max, samples);
}

}  // namespace systolic
