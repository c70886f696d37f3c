#pragma once

// Piecewise-linear distance fields on refined complexes: ball areas, level
// curves, regular values and the weighted coarea identity.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "systolic/complex.hpp"

namespace systolic {

struct DistanceField {
    ComplexPtr host;
    int source = 0;
    std::vector<double> values;
    int refinement = 0;

    double value(int v) const { return values.at(static_cast<std::size_t>(v)); }
    double max_value() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }
};

struct ShortestPaths {
    std::vector<double> dist;
    std::vector<int> parent_edge;  // −1 at the source or unreached vertices
};

/// Single-source Dijkstra on the 1-skeleton.
inline ShortestPaths dijkstra(const TwoComplex& x, int source) {
    const auto V = static_cast<std::size_t>(x.vertex_count());
    if (source < 0 || static_cast<std::size_t>(source) >= V) throw IndexOutOfRange("source vertex out of range");
    ShortestPaths sp{std::vector<double>(V, std::numeric_limits<double>::infinity()), std::vector<int>(V, -1)};
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    sp.dist[static_cast<std::size_t>(source)] = 0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > sp.dist[static_cast<std::size_t>(u)]) continue;
        for (const auto& inc : x.incident(u)) {
            double nd = d + x.edge_length(inc.edge);
            auto w = static_cast<std::size_t>(inc.neighbor);
            if (nd < sp.dist[w]) {
                sp.dist[w] = nd;
                sp.parent_edge[w] = inc.edge;
                heap.emplace(nd, inc.neighbor);
            }
        }
    }
    return sp;
}

/// Distances from `source` over the 1-skeleton of an already refined complex.
inline DistanceField distance_field_on(ComplexPtr host, int source, int refinement_used = 0) {
    auto sp = dijkstra(*host, source);
    return {std::move(host), source, std::move(sp.dist), refinement_used};
}

/// Distances from `source` on subdivide(x, refinement). Vertex ids of x are
/// preserved by subdivision, so `source` names the same point at every level.
inline DistanceField distance_field(const TwoComplex& x, int source, int refinement) {
    require_valid(x);
    if (source < 0 || source >= x.vertex_count()) throw IndexOutOfRange("source vertex out of range");
    auto refined = share(subdivide(x, refinement).complex);
    return distance_field_on(std::move(refined), source, refinement);
}

/// A field with prescribed vertex values (used for analytic test fields).
inline DistanceField field_from_values(ComplexPtr host, std::vector<double> values, int source = 0) {
    if (values.size() != static_cast<std::size_t>(host->vertex_count()))
        throw DimensionMismatch("field needs one value per vertex");
    return {std::move(host), source, std::move(values), 0};
}

namespace detail {

/// Area fraction of a triangle where the linear interpolant is ≤ r. Area
/// ratios are affine invariants, so only the three vertex values matter.
inline double sublevel_fraction(std::array<double, 3> d, double r) {
    std::sort(d.begin(), d.end());
    const double a = d[0], b = d[1], c = d[2];
    if (r <= a) return 0.0;
    if (r >= c) return 1.0;
    if (r <= b) return (r - a) * (r - a) / ((b - a) * (c - a));
    return 1.0 - (c - r) * (c - r) / ((c - a) * (c - b));
}

inline std::array<double, 3> triangle_values(const DistanceField& f, int t) {
    const auto& tr = f.host->triangle(t);
    return {f.value(tr.vertices[0]), f.value(tr.vertices[1]), f.value(tr.vertices[2])};
}

/// Norm of the gradient of the linear interpolant on the flat triangle.
inline double gradient_norm(const TwoComplex& x, int t, const std::array<double, 3>& d) {
    auto X = x.layout(t);
    const double ux = X[1][0] - X[0][0], uy = X[1][1] - X[0][1];
    const double vx = X[2][0] - X[0][0], vy = X[2][1] - X[0][1];
    const double du = d[1] - d[0], dv = d[2] - d[0];
    const double det = ux * vy - uy * vx;
    const double gx = (du * vy - dv * uy) / det;
    const double gy = (dv * ux - du * vx) / det;
    return std::hypot(gx, gy);
}

/// Length of the level segment {value = s} inside triangle t, for s strictly
/// between the smallest and largest vertex values.
inline double level_segment_length(const TwoComplex& x, int t, const std::array<double, 3>& d, double s) {
    auto X = x.layout(t);
    std::array<std::array<double, 2>, 2> pts{};
    int n = 0;
    for (int i = 0; i < 3 && n < 2; ++i) {
        int j = (i + 1) % 3;
        double lo = std::min(d[i], d[j]), hi = std::max(d[i], d[j]);
        if (!(lo < s && s < hi)) continue;
        double w = (s - d[i]) / (d[j] - d[i]);
        pts[static_cast<std::size_t>(n++)] = {X[i][0] + w * (X[j][0] - X[i][0]), X[i][1] + w * (X[j][1] - X[i][1])};
    }
    if (n < 2) return 0.0;
    return std::hypot(pts[0][0] - pts[1][0], pts[0][1] - pts[1][1]);
}

}  // namespace detail

/// Area of the PL sublevel set {d ≤ r}.
inline double ball_area(const DistanceField& f, double r) {
    if (r < 0) throw PreconditionViolation("radius must be nonnegative");
    double sum = 0;
    for (int t = 0; t < f.host->triangle_count(); ++t) {
        double frac = detail::sublevel_fraction(detail::triangle_values(f, t), r);
        if (frac > 0) sum += frac * f.host->triangle_area(t);
    }
    return sum;
}

struct RegularValueCheck {
    double radius = 0;
    bool regular = false;
    double gap = 0;           // distance to the nearest vertex value
    int nearest_vertex = -1;
};

/// Tolerance for the regular-value test: 1e−9 of the field's extent.
inline double regular_tolerance(const DistanceField& f) { return 1e-9 * std::max(f.max_value(), 1e-300); }

inline RegularValueCheck check_regular(const DistanceField& f, double r) {
    RegularValueCheck c{r, false, std::numeric_limits<double>::infinity(), -1};
    for (int v = 0; v < static_cast<int>(f.values.size()); ++v) {
        double g = std::abs(f.values[static_cast<std::size_t>(v)] - r);
        if (g < c.gap) {
            c.gap = g;
            c.nearest_vertex = v;
        }
    }
    c.regular = c.gap > regular_tolerance(f);
    return c;
}

inline void require_regular(const DistanceField& f, double r) {
    auto c = check_regular(f, r);
    if (!c.regular)
        throw NonRegularValue("radius " + std::to_string(r) + " is within " + std::to_string(c.gap) +
                                  " of the value at vertex " + std::to_string(c.nearest_vertex),
                              c.nearest_vertex);
}

/// Moves a non-regular radius by half the smallest gap between distinct vertex values.
inline double nudge_to_regular(const DistanceField& f, double r) {
    if (check_regular(f, r).regular) return r;
    std::vector<double> v = f.values;
    std::sort(v.begin(), v.end());
    const double tol = regular_tolerance(f);
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] - v[i - 1] > tol) gap = std::min(gap, v[i] - v[i - 1]);
    if (!std::isfinite(gap)) gap = std::max(f.max_value(), 1.0);
    for (double cand : {r + gap / 2, r - gap / 2})
        if (cand >= 0 && check_regular(f, cand).regular) return cand;
    return r + gap / 2;
}

/// A point where the level set crosses an edge, at parameter `t` from its tail.
struct LevelPoint {
    int edge;
    double t;
};

struct LevelSegment {
    int triangle;
    int a, b;  // indices into LevelCurve::points
    double length;
};

struct LevelCurve {
    double radius = 0;
    std::vector<LevelPoint> points;
    std::vector<LevelSegment> segments;
    std::vector<int> point_of_edge;     // −1 when the edge is not crossed
    std::vector<int> component_of_point;
    int components = 0;
    double length = 0;
};

/// The level set {d = r} of the PL field: one segment per crossed triangle,
/// grouped into connected components through shared edge crossings.
inline LevelCurve level_curve(const DistanceField& f, double r) {
    require_regular(f, r);
    const TwoComplex& x = *f.host;
    LevelCurve lc;
    lc.radius = r;
    lc.point_of_edge.assign(static_cast<std::size_t>(x.edge_count()), -1);
    for (int e = 0; e < x.edge_count(); ++e) {
        const auto& ed = x.edge(e);
        double du = f.value(ed.tail), dv = f.value(ed.head);
        if ((du < r) == (dv < r)) continue;
        lc.point_of_edge[static_cast<std::size_t>(e)] = static_cast<int>(lc.points.size());
        lc.points.push_back({e, (r - du) / (dv - du)});
    }
    DisjointSets ds(lc.points.size());
    for (int t = 0; t < x.triangle_count(); ++t) {
        const auto& tr = x.triangle(t);
        std::array<int, 2> hit{};
        std::array<int, 2> local{};
        int n = 0;
        for (int i = 0; i < 3; ++i) {
            int pid = lc.point_of_edge[static_cast<std::size_t>(tr.edges[i])];
            if (pid >= 0 && n < 2) {
                local[static_cast<std::size_t>(n)] = i;
                hit[static_cast<std::size_t>(n++)] = pid;
            }
        }
        if (n != 2) continue;
        auto X = x.layout(t);
        auto place = [&](int i, int pid) {
            const auto& pt = lc.points[static_cast<std::size_t>(pid)];
            int j = (i + 1) % 3;
            // t is measured from the stored tail; local vertex i is the tail when the sign is +1.
            double w = tr.signs[i] > 0 ? pt.t : 1.0 - pt.t;
            return std::array<double, 2>{X[i][0] + w * (X[j][0] - X[i][0]), X[i][1] + w * (X[j][1] - X[i][1])};
        };
        auto P = place(local[0], hit[0]);
        auto Q = place(local[1], hit[1]);
        double len = std::hypot(P[0] - Q[0], P[1] - Q[1]);
        lc.segments.push_back({t, hit[0], hit[1], len});
        lc.length += len;
        ds.unite(static_cast<std::size_t>(hit[0]), static_cast<std::size_t>(hit[1]));
    }
    std::map<std::size_t, int> ids;
    lc.component_of_point.resize(lc.points.size());
    for (std::size_t i = 0; i < lc.points.size(); ++i) {
        auto root = ds.find(i);
        auto it = ids.emplace(root, static_cast<int>(ids.size())).first;
        lc.component_of_point[i] = it->second;
    }
    lc.components = static_cast<int>(ids.size());
    return lc;
}

struct CoareaCheck {
    double ball_area = 0;
    /// Σ_T ∫₀ʳ ℓ_T(s)/g_T ds, integrated in closed form per triangle.
    double weighted_integral = 0;
    double residual = 0;
    /// Midpoint-rule estimate of the unweighted ∫₀ʳ ℓ(s) ds.
    double unweighted_integral = 0;
    double max_gradient = 0;
};

/// Compares the ball area with the gradient-weighted coarea integral of the
/// level lengths; exact for PL fields up to rounding.
inline CoareaCheck coarea_residual(const DistanceField& f, double r, int samples = 64) {
    if (!(r > 0)) throw PreconditionViolation("coarea check needs r > 0");
    const TwoComplex& x = *f.host;
    CoareaCheck out;
    out.ball_area = ball_area(f, r);
    for (int t = 0; t < x.triangle_count(); ++t) {
        auto d = detail::triangle_values(f, t);
        auto s = d;
        std::sort(s.begin(), s.end());
        if (s[0] >= r) continue;
        double g = detail::gradient_norm(x, t, d);
        out.max_gradient = std::max(out.max_gradient, g);
        if (s[2] - s[0] <= 0 || g == 0) {
            out.weighted_integral += x.triangle_area(t);
            continue;
        }
        double integral = 0;
        // ℓ_T is linear on [s0, s1] and on [s1, s2]; a linear integrand is integrated exactly by its midpoint.
        for (int piece = 0; piece < 2; ++piece) {
            double lo = s[static_cast<std::size_t>(piece)], hi = std::min(s[static_cast<std::size_t>(piece) + 1], r);
            if (hi <= lo) continue;
            integral += (hi - lo) * detail::level_segment_length(x, t, d, 0.5 * (lo + hi));
        }
        out.weighted_integral += integral / g;
    }
    out.residual = std::abs(out.ball_area - out.weighted_integral);
    if (samples > 0) {
        double h = r / samples, acc = 0;
        for (int i = 0; i < samples; ++i) {
            double s = (i + 0.5) * h;
            for (int t = 0; t < x.triangle_count(); ++t) {
                auto d = detail::triangle_values(f, t);
                double lo = std::min({d[0], d[1], d[2]}), hi = std::max({d[0], d[1], d[2]});
                if (lo < s && s < hi) acc += detail::level_segment_length(x, t, d, s);
            }
        }
        out.unweighted_integral = acc * h;
    }
    return out;
}

struct BallProfile {
    std::vector<double> radii;
    std::vector<double> area;
    std::vector<double> level_length;
    std::vector<int> components;
    std::vector<double> max_grad;

    std::size_t size() const noexcept { return radii.size(); }
    void push(double r, double a, double l, int c, double g) {
        radii.push_back(r);
        area.push_back(a);
        level_length.push_back(l);
        components.push_back(c);
        max_grad.push_back(g);
    }
};

/// Largest gradient norm among triangles the level set {d = r} passes through.
inline double max_gradient_at(const DistanceField& f, double r) {
    double g = 0;
    for (int t = 0; t < f.host->triangle_count(); ++t) {
        auto d = detail::triangle_values(f, t);
        double lo = std::min({d[0], d[1], d[2]}), hi = std::max({d[0], d[1], d[2]});
        if (lo < r && r < hi) g = std::max(g, detail::gradient_norm(*f.host, t, d));
    }
    return g;
}

/// Samples r_i = r_max·i/samples (i = 1..samples), each nudged to a regular
/// value, preceded by the r = 0 row.
inline BallProfile ball_profile(const DistanceField& f, double r_max, int samples) {
    BallProfile prof;
    prof.push(0.0, 0.0, 0.0, 1, 0.0);
    if (samples <= 0 || !(r_max > 0)) return prof;
    for (int i = 1; i <= samples; ++i) {
        double r = nudge_to_regular(f, r_max * i / samples);
        if (r <= prof.radii.back()) continue;
        auto lc = level_curve(f, r);
        prof.push(r, ball_area(f, r), lc.length, lc.components, max_gradient_at(f, r));
    }
    return prof;
}

}  // namespace systolic
