#pragma once

// Buffer-cylinder surgery Y(x, r), the fat-ball test and the improvement step.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "systolic/cocycle.hpp"
#include "systolic/complex.hpp"
#include "systolic/metric.hpp"
#include "systolic/systole.hpp"

namespace systolic {

/// A cocycle cohomologous to α that vanishes on every edge with both endpoints
/// strictly inside B(x, r). Throws PreconditionViolation when α restricted to the
/// ball is not a coboundary.
inline CocycleModP normalize_on_ball(const CocycleModP& a, const DistanceField& field, double r) {
    const TwoComplex& x = *field.host;
    require_labels(x, a);
    auto inside_v = [&](int v) { return field.value(v) < r; };
    auto inside_e = [&](int e) { return inside_v(x.edge(e).tail) && inside_v(x.edge(e).head); };
    auto f = integrate_potential(x, a, inside_e, {field.source});
    if (!f) throw PreconditionViolation("cocycle has nonzero holonomy inside the ball; the radius is at least half the based systole");
    bool zero = true;
    for (int v = 0; v < x.vertex_count(); ++v) {
        if (!inside_v(v)) (*f)[static_cast<std::size_t>(v)] = 0;
        zero = zero && (*f)[static_cast<std::size_t>(v)] == 0;
    }
    if (zero) return a;
    auto df = coboundary0(x, a.prime(), *f);
    std::vector<modp::Scalar> labels(a.size());
    for (std::size_t e = 0; e < labels.size(); ++e) labels[e] = a.prime().sub(a.labels()[e], df.labels()[e]);
    return CocycleModP(a.prime(), std::move(labels));
}

struct SurgeryResult {
    SurgeryResult(ComplexPtr host_, double r, CocycleModP psi_, CocycleModP normalized_, LevelCurve level_)
        : host(std::move(host_)), radius(r), psi(std::move(psi_)), normalized(std::move(normalized_)), level(std::move(level_)) {}

    ComplexPtr host;  // the (refined) complex X the surgery was performed on
    double radius = 0;
    TwoComplex Y;
    CocycleModP psi;
    CocycleModP normalized;  // α after normalize_on_ball, on X
    LevelCurve level;
    double level_length = 0;
    std::vector<double> component_lengths;
    int cone_apex = -1;
    std::vector<int> component_apex;  // x_i
    std::vector<int> cone_edges;      // x_i → c
    double cone_length = 0;
    double buffer_area = 0;
    std::vector<int> cylinder_rows;

    // Projection π: X → Y.
    std::vector<int> vertex_image;  // inside vertices map to the cone apex
    std::vector<int> edge_image;    // edges outside the ball; −1 otherwise
    std::vector<int> piece_of_edge; // crossed edges: Y edge from the outside endpoint to the crossing point
    std::vector<int> point_vertex;  // level point → Y vertex
    /// Per level point: Y edges climbing its column to x_i, all stored upward.
    std::vector<std::vector<int>> column;
    std::vector<int> segment_edge;  // level segment → Y edge

    // Comparison record.
    double area_X = 0, ball_area = 0, area_Y = 0;
    int b1_X = 0, b1_Y = 0;

    bool inside(int v) const { return vertex_image[static_cast<std::size_t>(v)] == cone_apex; }

    /// Image of a closed walk of X under π. Walks avoid the level set because r is regular.
    EdgePath project_loop(const EdgePath& gamma) const {
        const TwoComplex& x = *host;
        EdgePath out;
        auto climb = [&](int pid) {
            for (int e : column[static_cast<std::size_t>(pid)]) out.push_back({e, true});
            int comp = level.component_of_point[static_cast<std::size_t>(pid)];
            out.push_back({cone_edges[static_cast<std::size_t>(comp)], true});
        };
        auto descend = [&](int pid) {
            int comp = level.component_of_point[static_cast<std::size_t>(pid)];
            out.push_back({cone_edges[static_cast<std::size_t>(comp)], false});
            const auto& col = column[static_cast<std::size_t>(pid)];
            for (auto it = col.rbegin(); it != col.rend(); ++it) out.push_back({*it, false});
        };
        for (const auto& s : gamma) {
            int a = step_tail(x, s), b = step_head(x, s);
            bool ia = inside(a), ib = inside(b);
            const auto e = static_cast<std::size_t>(s.edge);
            if (!ia && !ib) {
                out.push_back({edge_image[e], s.forward});
            } else if (!ia && ib) {
                out.push_back({piece_of_edge[e], true});
                climb(level.point_of_edge[e]);
            } else if (ia && !ib) {
                descend(level.point_of_edge[e]);
                out.push_back({piece_of_edge[e], false});
            }
        }
        return out;
    }
};

namespace detail {

/// Apex edge length H of a fan over segments s_j whose area equals `target`.
inline double fan_apex_length(const std::vector<double>& s, double target) {
    double smax = *std::max_element(s.begin(), s.end());
    auto area = [&](double H) {
        double a = 0;
        for (double sj : s) a += 0.5 * sj * std::sqrt(std::max(0.0, H * H - 0.25 * sj * sj));
        return a;
    };
    double lo = 0.5 * smax, hi = std::max(smax, 1e-300);
    while (area(hi) < target) hi *= 2;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (area(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline constexpr int kMaxCylinderRows = 64;

}  // namespace detail

/// Y(x, r) on an already refined X: X ∖ B(x, r) with a buffer cylinder of height
/// L/2 over each level component, each capped by a fan to x_i, and a cone of
/// edges x_i → c of length `cone_length`.
inline SurgeryResult build_Y_on(const DistanceField& field, const CocycleModP& a, double r, double cone_length) {
    const TwoComplex& x = *field.host;
    require_regular(field, r);
    if (!(cone_length > 0)) throw InvalidGeometry("cone edges need positive length");
    SurgeryResult res(field.host, r, a, normalize_on_ball(a, field, r), level_curve(field, r));
    const auto& alpha = res.normalized;
    const auto& p = alpha.prime();
    const auto& lc = res.level;
    if (lc.points.empty()) throw PreconditionViolation("the level set is empty");
    res.level_length = lc.length;
    res.cone_length = cone_length;
    const double L = lc.length;

    const auto V = static_cast<std::size_t>(x.vertex_count());
    const auto E = static_cast<std::size_t>(x.edge_count());
    auto in = [&](int v) { return field.value(v) < r; };

    ComplexBuilder b;
    std::vector<modp::Scalar> psi;
    auto edge = [&](int t, int h, double len, modp::Scalar label) {
        psi.push_back(label);
        return b.add_edge(t, h, len);
    };

    res.vertex_image.assign(V, -1);
    for (std::size_t v = 0; v < V; ++v)
        if (!in(static_cast<int>(v))) res.vertex_image[v] = b.add_vertex();
    for (std::size_t i = 0; i < lc.points.size(); ++i) res.point_vertex.push_back(b.add_vertex());

    res.edge_image.assign(E, -1);
    res.piece_of_edge.assign(E, -1);
    for (std::size_t e = 0; e < E; ++e) {
        const auto& ed = x.edge(static_cast<int>(e));
        bool it = in(ed.tail), ih = in(ed.head);
        if (!it && !ih) {
            res.edge_image[e] = edge(res.vertex_image[static_cast<std::size_t>(ed.tail)],
                                     res.vertex_image[static_cast<std::size_t>(ed.head)], ed.length, alpha.label(static_cast<int>(e)));
        } else if (it != ih) {
            int pid = lc.point_of_edge[e];
            double t = lc.points[static_cast<std::size_t>(pid)].t;
            int outside = it ? ed.head : ed.tail;
            double len = it ? (1 - t) * ed.length : t * ed.length;
            res.piece_of_edge[e] = edge(res.vertex_image[static_cast<std::size_t>(outside)], res.point_vertex[static_cast<std::size_t>(pid)],
                                        len, alpha.label(static_cast<int>(e), outside == ed.tail));
        }
    }
    std::vector<int> segment_of_triangle(static_cast<std::size_t>(x.triangle_count()), -1);
    for (std::size_t s = 0; s < lc.segments.size(); ++s) {
        const auto& seg = lc.segments[s];
        segment_of_triangle[static_cast<std::size_t>(seg.triangle)] = static_cast<int>(s);
        res.segment_edge.push_back(edge(res.point_vertex[static_cast<std::size_t>(seg.a)],
                                        res.point_vertex[static_cast<std::size_t>(seg.b)], seg.length, 0));
    }

    // X ∖ B, with clipped triangles re-triangulated along the level segments.
    for (int t = 0; t < x.triangle_count(); ++t) {
        const auto& tr = x.triangle(t);
        int count = 0;
        for (int v : tr.vertices) count += in(v);
        if (count == 3) continue;
        auto img = [&](int li) { return res.vertex_image[static_cast<std::size_t>(tr.vertices[static_cast<std::size_t>(li)])]; };
        if (count == 0) {
            b.add_triangle(img(0), img(1), img(2), res.edge_image[static_cast<std::size_t>(tr.edges[0])],
                           res.edge_image[static_cast<std::size_t>(tr.edges[1])], res.edge_image[static_cast<std::size_t>(tr.edges[2])]);
            continue;
        }
        const auto X = x.layout(t);
        auto pos_of_point = [&](int e) {
            const auto& pt = lc.points[static_cast<std::size_t>(lc.point_of_edge[static_cast<std::size_t>(e)])];
            const auto& ed = x.edge(e);
            int lt = 0, lh = 0;
            for (int i = 0; i < 3; ++i) {
                if (tr.vertices[static_cast<std::size_t>(i)] == ed.tail) lt = i;
                if (tr.vertices[static_cast<std::size_t>(i)] == ed.head) lh = i;
            }
            return std::array<double, 2>{X[lt][0] + pt.t * (X[lh][0] - X[lt][0]), X[lt][1] + pt.t * (X[lh][1] - X[lt][1])};
        };
        auto qv = [&](int e) { return res.point_vertex[static_cast<std::size_t>(lc.point_of_edge[static_cast<std::size_t>(e)])]; };
        auto piece = [&](int e) { return res.piece_of_edge[static_cast<std::size_t>(e)]; };
        int seg = res.segment_edge[static_cast<std::size_t>(segment_of_triangle[static_cast<std::size_t>(t)])];
        int i = 0;
        if (count == 1) {
            while (!in(tr.vertices[static_cast<std::size_t>(i)])) ++i;
            int l1 = (i + 1) % 3, l2 = (i + 2) % 3;
            int e12 = tr.edges[static_cast<std::size_t>(l1)], e2w = tr.edges[static_cast<std::size_t>(l2)], ew1 = tr.edges[static_cast<std::size_t>(i)];
            int u1 = tr.vertices[static_cast<std::size_t>(l1)], u2 = tr.vertices[static_cast<std::size_t>(l2)];
            auto q2 = pos_of_point(e2w);
            double dl = std::hypot(q2[0] - X[l1][0], q2[1] - X[l1][1]);
            modp::Scalar dlab = p.add(alpha.label(e12, x.edge(e12).tail == u1), alpha.label(e2w, x.edge(e2w).tail == u2));
            int diag = edge(img(l1), qv(e2w), dl, dlab);
            b.add_triangle(img(l1), img(l2), qv(e2w), res.edge_image[static_cast<std::size_t>(e12)], piece(e2w), diag);
            b.add_triangle(img(l1), qv(e2w), qv(ew1), diag, seg, piece(ew1));
        } else {
            while (in(tr.vertices[static_cast<std::size_t>(i)])) ++i;
            int e1 = tr.edges[static_cast<std::size_t>(i)], e2 = tr.edges[static_cast<std::size_t>((i + 2) % 3)];
            b.add_triangle(img(i), qv(e1), qv(e2), piece(e1), seg, piece(e2));
        }
    }

    // Buffer cylinders.
    const int C = lc.components;
    std::vector<std::vector<int>> comp_points(static_cast<std::size_t>(C)), comp_segments(static_cast<std::size_t>(C));
    for (std::size_t i = 0; i < lc.points.size(); ++i) comp_points[static_cast<std::size_t>(lc.component_of_point[i])].push_back(static_cast<int>(i));
    for (std::size_t s = 0; s < lc.segments.size(); ++s)
        comp_segments[static_cast<std::size_t>(lc.component_of_point[static_cast<std::size_t>(lc.segments[s].a)])].push_back(static_cast<int>(s));
    if (!(L > 0)) throw PreconditionViolation("the level set has zero length; the buffer cylinder would be degenerate");
    res.column.assign(lc.points.size(), {});
    double buffer = 0;
    for (int c = 0; c < C; ++c) {
        const auto& pts = comp_points[static_cast<std::size_t>(c)];
        const auto& segs = comp_segments[static_cast<std::size_t>(c)];
        int apex = b.add_vertex();
        res.component_apex.push_back(apex);
        if (segs.empty()) {
            for (int pid : pts) res.column[static_cast<std::size_t>(pid)].push_back(edge(res.point_vertex[static_cast<std::size_t>(pid)], apex, 0.5 * L, 0));
            res.component_lengths.push_back(0);
            res.cylinder_rows.push_back(0);
            continue;
        }
        std::vector<double> s;
        for (int k : segs) s.push_back(lc.segments[static_cast<std::size_t>(k)].length);
        double len = 0, smax = 0;
        for (double v : s) {
            len += v;
            smax = std::max(smax, v);
        }
        res.component_lengths.push_back(len);
        const double mean = len / static_cast<double>(s.size());
        int cap = std::min(detail::kMaxCylinderRows, std::max(1, static_cast<int>(std::floor(L / smax))));
        int k = std::clamp(static_cast<int>(std::lround(L / (2 * mean))), 1, cap);
        res.cylinder_rows.push_back(k);
        const double h = L / (2 * k);
        // rows[j][local point] = Y vertex at height j·h.
        std::vector<int> local(lc.points.size(), -1);
        for (std::size_t i = 0; i < pts.size(); ++i) local[static_cast<std::size_t>(pts[i])] = static_cast<int>(i);
        std::vector<std::vector<int>> row(static_cast<std::size_t>(k));
        for (int pid : pts) row[0].push_back(res.point_vertex[static_cast<std::size_t>(pid)]);
        for (int j = 1; j < k; ++j)
            for (std::size_t i = 0; i < pts.size(); ++i) row[static_cast<std::size_t>(j)].push_back(b.add_vertex());
        std::vector<std::vector<int>> vert(static_cast<std::size_t>(k));  // vert[j][i]: row j → j+1, or → apex at the top
        const double H = detail::fan_apex_length(s, h * len);
        for (int j = 0; j < k; ++j)
            for (std::size_t i = 0; i < pts.size(); ++i) {
                bool top = j == k - 1;
                int e = edge(row[static_cast<std::size_t>(j)][i], top ? apex : row[static_cast<std::size_t>(j) + 1][i], top ? H : h, 0);
                vert[static_cast<std::size_t>(j)].push_back(e);
                res.column[static_cast<std::size_t>(pts[i])].push_back(e);
            }
        for (std::size_t si = 0; si < segs.size(); ++si) {
            const auto& sg = lc.segments[static_cast<std::size_t>(segs[si])];
            const auto ia = static_cast<std::size_t>(local[static_cast<std::size_t>(sg.a)]);
            const auto ib = static_cast<std::size_t>(local[static_cast<std::size_t>(sg.b)]);
            const double sl = s[si];
            int horiz = res.segment_edge[static_cast<std::size_t>(segs[si])];
            for (int j = 0; j + 1 < k; ++j) {
                const auto J = static_cast<std::size_t>(j);
                int up = edge(row[J + 1][ia], row[J + 1][ib], sl, 0);
                int dg = edge(row[J][ia], row[J + 1][ib], std::hypot(sl, h), 0);
                b.add_triangle(row[J][ia], row[J][ib], row[J + 1][ib], horiz, vert[J][ib], dg);
                b.add_triangle(row[J][ia], row[J + 1][ib], row[J + 1][ia], dg, up, vert[J][ia]);
                buffer += 2 * triangle_area(sl, h, std::hypot(sl, h));
                horiz = up;
            }
            const auto T = static_cast<std::size_t>(k - 1);
            b.add_triangle(row[T][ia], row[T][ib], apex, horiz, vert[T][ib], vert[T][ia]);
            buffer += triangle_area(sl, H, H);
        }
    }
    res.buffer_area = buffer;

    res.cone_apex = b.add_vertex();
    for (int apex : res.component_apex) res.cone_edges.push_back(edge(apex, res.cone_apex, cone_length, 0));
    for (auto& v : res.vertex_image)
        if (v < 0) v = res.cone_apex;

    res.Y = b.build();
    res.psi = CocycleModP(p, std::move(psi));
    require_valid(res.Y);
    res.area_X = total_area(x);
    res.ball_area = ball_area(field, r);
    res.area_Y = total_area(res.Y);
    res.b1_X = betti1(x);
    res.b1_Y = betti1(res.Y);
    return res;
}

/// Y(x, r) on subdivide(x, refinement) with cone edges of length sys(X, φ).
inline SurgeryResult build_Y(const TwoComplex& x, const CocycleModP& a, int source, double r, int refinement) {
    auto sys = relative_systole(x, a, refinement);
    if (!(r < 0.5 * sys.value)) throw PreconditionViolation("radius must be below half the systole");
    auto field = distance_field_on(sys.refined, source, refinement);
    return build_Y_on(field, *sys.cocycle, r, sys.value);
}

// ---------------------------------------------------------------------------
// Ball tests

/// Smallest sampled radius r ∈ (δ, r_upper) with a(r) > λ·ℓ(r)².
inline std::optional<double> fat_ball_test(const BallProfile& prof, double lambda, double delta,
                                           double r_upper = std::numeric_limits<double>::infinity()) {
    for (std::size_t i = 0; i < prof.size(); ++i) {
        double r = prof.radii[i];
        if (!(r > delta) || !(r < r_upper)) continue;
        if (prof.area[i] > lambda * prof.level_length[i] * prof.level_length[i]) return r;
    }
    return std::nullopt;
}

struct ThinBoundRow {
    double r, area;
    double bound;   // (r − δ)²/(4λ)
    double margin;  // (area − bound)/area
    double minb_bound;   // (r − δ)²/(2 + ε/δ²); NaN without ε
    double minb_margin;
};

struct ThinBoundTable {
    bool hypothesis_holds = true;
    double failing_radius = 0;
    std::vector<ThinBoundRow> rows;
    double min_margin = std::numeric_limits<double>::infinity();
    double min_minb_margin = std::numeric_limits<double>::infinity();

    bool passes(double slack) const { return hypothesis_holds && min_margin >= -slack; }
    bool minb_passes(double slack) const { return hypothesis_holds && min_minb_margin >= -slack; }
};

inline constexpr double kBoundSlack = 0.05;

/// Compares a(r) with (r − δ)²/(4λ) at the samples in (δ, r_upper), after
/// checking a(r) ≤ λ·ℓ(r)² there. Pass ε > 0 to add the (r − δ)²/(2 + ε/δ²) column.
inline ThinBoundTable thin_ball_bound(const BallProfile& prof, double lambda, double delta,
                                      double r_upper = std::numeric_limits<double>::infinity(), double epsilon = 0) {
    ThinBoundTable tab;
    for (std::size_t i = 0; i < prof.size(); ++i) {
        double r = prof.radii[i];
        if (!(r > delta) || !(r < r_upper)) continue;
        if (prof.area[i] > lambda * prof.level_length[i] * prof.level_length[i]) {
            tab.hypothesis_holds = false;
            tab.failing_radius = r;
            tab.rows.clear();
            return tab;
        }
        ThinBoundRow row{};
        row.r = r;
        row.area = prof.area[i];
        row.bound = (r - delta) * (r - delta) / (4 * lambda);
        row.margin = row.area > 0 ? (row.area - row.bound) / row.area : (row.bound > 0 ? -1.0 : 0.0);
        row.minb_bound = std::numeric_limits<double>::quiet_NaN();
        row.minb_margin = std::numeric_limits<double>::quiet_NaN();
        if (epsilon > 0 && delta > 0) {
            row.minb_bound = (r - delta) * (r - delta) / (2 + epsilon / (delta * delta));
            row.minb_margin = row.area > 0 ? (row.area - row.minb_bound) / row.area : -1.0;
            tab.min_minb_margin = std::min(tab.min_minb_margin, row.minb_margin);
        }
        tab.min_margin = std::min(tab.min_margin, row.margin);
        tab.rows.push_back(row);
    }
    return tab;
}

// ---------------------------------------------------------------------------
// Improvement step

struct ImproveConfig {
    double delta = 0.05;
    double epsilon = 0.01;
    double lambda = 1.6;
    int refinement = 2;
    int samples = 32;
    /// A vertex on a systolic loop; defaults to the systole search's basepoint.
    std::optional<int> basepoint;

    void validate() const {
        if (!(delta > 0 && delta < 0.5)) throw ConfigError("delta must lie in (0, 1/2) in systole units");
        if (!(epsilon > 0)) throw ConfigError("epsilon must be positive");
        double need = 0.5 + epsilon / (4 * delta * delta);
        if (!(lambda > need))
            throw ConfigError("lambda must exceed 1/2 + epsilon/(4 delta^2) = " + std::to_string(need));
        if (refinement < 0) throw ConfigError("refinement must be nonnegative");
        if (samples < 1) throw ConfigError("samples must be positive");
    }
};

struct ImproveOutcome {
    enum class Variant { Thin, Improved, Refuted };
    Variant variant = Variant::Thin;

    double systole = 0;  // sys(X, φ) before normalization
    int basepoint = -1;
    EdgePath systolic_loop;  // in the refined X
    ComplexPtr normalized_host;  // refined X scaled to unit systole
    BallProfile profile;
    ThinBoundTable table;

    std::optional<double> r0;
    std::optional<SurgeryResult> surgery;
    int exit_component = -1, entry_component = -1;

    // Improved
    std::optional<TwoComplex> Y_prime;
    std::optional<CocycleModP> psi_prime;
    int removed_edge = -1;
    int b1_X = 0, b1_Y = 0, b1_Y_prime = 0;
    double sigma_X = 0, sigma_Y_prime = 0, systole_Y_prime = 0;
    double margin = 0;  // (λ − ½)·L²
    bool essential_Y_prime = false;

    // Refuted
    EdgePath shortcut;  // loop in Y
    double shortcut_length = 0;
    modp::Scalar shortcut_holonomy = 0;

    bool contract_holds() const {
        if (variant != Variant::Improved) return true;
        return b1_Y_prime < b1_X && sigma_Y_prime <= sigma_X + 1e-6 && essential_Y_prime;
    }
};

inline const char* to_string(ImproveOutcome::Variant v) {
    switch (v) {
        case ImproveOutcome::Variant::Thin: return "thin";
        case ImproveOutcome::Variant::Improved: return "improved";
        case ImproveOutcome::Variant::Refuted: return "refuted";
    }
    return "?";
}

namespace detail {

/// Shortest route between two level points along the level segments, as Y steps.
inline EdgePath path_along_level(const SurgeryResult& s, int from, int to) {
    const auto n = s.level.points.size();
    std::vector<std::vector<std::pair<int, int>>> adj(n);  // (segment, other point)
    for (std::size_t k = 0; k < s.level.segments.size(); ++k) {
        const auto& sg = s.level.segments[k];
        adj[static_cast<std::size_t>(sg.a)].push_back({static_cast<int>(k), sg.b});
        adj[static_cast<std::size_t>(sg.b)].push_back({static_cast<int>(k), sg.a});
    }
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> via(n, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[static_cast<std::size_t>(from)] = 0;
    heap.emplace(0.0, from);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        for (auto [k, w] : adj[static_cast<std::size_t>(u)]) {
            double nd = d + s.level.segments[static_cast<std::size_t>(k)].length;
            if (nd < dist[static_cast<std::size_t>(w)]) {
                dist[static_cast<std::size_t>(w)] = nd;
                via[static_cast<std::size_t>(w)] = k;
                heap.emplace(nd, w);
            }
        }
    }
    if (!std::isfinite(dist[static_cast<std::size_t>(to)])) throw PreconditionViolation("level points lie in different components");
    EdgePath rev;
    for (int v = to; v != from;) {
        int k = via[static_cast<std::size_t>(v)];
        const auto& sg = s.level.segments[static_cast<std::size_t>(k)];
        int prev = sg.a == v ? sg.b : sg.a;
        // The Y segment edge is stored a → b.
        rev.push_back({s.segment_edge[static_cast<std::size_t>(k)], sg.b == v});
        v = prev;
    }
    std::reverse(rev.begin(), rev.end());
    return rev;
}

}  // namespace detail

/// One step of the Betti-number reduction argument, carried out on subdivide(x, refinement)
/// rescaled to unit systole. δ and r are in those units.
inline ImproveOutcome improve_step(const TwoComplex& x, const CocycleModP& a, const ImproveConfig& cfg) {
    cfg.validate();
    require_valid(x);
    if (!essential_certificate(x, a).essential()) throw PreconditionViolation("cocycle is not certified essential");
    ImproveOutcome out;
    auto rel = relative_systole(x, a, cfg.refinement);
    SystoleResult sys = rel;
    if (cfg.basepoint) {
        sys = based_systole(x, a, *cfg.basepoint, cfg.refinement);
        if (sys.value > rel.value * (1 + 1e-9))
            throw PreconditionViolation("basepoint " + std::to_string(*cfg.basepoint) + " is not on a systolic loop");
    }
    out.systole = rel.value;
    out.basepoint = sys.basepoint;
    out.systolic_loop = sys.witness;
    const double scale = 1.0 / rel.value;
    auto host = share(sys.refined->scaled(scale));
    out.normalized_host = host;
    const auto& alpha = *sys.cocycle;

    auto field = distance_field_on(host, out.basepoint, cfg.refinement);
    out.profile = ball_profile(field, 0.5, cfg.samples);
    out.r0 = fat_ball_test(out.profile, cfg.lambda, cfg.delta, 0.5);
    if (!out.r0) {
        out.variant = ImproveOutcome::Variant::Thin;
        out.table = thin_ball_bound(out.profile, cfg.lambda, cfg.delta, 0.5, cfg.epsilon);
        return out;
    }
    out.surgery = build_Y_on(field, alpha, *out.r0, 1.0);
    const auto& S = *out.surgery;
    const TwoComplex& X = *host;

    // The maximal arc of γ around x₀ inside the ball; γ starts at x₀.
    const auto& g = out.systolic_loop;
    const int m = static_cast<int>(g.size());
    int exit = -1, entry = -1;
    for (int i = 0; i < m; ++i)
        if (!S.inside(step_head(X, g[static_cast<std::size_t>(i)]))) {
            exit = i;
            break;
        }
    for (int j = m - 1; j >= 0; --j)
        if (!S.inside(step_tail(X, g[static_cast<std::size_t>(j)]))) {
            entry = j;
            break;
        }
    if (exit < 0 || entry < 0) throw PreconditionViolation("systolic loop stays inside the ball");
    const int q_out = S.level.point_of_edge[static_cast<std::size_t>(g[static_cast<std::size_t>(exit)].edge)];
    const int q_in = S.level.point_of_edge[static_cast<std::size_t>(g[static_cast<std::size_t>(entry)].edge)];
    out.exit_component = S.level.component_of_point[static_cast<std::size_t>(q_out)];
    out.entry_component = S.level.component_of_point[static_cast<std::size_t>(q_in)];

    if (out.exit_component == out.entry_component) {
        out.variant = ImproveOutcome::Variant::Refuted;
        EdgePath loop{{S.piece_of_edge[static_cast<std::size_t>(g[static_cast<std::size_t>(exit)].edge)], false}};
        EdgePath middle(g.begin() + exit + 1, g.begin() + entry);
        auto proj = S.project_loop(middle);
        loop.insert(loop.end(), proj.begin(), proj.end());
        loop.push_back({S.piece_of_edge[static_cast<std::size_t>(g[static_cast<std::size_t>(entry)].edge)], true});
        auto back = detail::path_along_level(S, q_in, q_out);
        loop.insert(loop.end(), back.begin(), back.end());
        out.shortcut = std::move(loop);
        out.shortcut_length = path_length(S.Y, out.shortcut);
        out.shortcut_holonomy = holonomy(S.Y, S.psi, out.shortcut);
        return out;
    }

    out.variant = ImproveOutcome::Variant::Improved;
    out.removed_edge = S.cone_edges[static_cast<std::size_t>(out.exit_component)];
    out.Y_prime = S.Y.without_free_edge(out.removed_edge);
    std::vector<modp::Scalar> labels = S.psi.labels();
    labels.erase(labels.begin() + out.removed_edge);
    out.psi_prime = CocycleModP(S.psi.prime(), std::move(labels));
    out.b1_X = S.b1_X;
    out.b1_Y = S.b1_Y;
    out.b1_Y_prime = betti1(*out.Y_prime);
    out.sigma_X = total_area(X);
    out.margin = (cfg.lambda - 0.5) * S.level_length * S.level_length;
    try {
        auto y_sys = systole_on(share(*out.Y_prime), std::make_shared<const CocycleModP>(*out.psi_prime), std::nullopt);
        out.systole_Y_prime = y_sys.value;
        out.sigma_Y_prime = total_area(*out.Y_prime) / (y_sys.value * y_sys.value);
    } catch (const TrivialCocycle&) {
        out.systole_Y_prime = std::numeric_limits<double>::infinity();
        out.sigma_Y_prime = std::numeric_limits<double>::infinity();
    }
    out.essential_Y_prime = essential_certificate(*out.Y_prime, *out.psi_prime).essential();
    return out;
}

}  // namespace systolic
