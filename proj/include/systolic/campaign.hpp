#pragma once

// Verification campaigns: σ floors, ball growth, coarea residuals and the
// surgery invariant suite over corpus instances.

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "systolic/cocycle.hpp"
#include "systolic/corpus.hpp"
#include "systolic/io.hpp"
#include "systolic/metric.hpp"
#include "systolic/surgery.hpp"
#include "systolic/systole.hpp"

namespace systolic::campaign {

inline constexpr double kSigmaFloor = 0.125;
inline constexpr double kGrowthConstant = 0.95;  // 1 − PL slack
inline constexpr double kCoareaTolerance = 1e-6;
inline constexpr double kAreaTolerance = 1e-6;

// ---------------------------------------------------------------------------
// GG constant

enum class BasepointPolicy { SystolicLoopPoint, BestOverVertices };

inline BasepointPolicy parse_policy(const std::string& s) {
    if (s == "systolic-loop-point") return BasepointPolicy::SystolicLoopPoint;
    if (s == "best-over-vertices") return BasepointPolicy::BestOverVertices;
    throw ConfigError("unknown basepoint policy '" + s + "'");
}

struct GGRow {
    double r, area, ratio;
};

struct GGReport {
    std::string complex_id, cocycle_id;
    int basepoint = -1;
    double C_hat = 0;
    std::vector<GGRow> table;
    int refinement = 0;
    double systole = 0;
};

/// min over sampled regular r ∈ (0, ½ sys] of a(r)/r² for balls at `source`.
inline std::vector<GGRow> gg_table(const DistanceField& field, double half_sys, int samples) {
    std::vector<GGRow> rows;
    double last = 0;
    for (int i = 1; i <= samples; ++i) {
        double r = nudge_to_regular(field, half_sys * i / samples);
        if (r > half_sys) r = nudge_to_regular(field, half_sys * (1 - 1e-6));
        if (!(r > last) || r > half_sys) continue;
        last = r;
        double a = ball_area(field, r);
        rows.push_back({r, a, a / (r * r)});
    }
    return rows;
}

/// Estimates the GG constant at the chosen basepoint. Throws DegenerateSampling
/// when half the systole does not reach past the first refined edges.
inline GGReport gg_report(const TwoComplex& x, const CocycleModP& a, BasepointPolicy policy, int refinement, int samples) {
    auto sys = relative_systole(x, a, refinement);
    const double half = 0.5 * sys.value;
    if (samples < 1) throw DegenerateSampling("no radii requested");
    if (!(half > sys.refined->max_edge_length()))
        throw DegenerateSampling("half the systole (" + io::format_double(half) + ") does not exceed the longest refined edge (" +
                                 io::format_double(sys.refined->max_edge_length()) + "); increase the refinement");
    std::vector<int> candidates;
    if (policy == BasepointPolicy::SystolicLoopPoint) candidates.push_back(sys.basepoint);
    else
        for (int v = 0; v < x.vertex_count(); ++v) candidates.push_back(v);
    GGReport best;
    best.C_hat = -1;
    for (int v : candidates) {
        auto field = distance_field_on(sys.refined, v, refinement);
        auto rows = gg_table(field, half, samples);
        if (rows.empty()) continue;
        double c = std::numeric_limits<double>::infinity();
        for (const auto& row : rows) c = std::min(c, row.ratio);
        if (c > best.C_hat) {
            best.C_hat = c;
            best.basepoint = v;
            best.table = std::move(rows);
        }
    }
    if (best.basepoint < 0) throw DegenerateSampling("no regular radius below half the systole; increase the refinement");
    best.refinement = refinement;
    best.systole = sys.value;
    return best;
}

// ---------------------------------------------------------------------------
// Surgery invariants

struct SurgeryCheck {
    int source = -1;
    double radius = 0;
    double area_X = 0, ball_area = 0, level_length = 0, area_Y = 0, area_bound = 0;
    int components = 0;
    int b1_X = 0, b1_Y = 0;
    int loops = 0, holonomy_failures = 0, nontrivial_loops = 0;
    double systole_X = 0, systole_Y = 0, slack = 0;
    bool area_ok = false, b1_ok = false, systole_ok = false;
    std::string error;

    bool ok() const { return error.empty() && area_ok && b1_ok && holonomy_failures == 0 && systole_ok; }
};

/// Random closed walks through X: a random walk from a random vertex, closed
/// along the shortest path back. The first loop is `seed_loop` when given.
inline std::vector<EdgePath> random_loops(const TwoComplex& x, int count, std::uint64_t seed, const EdgePath* seed_loop = nullptr) {
    std::vector<EdgePath> loops;
    if (seed_loop && count > 0) loops.push_back(*seed_loop);
    corpus::Lcg64 rng(seed);
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)); };
    while (static_cast<int>(loops.size()) < count) {
        int start = static_cast<int>(pick(static_cast<std::size_t>(x.vertex_count())));
        auto sp = dijkstra(x, start);
        EdgePath walk;
        int u = start;
        int steps = 1 + static_cast<int>(pick(24));
        for (int k = 0; k < steps; ++k) {
            const auto& inc = x.incident(u);
            if (inc.empty()) break;
            const auto& step = inc[pick(inc.size())];
            walk.push_back({step.edge, step.forward});
            u = step.neighbor;
        }
        EdgePath back;
        while (u != start) {
            int e = sp.parent_edge[static_cast<std::size_t>(u)];
            const auto& ed = x.edge(e);
            bool forward = ed.tail == u;
            back.push_back({e, forward});
            u = forward ? ed.head : ed.tail;
        }
        walk.insert(walk.end(), back.begin(), back.end());
        if (!walk.empty()) loops.push_back(std::move(walk));
    }
    return loops;
}

/// Vertices of x lying on a triangle. Balls centred elsewhere can have point
/// level sets, where the buffer cylinder is undefined.
inline std::vector<int> surface_vertices(const TwoComplex& x) {
    std::vector<int> out;
    for (int v = 0; v < x.vertex_count(); ++v)
        for (const auto& inc : x.incident(v))
            if (!x.cofaces(inc.edge).empty()) {
                out.push_back(v);
                break;
            }
    return out;
}

/// Builds Y(x, r) on the refined host of `sys` and checks the area, Betti,
/// holonomy-transport and systole invariants.
inline SurgeryCheck check_surgery(const SystoleResult& sys, int source, double r, int loop_count, std::uint64_t seed) {
    SurgeryCheck c;
    c.source = source;
    c.systole_X = sys.value;
    c.slack = sys.refined->max_edge_length();
    try {
        auto field = distance_field_on(sys.refined, source, sys.refinement);
        r = nudge_to_regular(field, r);
        c.radius = r;
        auto s = build_Y_on(field, *sys.cocycle, r, sys.value);
        c.area_X = s.area_X;
        c.ball_area = s.ball_area;
        c.level_length = s.level_length;
        c.components = s.level.components;
        c.area_Y = s.area_Y;
        c.area_bound = s.area_X - s.ball_area + 0.5 * s.level_length * s.level_length + kAreaTolerance * s.area_X;
        c.area_ok = c.area_Y <= c.area_bound;
        c.b1_X = s.b1_X;
        c.b1_Y = s.b1_Y;
        c.b1_ok = s.b1_Y <= s.b1_X;
        auto loops = random_loops(*sys.refined, loop_count, seed, &sys.witness);
        c.loops = static_cast<int>(loops.size());
        for (const auto& g : loops) {
            auto h = holonomy(*sys.refined, *sys.cocycle, g);
            auto img = s.project_loop(g);
            bool fine = true;
            try {
                if (!img.empty()) require_closed(s.Y, img);
                fine = holonomy(s.Y, s.psi, img) == h;
            } catch (const InvalidPath&) {
                fine = false;
            }
            c.nontrivial_loops += h != 0;
            c.holonomy_failures += !fine;
        }
        c.systole_Y = relative_systole(s.Y, s.psi, 0).value;
        c.systole_ok = c.systole_Y >= c.systole_X - 2 * c.slack;
    } catch (const Error& e) {
        c.error = e.what();
    }
    return c;
}

// ---------------------------------------------------------------------------
// Campaigns

struct InstanceRecord {
    std::string id;
    std::string family;
    bool valid = true;
    std::string invalid_reason;
    double sigma = 0, systole = 0, area = 0;
    int b1 = 0, b1_mod_p = 0;
    bool essential = false;
    std::string essential_source;
    std::map<std::string, std::string> checks;  // check → "pass" | "fail: …" | "skip: …"
    std::optional<double> gg_constant;
    double max_coarea_residual = 0;
    std::vector<SurgeryCheck> surgeries;
    double seconds = 0;
};

struct CampaignResult {
    std::vector<InstanceRecord> records;
    std::vector<std::string> counterexamples;
    /// Least σ over essential instances; an upper bound for σ_*, not its value.
    double sigma_min = std::numeric_limits<double>::infinity();
    std::string sigma_min_instance;
    int invalid = 0;

    bool pass() const { return counterexamples.empty(); }
};

struct Job {
    corpus::CorpusSpec spec;
    std::string file;
    std::set<std::string> checks;
};

inline std::vector<Job> expand(const io::CampaignConfig& cfg) {
    std::vector<Job> jobs;
    for (const auto& inst : cfg.instances) {
        Job base{inst.spec, inst.file, inst.checks.empty() ? cfg.checks : inst.checks};
        if (base.spec.id.empty() && !inst.file.empty()) base.spec.id = inst.file;
        jobs.push_back(base);
        for (int k = 1; k <= inst.perturb; ++k) {
            Job q = base;
            q.spec.seed = inst.spec.seed + static_cast<std::uint64_t>(k);
            if (q.spec.amplitude == 0) q.spec.amplitude = 0.1;
            if (!q.spec.id.empty()) q.spec.id += "#" + std::to_string(q.spec.seed);
            q.checks = inst.perturb_checks;
            jobs.push_back(q);
        }
    }
    return jobs;
}

/// Runs every check requested for one instance. Failures become "fail: …"
/// entries that the caller turns into counterexamples.
inline InstanceRecord run_instance(const Job& job, const io::CampaignConfig& cfg, std::size_t index) {
    auto t0 = std::chrono::steady_clock::now();
    InstanceRecord rec;
    rec.id = corpus::spec_id(job.spec);
    rec.family = job.file.empty() ? job.spec.family : "file";
    std::optional<TwoComplex> cx;
    std::optional<CocycleModP> ca;
    try {
        if (!job.file.empty()) {
            auto f = io::load_complex(job.file);
            if (f.cocycles.empty()) throw ParseError("file has no cocycle section");
            std::size_t which = 0;
            if (!job.spec.cocycle.empty()) which = static_cast<std::size_t>(std::stoul(job.spec.cocycle));
            if (which >= f.cocycles.size()) throw ParseError("cocycle index out of range");
            cx = f.complex;
            if (job.spec.amplitude > 0) cx = corpus::perturb_metric(*cx, job.spec.seed, job.spec.amplitude);
            ca = f.cocycles[which];
        } else {
            auto g = corpus::materialize(job.spec);
            ca = corpus::selected_cocycle(g, job.spec);
            cx = std::move(g.complex);
        }
        auto geo = validate(*cx);
        if (!geo.pass()) throw InvalidGeometry(geo.violations.front().message);
        require_labels(*cx, *ca);
        auto coc = validate_cocycle(*cx, *ca);
        if (!coc.pass()) throw PreconditionViolation("labels do not form a cocycle: " + coc.violations.front().message);
    } catch (const std::exception& e) {
        rec.valid = false;
        rec.invalid_reason = e.what();
        return rec;
    }
    const TwoComplex& x = *cx;
    const CocycleModP& a = *ca;
    const std::uint64_t p = a.prime().value();
    rec.area = total_area(x);
    rec.b1 = betti1(x);
    rec.b1_mod_p = betti1(x, Coefficients::mod(p));
    auto cert = essential_certificate(x, a);
    rec.essential = cert.essential();
    rec.essential_source = cert.source;
    const auto& ex = job.spec.expected;
    auto expect = [&](const char* what, bool ok, const std::string& detail) {
        if (!ok) rec.checks[std::string("expect-") + what] = "fail: " + detail;
    };
    if (ex.b1_rational) expect("b1", *ex.b1_rational == rec.b1, "b1 " + std::to_string(rec.b1) + " != " + std::to_string(*ex.b1_rational));
    if (ex.b1_mod_p)
        expect("b1-mod-p", *ex.b1_mod_p == rec.b1_mod_p, "b1 mod p " + std::to_string(rec.b1_mod_p) + " != " + std::to_string(*ex.b1_mod_p));
    if (ex.essential) expect("essential", *ex.essential == rec.essential, rec.essential ? "essential" : "inconclusive");

    std::optional<SystoleResult> sys;
    try {
        sys = relative_systole(x, a, cfg.refinement);
        rec.systole = sys->value;
        rec.sigma = rec.area / (sys->value * sys->value);
        if (ex.systole && std::abs(sys->value - *ex.systole) > 1e-6 * *ex.systole)
            rec.checks["expect-systole"] = "fail: systole " + io::format_double(sys->value) + " != " + io::format_double(*ex.systole);
    } catch (const TrivialCocycle& e) {
        rec.checks["systole"] = std::string("skip: ") + e.what();
    }
    auto verdict = [](bool ok, const std::string& why) { return ok ? std::string("pass") : "fail: " + why; };

    if (job.checks.count("sigma")) {
        if (!sys) rec.checks["sigma"] = "skip: trivial cocycle";
        else if (!rec.essential) rec.checks["sigma"] = "skip: not certified essential";
        else rec.checks["sigma"] = verdict(rec.sigma >= kSigmaFloor, "sigma " + io::format_double(rec.sigma) + " < 1/8");
    }
    if (job.checks.count("growth")) {
        if (!sys) rec.checks["growth"] = "skip: trivial cocycle";
        else if (rec.family != "moore") rec.checks["growth"] = "skip: asserted for Moore complexes only";
        else {
            try {
                auto gg = gg_report(x, a, BasepointPolicy::BestOverVertices, cfg.refinement, cfg.samples);
                rec.gg_constant = gg.C_hat;
                rec.checks["growth"] = verdict(gg.C_hat >= kGrowthConstant, "C_hat " + io::format_double(gg.C_hat) + " < 0.95");
            } catch (const DegenerateSampling& e) {
                rec.checks["growth"] = std::string("fail: ") + e.what();
            }
        }
    }
    if (job.checks.count("coarea")) {
        if (!sys) rec.checks["coarea"] = "skip: trivial cocycle";
        else {
            auto field = distance_field_on(sys->refined, sys->basepoint, cfg.refinement);
            double worst = 0;
            for (int i = 1; i <= cfg.samples; ++i) {
                double r = nudge_to_regular(field, 0.5 * sys->value * i / cfg.samples);
                worst = std::max(worst, coarea_residual(field, r, 0).residual);
            }
            rec.max_coarea_residual = worst;
            rec.checks["coarea"] = verdict(worst <= kCoareaTolerance * rec.area, "residual " + io::format_double(worst));
        }
    }
    if (job.checks.count("surgery")) {
        if (!sys) rec.checks["surgery"] = "skip: trivial cocycle";
        else {
            corpus::Lcg64 rng(cfg.seed * 7919u + index);
            bool all = true;
            std::string why;
            const auto sources = surface_vertices(x);
            for (int k = 0; k < cfg.surgery_samples && !sources.empty(); ++k) {
                int source = sources[static_cast<std::size_t>(rng.uniform() * static_cast<double>(sources.size()))];
                double r = sys->value * (0.1 + 0.3 * rng.uniform());
                auto c = check_surgery(*sys, source, r, cfg.loops, rng.next());
                if (!c.ok() && all) {
                    all = false;
                    why = c.error.empty() ? "invariant violated at source " + std::to_string(source) : c.error;
                }
                rec.surgeries.push_back(std::move(c));
            }
            rec.checks["surgery"] = sources.empty() ? "skip: no triangles" : verdict(all, why);
        }
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

/// Runs all instances (up to cfg.jobs at a time); the report order follows the config.
inline CampaignResult run_campaign(const io::CampaignConfig& cfg, const std::function<void(const InstanceRecord&)>& progress = {}) {
    auto jobs = expand(cfg);
    std::vector<InstanceRecord> records(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < jobs.size();) {
            records[i] = run_instance(jobs[i], cfg, i);
            if (progress) {
                std::lock_guard lock(mu);
                progress(records[i]);
            }
        }
    };
    const int n = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(jobs.size())));
    if (n == 1) worker();
    else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    CampaignResult res;
    for (auto& rec : records) {
        if (!rec.valid) ++res.invalid;
        for (const auto& [check, outcome] : rec.checks)
            if (outcome.rfind("fail", 0) == 0) res.counterexamples.push_back(rec.id + " [" + check + "] " + outcome.substr(6));
        if (rec.valid && rec.essential && rec.systole > 0 && rec.sigma < res.sigma_min) {
            res.sigma_min = rec.sigma;
            res.sigma_min_instance = rec.id;
        }
        res.records.push_back(std::move(rec));
    }
    return res;
}

/// The default campaign: the corpus Moore/wedge families with 50 perturbations each.
inline io::CampaignConfig default_config(int perturbations = 50) {
    io::CampaignConfig cfg;
    std::uint64_t k = 0;
    for (const auto& s : corpus::default_campaign(0)) {
        io::InstanceConfig inst;
        inst.spec = s;
        inst.spec.seed = 1000 * ++k;
        inst.perturb = perturbations;
        cfg.instances.push_back(inst);
    }
    return cfg;
}

}  // namespace systolic::campaign
