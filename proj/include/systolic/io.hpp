#pragma once

// Text formats: complexes with cocycles (SYSC 1), profile CSV, and the
// key = value campaign config.

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "systolic/cocycle.hpp"
#include "systolic/complex.hpp"
#include "systolic/corpus.hpp"
#include "systolic/metric.hpp"

namespace systolic::io {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct ComplexFile {
    TwoComplex complex;
    std::vector<CocycleModP> cocycles;
};

/// `names`, when given, are written as comments above each cocycle section.
inline void write_complex(std::ostream& os, const TwoComplex& x, const std::vector<CocycleModP>& cocycles = {},
                          const std::vector<std::string>& names = {}) {
    os << "SYSC 1\n";
    os << "v " << x.vertex_count() << "\n";
    for (int e = 0; e < x.edge_count(); ++e) {
        const auto& ed = x.edge(e);
        os << "e " << e << ' ' << ed.tail << ' ' << ed.head << ' ' << format_double(ed.length) << "\n";
    }
    for (int t = 0; t < x.triangle_count(); ++t) {
        const auto& tr = x.triangle(t);
        os << "t " << t << ' ' << tr.vertices[0] << ' ' << tr.vertices[1] << ' ' << tr.vertices[2] << ' ' << tr.edges[0]
           << ' ' << tr.edges[1] << ' ' << tr.edges[2] << "\n";
    }
    for (std::size_t k = 0; k < cocycles.size(); ++k) {
        const auto& c = cocycles[k];
        if (k < names.size()) os << "# cocycle " << k << ": " << names[k] << "\n";
        if (c.size() != static_cast<std::size_t>(x.edge_count()))
            throw DimensionMismatch("cocycle length differs from the edge count");
        os << "c " << c.prime().value() << "\n";
        for (int e = 0; e < x.edge_count(); ++e)
            if (c.label(e) != 0) os << "l " << e << ' ' << c.label(e) << "\n";
    }
}

/// Parses a SYSC 1 file. Ids must be listed in order; a triangle's edges join
/// (v1,v2), (v2,v3), (v3,v1). Geometry is not validated here.
inline ComplexFile read_complex(std::istream& is) {
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) { throw ParseError("line " + std::to_string(lineno) + ": " + msg); };
    bool header = false;
    int vertex_count = -1;
    ComplexBuilder b;
    struct Section {
        std::uint64_t p;
        std::vector<std::pair<long long, long long>> labels;
    };
    std::vector<Section> sections;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (!header) {
            int version = 0;
            if (tag != "SYSC" || !(ss >> version) || version != 1) fail("expected header 'SYSC 1'");
            header = true;
            continue;
        }
        auto rest_empty = [&] {
            std::string extra;
            if (ss >> extra) fail("trailing token '" + extra + "'");
        };
        if (tag == "v") {
            if (vertex_count >= 0) fail("duplicate vertex count");
            if (!(ss >> vertex_count) || vertex_count < 0) fail("bad vertex count");
            rest_empty();
            b = ComplexBuilder(vertex_count);
        } else if (tag == "e") {
            if (vertex_count < 0) fail("edge before vertex count");
            long long id, u, v;
            double len;
            if (!(ss >> id >> u >> v >> len)) fail("malformed edge");
            rest_empty();
            if (id != static_cast<long long>(b.edges().size())) fail("edge ids must be consecutive from 0");
            if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count) fail("edge endpoint out of range");
            b.add_edge(static_cast<int>(u), static_cast<int>(v), len);
        } else if (tag == "t") {
            long long id;
            std::array<long long, 3> vs{}, es{};
            if (!(ss >> id >> vs[0] >> vs[1] >> vs[2] >> es[0] >> es[1] >> es[2])) fail("malformed triangle");
            rest_empty();
            for (int i = 0; i < 3; ++i) {
                if (vs[i] < 0 || vs[i] >= vertex_count) fail("triangle vertex out of range");
                if (es[i] < 0 || es[i] >= static_cast<long long>(b.edges().size())) fail("triangle edge out of range");
                const auto& ed = b.edges()[static_cast<std::size_t>(es[i])];
                long long a = vs[i], c = vs[(i + 1) % 3];
                if (!((ed.tail == a && ed.head == c) || (ed.tail == c && ed.head == a)))
                    fail("triangle edge " + std::to_string(es[i]) + " does not join its vertices");
            }
            b.add_triangle(static_cast<int>(vs[0]), static_cast<int>(vs[1]), static_cast<int>(vs[2]), static_cast<int>(es[0]),
                           static_cast<int>(es[1]), static_cast<int>(es[2]));
            (void)id;
        } else if (tag == "c") {
            long long p;
            if (!(ss >> p) || p < 2) fail("malformed cocycle header");
            rest_empty();
            sections.push_back({static_cast<std::uint64_t>(p), {}});
        } else if (tag == "l") {
            if (sections.empty()) fail("label outside a cocycle section");
            long long e, label;
            if (!(ss >> e >> label)) fail("malformed label");
            rest_empty();
            sections.back().labels.emplace_back(e, label);
        } else {
            fail("unknown record '" + tag + "'");
        }
    }
    if (!header) throw ParseError("empty input: expected header 'SYSC 1'");
    if (vertex_count < 0) throw ParseError("missing vertex count");
    ComplexFile out{b.build(), {}};
    for (const auto& s : sections) {
        const modp::Prime p(s.p);
        std::vector<modp::Scalar> labels(static_cast<std::size_t>(out.complex.edge_count()), 0);
        for (auto [e, l] : s.labels) {
            if (e < 0 || e >= out.complex.edge_count()) throw ParseError("label for unknown edge " + std::to_string(e));
            labels[static_cast<std::size_t>(e)] = p.reduce(l);
        }
        out.cocycles.emplace_back(p, std::move(labels));
    }
    return out;
}

inline ComplexFile load_complex(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return read_complex(in);
}

inline void save_complex(const std::string& path, const TwoComplex& x, const std::vector<CocycleModP>& cocycles = {}) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    write_complex(out, x, cocycles);
}

/// One line per step: "<edge> +" or "<edge> -".
inline void write_path(std::ostream& os, const EdgePath& path) {
    for (const auto& s : path) os << s.edge << ' ' << (s.forward ? '+' : '-') << "\n";
}

inline void write_profile_csv(std::ostream& os, const BallProfile& prof) {
    os << "r,area,level_length,components,max_grad\n";
    for (std::size_t i = 0; i < prof.size(); ++i)
        os << format_double(prof.radii[i]) << ',' << format_double(prof.area[i]) << ',' << format_double(prof.level_length[i])
           << ',' << prof.components[i] << ',' << format_double(prof.max_grad[i]) << "\n";
}

inline BallProfile read_profile_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "r,area,level_length,components,max_grad") throw ParseError("bad profile header");
    BallProfile prof;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double r, a, l, g;
        int c;
        if (!(ss >> r >> a >> l >> c >> g)) throw ParseError("line " + std::to_string(lineno) + ": malformed profile row");
        prof.push(r, a, l, c, g);
    }
    return prof;
}

// ---------------------------------------------------------------------------
// Campaign config

struct InstanceConfig {
    corpus::CorpusSpec spec;
    /// Complex file; overrides the family generator when set.
    std::string file;
    /// Number of extra perturbed copies (seeds seed+1 … seed+perturb).
    int perturb = 0;
    /// Checks to run; empty means the campaign default.
    std::set<std::string> checks;
    /// Checks run on the perturbed copies.
    std::set<std::string> perturb_checks{"sigma"};
};

struct CampaignConfig {
    int refinement = 3;
    int samples = 24;
    int surgery_samples = 2;
    int loops = 100;
    int jobs = 1;
    std::uint64_t seed = 1;
    std::set<std::string> checks{"sigma", "growth", "coarea", "surgery"};
    std::vector<InstanceConfig> instances;
};

inline const std::set<std::string>& known_checks() {
    static const std::set<std::string> k{"sigma", "growth", "coarea", "surgery"};
    return k;
}

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::set<std::string> parse_checks(const std::string& v) {
    std::set<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        if (!known_checks().count(item)) throw ConfigError("unknown check '" + item + "'");
        out.insert(item);
    }
    return out;
}

}  // namespace detail

/// Parses the campaign config grammar (see docs/config.md).
inline CampaignConfig parse_config(std::istream& is, const std::string& base_dir = "") {
    CampaignConfig cfg;
    std::string line, section;
    int lineno = 0;
    auto fail = [&](const std::string& msg) { throw ConfigError("config line " + std::to_string(lineno) + ": " + msg); };
    auto to_int = [&](const std::string& v) {
        try {
            std::size_t pos = 0;
            long long n = std::stoll(v, &pos);
            if (pos != v.size()) fail("expected an integer, got '" + v + "'");
            return n;
        } catch (const std::logic_error&) {
            fail("expected an integer, got '" + v + "'");
        }
        return 0ll;
    };
    auto to_double = [&](const std::string& v) {
        try {
            std::size_t pos = 0;
            double d = std::stod(v, &pos);
            if (pos != v.size()) fail("expected a number, got '" + v + "'");
            return d;
        } catch (const std::logic_error&) {
            fail("expected a number, got '" + v + "'");
        }
        return 0.0;
    };
    auto to_bool = [&](const std::string& v) {
        if (v == "true" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "no" || v == "0") return false;
        fail("expected a boolean, got '" + v + "'");
        return false;
    };
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section == "instance") cfg.instances.emplace_back();
            else if (section != "campaign") fail("unknown section [" + section + "]");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) fail("empty key or value");
        if (section.empty() || section == "campaign") {
            if (key == "refinement") cfg.refinement = static_cast<int>(to_int(value));
            else if (key == "samples") cfg.samples = static_cast<int>(to_int(value));
            else if (key == "surgery_samples") cfg.surgery_samples = static_cast<int>(to_int(value));
            else if (key == "loops") cfg.loops = static_cast<int>(to_int(value));
            else if (key == "jobs") cfg.jobs = static_cast<int>(to_int(value));
            else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(value));
            else if (key == "checks") cfg.checks = detail::parse_checks(value);
            else fail("unknown campaign key '" + key + "'");
            continue;
        }
        auto& inst = cfg.instances.back();
        auto& s = inst.spec;
        if (key == "id") s.id = value;
        else if (key == "family") {
            auto fam = corpus::families();
            if (std::find(fam.begin(), fam.end(), value) == fam.end()) fail("unknown family '" + value + "'");
            s.family = value;
        } else if (key == "p") s.p = static_cast<std::uint64_t>(to_int(value));
        else if (key == "n") s.n = static_cast<int>(to_int(value));
        else if (key == "rings") s.rings = static_cast<int>(to_int(value));
        else if (key == "shape") s.shape = to_double(value);
        else if (key == "aspect") s.aspect = to_double(value);
        else if (key == "length") s.length = to_double(value);
        else if (key == "scale") s.scale = to_double(value);
        else if (key == "seed") s.seed = static_cast<std::uint64_t>(to_int(value));
        else if (key == "amplitude") s.amplitude = to_double(value);
        else if (key == "perturb") inst.perturb = static_cast<int>(to_int(value));
        else if (key == "cocycle") s.cocycle = value;
        else if (key == "file") inst.file = (base_dir.empty() || value.front() == '/') ? value : base_dir + "/" + value;
        else if (key == "checks") inst.checks = detail::parse_checks(value);
        else if (key == "perturb_checks") inst.perturb_checks = detail::parse_checks(value);
        else if (key == "expect_b1") s.expected.b1_rational = static_cast<int>(to_int(value));
        else if (key == "expect_b1_mod_p") s.expected.b1_mod_p = static_cast<int>(to_int(value));
        else if (key == "expect_essential") s.expected.essential = to_bool(value);
        else if (key == "expect_systole") s.expected.systole = to_double(value);
        else fail("unknown instance key '" + key + "'");
    }
    if (cfg.refinement < 0) throw ConfigError("refinement must be nonnegative");
    if (cfg.samples < 1) throw ConfigError("samples must be positive");
    if (cfg.jobs < 1) throw ConfigError("jobs must be positive");
    return cfg;
}

inline CampaignConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    auto slash = path.find_last_of('/');
    return parse_config(in, slash == std::string::npos ? "" : path.substr(0, slash));
}

}  // namespace systolic::io
