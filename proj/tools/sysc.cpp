// sysc: command-line front end for systole computations, surgery and campaigns.
//
// Exit codes: 0 pass, 1 counterexample or invalid input, 2 usage/config,
// 3 trivial cocycle, 4 degenerate sampling.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "systolic/campaign.hpp"
#include "systolic/corpus.hpp"
#include "systolic/io.hpp"
#include "systolic/surgery.hpp"
#include "systolic/systole.hpp"

using namespace systolic;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitTrivial = 3;
constexpr int kExitDegenerate = 4;

std::string num(double v) { return io::format_double(v); }

struct Input {
    io::ComplexFile file;
    CocycleModP cocycle() const { return file.cocycles.at(index); }
    std::size_t index = 0;
};

Input load_input(const std::string& path, int cocycle_index) {
    Input in{io::load_complex(path), 0};
    require_valid(in.file.complex);
    if (in.file.cocycles.empty()) throw ConfigError(path + " has no cocycle section");
    if (cocycle_index < 0 || static_cast<std::size_t>(cocycle_index) >= in.file.cocycles.size())
        throw ConfigError("cocycle index " + std::to_string(cocycle_index) + " out of range");
    in.index = static_cast<std::size_t>(cocycle_index);
    auto rep = validate_cocycle(in.file.complex, in.cocycle());
    if (!rep.pass()) throw ConfigError("cocycle " + std::to_string(cocycle_index) + " is not a cocycle: " + rep.violations.front().message);
    return in;
}

void print_systole(const char* label, const SystoleResult& s) {
    std::printf("%s %s\n", label, num(s.value).c_str());
    std::printf("witness_length %s\n", num(s.witness_length()).c_str());
    std::printf("witness_steps %zu\n", s.witness.size());
    std::printf("holonomy %u\n", s.holonomy);
    std::printf("basepoint %d\n", s.basepoint);
    std::printf("refinement %d\n", s.refinement);
}

nlohmann::json to_json(const campaign::CampaignResult& res) {
    nlohmann::json j;
    j["pass"] = res.pass();
    j["invalid"] = res.invalid;
    j["counterexamples"] = res.counterexamples;
    // Campaign minimum: an upper bound for the infimum, not its value.
    j["sigma_min_upper_bound"] = std::isfinite(res.sigma_min) ? nlohmann::json(res.sigma_min) : nlohmann::json();
    j["sigma_min_instance"] = res.sigma_min_instance;
    for (const auto& r : res.records) {
        nlohmann::json o;
        o["id"] = r.id;
        o["family"] = r.family;
        o["valid"] = r.valid;
        if (!r.valid) o["invalid_reason"] = r.invalid_reason;
        o["sigma"] = r.sigma;
        o["systole"] = r.systole;
        o["area"] = r.area;
        o["b1"] = r.b1;
        o["b1_mod_p"] = r.b1_mod_p;
        o["essential"] = r.essential;
        o["checks"] = r.checks;
        if (r.gg_constant) o["gg_constant"] = *r.gg_constant;
        o["max_coarea_residual"] = r.max_coarea_residual;
        for (const auto& s : r.surgeries)
            o["surgeries"].push_back({{"source", s.source},
                                       {"radius", s.radius},
                                       {"area_Y", s.area_Y},
                                       {"area_bound", s.area_bound},
                                       {"b1_X", s.b1_X},
                                       {"b1_Y", s.b1_Y},
                                       {"holonomy_failures", s.holonomy_failures},
                                       {"systole_X", s.systole_X},
                                       {"systole_Y", s.systole_Y},
                                       {"slack", s.slack},
                                       {"error", s.error}});
        o["seconds"] = r.seconds;
        j["records"].push_back(o);
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relative systoles, ball growth and buffer-cylinder surgery on piecewise-flat 2-complexes"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a corpus complex");
    corpus::CorpusSpec spec;
    std::string gen_config, gen_out;
    gen->add_option("--family", spec.family, "torus | moore | circle | wedge | dumbbell");
    gen->add_option("--p", spec.p, "Prime for the cocycles");
    gen->add_option("--n", spec.n, "Grid size or segments per wrap");
    gen->add_option("--rings", spec.rings, "Cone rings of the Moore disk");
    gen->add_option("--shape", spec.shape, "Moore cone height in units of p/(2 pi)");
    gen->add_option("--aspect", spec.aspect, "Torus aspect ratio");
    gen->add_option("--length", spec.length, "Circle length");
    gen->add_option("--scale", spec.scale, "Global metric scale");
    gen->add_option("--seed", spec.seed, "Perturbation seed");
    gen->add_option("--amplitude", spec.amplitude, "Perturbation amplitude in [0, 0.3)");
    gen->add_option("--config", gen_config, "Take the first [instance] block of a config file");
    gen->add_option("-o,--output", gen_out, "Output file (default stdout)");

    // systole
    auto* sys = app.add_subcommand("systole", "Relative or based systole");
    std::string sys_file, sys_witness;
    int sys_cocycle = 0, sys_ref = 2, sys_class = -1;
    std::optional<int> sys_based;
    bool sys_all = false;
    sys->add_option("file", sys_file, "Complex file")->required();
    sys->add_option("--cocycle", sys_cocycle, "Cocycle section index");
    sys->add_option("--class", sys_class, "Use class k of H^1 (enumeration order, 0 = zero class)");
    sys->add_flag("--all-classes", sys_all, "Report every nonzero class");
    sys->add_option("--refinement", sys_ref, "Subdivision levels");
    sys->add_option("--based", sys_based, "Basepoint vertex for the based systole");
    sys->add_option("--witness", sys_witness, "Write the witness loop to this file");

    // verify
    auto* ver = app.add_subcommand("verify", "Run a verification campaign");
    std::string ver_config, ver_report;
    int ver_jobs = 0, ver_perturb = 50;
    bool ver_default = false, ver_quiet = false;
    ver->add_option("config", ver_config, "Campaign config file");
    ver->add_flag("--default", ver_default, "Run the built-in default campaign");
    ver->add_option("--perturbations", ver_perturb, "Perturbed copies per instance in the default campaign");
    ver->add_option("--jobs", ver_jobs, "Concurrent instances");
    ver->add_option("--report", ver_report, "Write a JSON report");
    ver->add_flag("--quiet", ver_quiet, "Only print the summary");

    // gg
    auto* gg = app.add_subcommand("gg", "Estimate the ball-growth constant");
    std::string gg_file, gg_policy = "best-over-vertices", gg_csv;
    int gg_cocycle = 0, gg_ref = 3, gg_samples = 24;
    gg->add_option("file", gg_file, "Complex file")->required();
    gg->add_option("--cocycle", gg_cocycle, "Cocycle section index");
    gg->add_option("--policy", gg_policy, "systolic-loop-point | best-over-vertices");
    gg->add_option("--refinement", gg_ref, "Subdivision levels");
    gg->add_option("--samples", gg_samples, "Sampled radii");
    gg->add_option("--csv", gg_csv, "Write the r, area, ratio table");

    // improve
    auto* imp = app.add_subcommand("improve", "One Betti-number reduction step");
    std::string imp_file, imp_out;
    int imp_cocycle = 0;
    ImproveConfig icfg;
    std::optional<int> imp_base;
    imp->add_option("file", imp_file, "Complex file")->required();
    imp->add_option("--cocycle", imp_cocycle, "Cocycle section index");
    imp->add_option("--delta", icfg.delta, "delta in systole units");
    imp->add_option("--epsilon", icfg.epsilon, "epsilon");
    imp->add_option("--lambda", icfg.lambda, "lambda > 1/2 + epsilon/(4 delta^2)");
    imp->add_option("--refinement", icfg.refinement, "Subdivision levels");
    imp->add_option("--samples", icfg.samples, "Sampled radii");
    imp->add_option("--basepoint", imp_base, "Vertex on a systolic loop");
    imp->add_option("-o,--output", imp_out, "Write Y' here on an improvement");

    // profile
    auto* pro = app.add_subcommand("profile", "Ball profile CSV at a vertex");
    std::string pro_file, pro_out;
    int pro_source = 0, pro_ref = 2, pro_samples = 32, pro_cocycle = 0;
    double pro_rmax = 0;
    pro->add_option("file", pro_file, "Complex file")->required();
    pro->add_option("--source", pro_source, "Center vertex");
    pro->add_option("--refinement", pro_ref, "Subdivision levels");
    pro->add_option("--samples", pro_samples, "Sampled radii");
    pro->add_option("--rmax", pro_rmax, "Largest radius (default: half the based systole)");
    pro->add_option("--cocycle", pro_cocycle, "Cocycle section index for the default radius");
    pro->add_option("-o,--output", pro_out, "Output file (default stdout)");

    // validate
    auto* val = app.add_subcommand("validate", "Check geometry and cocycles of a complex file");
    std::string val_file;
    val->add_option("file", val_file, "Complex file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gen) {
            if (!gen_config.empty()) {
                auto cfg = io::load_config(gen_config);
                if (cfg.instances.empty()) throw ConfigError("config has no [instance] block");
                spec = cfg.instances.front().spec;
            }
            auto g = corpus::materialize(spec);
            std::vector<CocycleModP> cs;
            std::vector<std::string> names;
            for (const auto& c : g.cocycles) {
                cs.push_back(c.cocycle);
                names.push_back(c.name);
            }
            if (gen_out.empty()) io::write_complex(std::cout, g.complex, cs, names);
            else {
                std::ofstream out(gen_out);
                if (!out) throw ConfigError("cannot write " + gen_out);
                io::write_complex(out, g.complex, cs, names);
            }
            std::fprintf(stderr, "%s: %d vertices, %d edges, %d triangles\n", spec.family.c_str(), g.complex.vertex_count(),
                         g.complex.edge_count(), g.complex.triangle_count());
            return 0;
        }
        if (*sys) {
            auto in = load_input(sys_file, sys_cocycle);
            const auto& x = in.file.complex;
            if (sys_all) {
                auto classes = enumerate_classes(x, in.cocycle().prime());
                int nontrivial = 0;
                for (std::size_t k = 1; k < classes.size(); ++k) {
                    auto s = relative_systole(x, classes[k], sys_ref);
                    std::printf("class %zu systole %s holonomy %u\n", k, num(s.value).c_str(), s.holonomy);
                    ++nontrivial;
                }
                std::printf("nontrivial_classes %d\n", nontrivial);
                return 0;
            }
            CocycleModP a = in.cocycle();
            if (sys_class >= 0) {
                auto classes = enumerate_classes(x, a.prime());
                if (static_cast<std::size_t>(sys_class) >= classes.size()) throw ConfigError("class index out of range");
                a = classes[static_cast<std::size_t>(sys_class)];
            }
            auto s = sys_based ? based_systole(x, a, *sys_based, sys_ref) : relative_systole(x, a, sys_ref);
            print_systole(sys_based ? "based_systole" : "systole", s);
            std::printf("systolic_area %s\n", num(total_area(x) / (s.value * s.value)).c_str());
            if (!sys_witness.empty()) {
                std::ofstream out(sys_witness);
                io::write_path(out, s.witness);
            }
            return 0;
        }
        if (*ver) {
            io::CampaignConfig cfg;
            if (ver_default) cfg = campaign::default_config(ver_perturb);
            else if (!ver_config.empty()) cfg = io::load_config(ver_config);
            else throw ConfigError("verify needs a config file or --default");
            if (ver_jobs > 0) cfg.jobs = ver_jobs;
            auto progress = [&](const campaign::InstanceRecord& r) {
                if (ver_quiet) return;
                if (!r.valid) {
                    std::printf("%-28s invalid: %s\n", r.id.c_str(), r.invalid_reason.c_str());
                    return;
                }
                std::printf("%-28s sigma %-10.6g sys %-10.6g b1 %d/%d %s", r.id.c_str(), r.sigma, r.systole, r.b1, r.b1_mod_p,
                            r.essential ? "essential" : "inconclusive");
                for (const auto& [k, v] : r.checks) std::printf(" %s=%s", k.c_str(), v.rfind("pass", 0) == 0 ? "pass" : v.substr(0, 4).c_str());
                std::printf(" (%.2fs)\n", r.seconds);
                std::fflush(stdout);
            };
            auto res = campaign::run_campaign(cfg, progress);
            std::printf("instances %zu invalid %d counterexamples %zu\n", res.records.size(), res.invalid, res.counterexamples.size());
            if (std::isfinite(res.sigma_min))
                std::printf("sigma_min %s (%s); campaign upper bound for the infimum\n", num(res.sigma_min).c_str(),
                            res.sigma_min_instance.c_str());
            for (const auto& c : res.counterexamples) std::printf("counterexample %s\n", c.c_str());
            if (!ver_report.empty()) {
                std::ofstream out(ver_report);
                out << to_json(res).dump(2) << "\n";
            }
            std::printf("%s\n", res.pass() ? "PASS" : "FAIL");
            return res.pass() ? 0 : kExitFail;
        }
        if (*gg) {
            auto in = load_input(gg_file, gg_cocycle);
            auto rep = campaign::gg_report(in.file.complex, in.cocycle(), campaign::parse_policy(gg_policy), gg_ref, gg_samples);
            std::printf("C_hat %s\nbasepoint %d\nsystole %s\nrefinement %d\n", num(rep.C_hat).c_str(), rep.basepoint,
                        num(rep.systole).c_str(), rep.refinement);
            std::ofstream file;
            if (!gg_csv.empty()) file.open(gg_csv);
            std::ostream& os = gg_csv.empty() ? std::cout : file;
            os << "r,area,ratio\n";
            for (const auto& row : rep.table) os << num(row.r) << ',' << num(row.area) << ',' << num(row.ratio) << "\n";
            return 0;
        }
        if (*imp) {
            icfg.basepoint = imp_base;
            icfg.validate();
            auto in = load_input(imp_file, imp_cocycle);
            auto out = improve_step(in.file.complex, in.cocycle(), icfg);
            std::printf("outcome %s\nsystole %s\nbasepoint %d\n", to_string(out.variant), num(out.systole).c_str(), out.basepoint);
            if (out.variant == ImproveOutcome::Variant::Thin) {
                const auto& t = out.table;
                if (!t.hypothesis_holds) {
                    std::printf("hypothesis_failed_at %s\n", num(t.failing_radius).c_str());
                    return kExitFail;
                }
                std::printf("r,area,bound,margin,minb_bound,minb_margin\n");
                for (const auto& row : t.rows)
                    std::printf("%s,%s,%s,%s,%s,%s\n", num(row.r).c_str(), num(row.area).c_str(), num(row.bound).c_str(),
                                num(row.margin).c_str(), num(row.minb_bound).c_str(), num(row.minb_margin).c_str());
                std::printf("min_margin %s\n", num(t.min_margin).c_str());
                return t.passes(kBoundSlack) ? 0 : kExitFail;
            }
            const auto& S = *out.surgery;
            std::printf("r0 %s\nlevel_length %s\ncomponents %d\n", num(*out.r0).c_str(), num(S.level_length).c_str(), S.level.components);
            if (out.variant == ImproveOutcome::Variant::Refuted) {
                std::printf("shortcut_length %s\nshortcut_holonomy %u\n", num(out.shortcut_length).c_str(), out.shortcut_holonomy);
                io::write_path(std::cout, out.shortcut);
                return 0;
            }
            std::printf("b1_X %d\nb1_Y %d\nb1_Y_prime %d\nb1_delta %d\n", out.b1_X, out.b1_Y, out.b1_Y_prime, out.b1_X - out.b1_Y_prime);
            std::printf("sigma_X %s\nsigma_Y_prime %s\nmargin %s\nessential_Y_prime %s\n", num(out.sigma_X).c_str(),
                        num(out.sigma_Y_prime).c_str(), num(out.margin).c_str(), out.essential_Y_prime ? "yes" : "no");
            if (!imp_out.empty()) io::save_complex(imp_out, *out.Y_prime, {*out.psi_prime});
            return out.contract_holds() ? 0 : kExitFail;
        }
        if (*pro) {
            auto f = io::load_complex(pro_file);
            require_valid(f.complex);
            const CocycleModP* a = nullptr;
            if (!f.cocycles.empty() && pro_rmax <= 0) {
                if (pro_cocycle < 0 || static_cast<std::size_t>(pro_cocycle) >= f.cocycles.size()) throw ConfigError("cocycle index out of range");
                a = &f.cocycles[static_cast<std::size_t>(pro_cocycle)];
            }
            auto prof = ball_profile(f.complex, pro_source, a, pro_rmax, pro_samples, pro_ref);
            if (prof.size() < 2) throw DegenerateSampling("no regular radius in range");
            if (pro_out.empty()) io::write_profile_csv(std::cout, prof);
            else {
                std::ofstream out(pro_out);
                io::write_profile_csv(out, prof);
            }
            return 0;
        }
        if (*val) {
            auto f = io::load_complex(val_file);
            auto rep = validate(f.complex);
            int bad = 0;
            for (const auto& v : rep.violations) {
                std::printf("violation %s: %s\n", to_string(v.kind), v.message.c_str());
                ++bad;
            }
            for (std::size_t k = 0; k < f.cocycles.size(); ++k) {
                auto cr = validate_cocycle(f.complex, f.cocycles[k]);
                for (const auto& v : cr.violations) {
                    std::printf("cocycle %zu: %s\n", k, v.message.c_str());
                    ++bad;
                }
            }
            std::printf("vertices %d edges %d triangles %d cocycles %zu\n%s\n", f.complex.vertex_count(), f.complex.edge_count(),
                        f.complex.triangle_count(), f.cocycles.size(), bad ? "INVALID" : "VALID");
            return bad ? kExitFail : 0;
        }
    } catch (const TrivialCocycle& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitTrivial;
    } catch (const DegenerateSampling& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDegenerate;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFail;
    }
    return 0;
}
