#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "systolic/io.hpp"

using namespace systolic;
using namespace systolic::io;

namespace {

ComplexFile parse(const std::string& text) {
    std::istringstream in(text);
    return read_complex(in);
}

std::string parse_error(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

CampaignConfig config(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string config_error(const std::string& text) {
    try {
        config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(ComplexFormat, RoundTripCorpus) {
    for (const auto& [name, g] : fixtures::small_corpus()) {
        std::vector<CocycleModP> cs;
        for (const auto& c : g.cocycles) cs.push_back(c.cocycle);
        std::stringstream ss;
        write_complex(ss, g.complex, cs);
        auto back = read_complex(ss);
        const auto& x = g.complex;
        const auto& y = back.complex;
        ASSERT_EQ(y.vertex_count(), x.vertex_count()) << name;
        ASSERT_EQ(y.edge_count(), x.edge_count()) << name;
        ASSERT_EQ(y.triangle_count(), x.triangle_count()) << name;
        for (int e = 0; e < x.edge_count(); ++e) {
            EXPECT_EQ(y.edge(e).tail, x.edge(e).tail);
            EXPECT_EQ(y.edge(e).head, x.edge(e).head);
            EXPECT_EQ(y.edge_length(e), x.edge_length(e)) << "lengths must round-trip bit for bit";
        }
        for (int t = 0; t < x.triangle_count(); ++t) {
            EXPECT_EQ(y.triangle(t).vertices, x.triangle(t).vertices);
            EXPECT_EQ(y.triangle(t).edges, x.triangle(t).edges);
            EXPECT_EQ(y.triangle(t).signs, x.triangle(t).signs);
        }
        ASSERT_EQ(back.cocycles.size(), cs.size()) << name;
        for (std::size_t k = 0; k < cs.size(); ++k) EXPECT_EQ(back.cocycles[k], cs[k]) << name;
        EXPECT_EQ(total_area(y), total_area(x));
    }
}

TEST(ComplexFormat, CommentsAndBlankLines) {
    auto f = parse("# leading comment\n\nSYSC 1\nv 3  # three vertices\ne 0 0 1 1\ne 1 1 2 1\ne 2 2 0 1\n"
                   "t 0 0 1 2 0 1 2\nc 3\nl 0 4\n");
    EXPECT_EQ(f.complex.triangle_count(), 1);
    ASSERT_EQ(f.cocycles.size(), 1u);
    EXPECT_EQ(f.cocycles[0].label(0), 1u);  // reduced mod 3
    EXPECT_EQ(f.cocycles[0].label(1), 0u);
}

TEST(ComplexFormat, ErrorsCarryLineNumbers) {
    EXPECT_EQ(parse_error(""), "empty input: expected header 'SYSC 1'");
    EXPECT_EQ(parse_error("SYSC 2\n"), "line 1: expected header 'SYSC 1'");
    EXPECT_EQ(parse_error("SYSC 1\n"), "missing vertex count");
    EXPECT_EQ(parse_error("SYSC 1\ne 0 0 1 1\n"), "line 2: edge before vertex count");
    EXPECT_EQ(parse_error("SYSC 1\nv 2\ne 1 0 1 1\n"), "line 3: edge ids must be consecutive from 0");
    EXPECT_EQ(parse_error("SYSC 1\nv 2\ne 0 0 2 1\n"), "line 3: edge endpoint out of range");
    EXPECT_EQ(parse_error("SYSC 1\nv 2\ne 0 0 1\n"), "line 3: malformed edge");
    EXPECT_EQ(parse_error("SYSC 1\nv 2\ne 0 0 1 1 9\n"), "line 3: trailing token '9'");
    EXPECT_EQ(parse_error("SYSC 1\nv 3\ne 0 0 1 1\ne 1 1 2 1\ne 2 2 0 1\nt 0 0 1 2 0 2 1\n"),
              "line 6: triangle edge 2 does not join its vertices");
    EXPECT_EQ(parse_error("SYSC 1\nv 2\nl 0 1\n"), "line 3: label outside a cocycle section");
    EXPECT_EQ(parse_error("SYSC 1\nv 2\nc 1\n"), "line 3: malformed cocycle header");
    EXPECT_EQ(parse_error("SYSC 1\nv 2\nq\n"), "line 3: unknown record 'q'");
    EXPECT_EQ(parse_error("SYSC 1\nv 2\nv 2\n"), "line 3: duplicate vertex count");
    EXPECT_EQ(parse_error("SYSC 1\nv 2\ne 0 0 1 1\nc 2\nl 5 1\n"), "label for unknown edge 5");
}

TEST(ComplexFormat, GeometryIsValidatedSeparately) {
    auto f = parse("SYSC 1\nv 3\ne 0 0 1 1\ne 1 1 2 1\ne 2 2 0 3\nt 0 0 1 2 0 1 2\n");
    auto r = validate(f.complex);
    EXPECT_FALSE(r.pass());
}

TEST(ComplexFormat, WriteRejectsMismatchedCocycle) {
    auto x = fixtures::single_triangle();
    std::ostringstream os;
    EXPECT_THROW(write_complex(os, x, {CocycleModP(modp::Prime(2), {1, 0})}), DimensionMismatch);
}

TEST(ComplexFormat, NamesBecomeComments) {
    auto g = corpus::gen_torus(2);
    std::ostringstream os;
    write_complex(os, g.complex, {g.cocycles[0].cocycle}, {"meridian"});
    EXPECT_NE(os.str().find("# cocycle 0: meridian\n"), std::string::npos);
    std::istringstream in(os.str());
    EXPECT_EQ(read_complex(in).cocycles.size(), 1u);
}

TEST(PathFormat, OneStepPerLine) {
    std::ostringstream os;
    write_path(os, {{3, true}, {0, false}});
    EXPECT_EQ(os.str(), "3 +\n0 -\n");
}

TEST(ProfileCsv, RoundTrip) {
    BallProfile p;
    p.push(0, 0, 0, 0, 0);
    p.push(0.1, 0.0314159, 0.6283, 1, 1.0);
    p.push(1.0 / 3.0, 0.3, 2.0, 2, 0.999999999999);
    std::stringstream ss;
    write_profile_csv(ss, p);
    auto q = read_profile_csv(ss);
    ASSERT_EQ(q.size(), p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        EXPECT_EQ(q.radii[i], p.radii[i]);
        EXPECT_EQ(q.area[i], p.area[i]);
        EXPECT_EQ(q.level_length[i], p.level_length[i]);
        EXPECT_EQ(q.components[i], p.components[i]);
        EXPECT_EQ(q.max_grad[i], p.max_grad[i]);
    }
}

TEST(ProfileCsv, Errors) {
    std::istringstream bad_header("r,area\n");
    EXPECT_THROW(read_profile_csv(bad_header), ParseError);
    std::istringstream bad_row("r,area,level_length,components,max_grad\n0,0,0,0,0\n1,2\n");
    try {
        read_profile_csv(bad_row);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_STREQ(e.what(), "line 3: malformed profile row");
    }
}

TEST(Config, DefaultsAndCampaignKeys) {
    auto c = config("");
    EXPECT_EQ(c.refinement, 3);
    EXPECT_EQ(c.samples, 24);
    EXPECT_EQ(c.jobs, 1);
    EXPECT_EQ(c.checks, known_checks());
    EXPECT_TRUE(c.instances.empty());
    c = config("refinement = 2\nsamples=8\n[campaign]\nloops = 10 # comment\njobs = 1\nseed = 9\nchecks = sigma, coarea\n");
    EXPECT_EQ(c.refinement, 2);
    EXPECT_EQ(c.samples, 8);
    EXPECT_EQ(c.loops, 10);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.checks, (std::set<std::string>{"sigma", "coarea"}));
}

TEST(Config, Instances) {
    auto c = config(
        "[instance]\nid = m3\nfamily = moore\np = 3\nshape = 1.6\nperturb = 4\namplitude = 0.05\n"
        "expect_b1 = 0\nexpect_b1_mod_p = 1\nexpect_essential = yes\n"
        "[instance]\nfamily = torus\nn = 8\ncocycle = longitude\nexpect_systole = 1\nchecks = sigma\n");
    ASSERT_EQ(c.instances.size(), 2u);
    const auto& a = c.instances[0];
    EXPECT_EQ(a.spec.id, "m3");
    EXPECT_EQ(a.spec.p, 3u);
    EXPECT_DOUBLE_EQ(a.spec.shape, 1.6);
    EXPECT_EQ(a.perturb, 4);
    EXPECT_DOUBLE_EQ(a.spec.amplitude, 0.05);
    EXPECT_EQ(a.spec.expected.b1_rational, 0);
    EXPECT_EQ(a.spec.expected.b1_mod_p, 1);
    EXPECT_EQ(a.spec.expected.essential, true);
    EXPECT_EQ(a.perturb_checks, (std::set<std::string>{"sigma"}));
    const auto& b = c.instances[1];
    EXPECT_EQ(b.spec.family, "torus");
    EXPECT_EQ(b.spec.n, 8);
    EXPECT_EQ(b.spec.cocycle, "longitude");
    EXPECT_EQ(b.spec.expected.systole, 1.0);
    EXPECT_EQ(b.checks, (std::set<std::string>{"sigma"}));
}

TEST(Config, FilePathsRelativeToConfig) {
    std::istringstream in("[instance]\nfile = x.sysc\n[instance]\nfile = /abs/y.sysc\n");
    auto c = parse_config(in, "/data/cfg");
    EXPECT_EQ(c.instances[0].file, "/data/cfg/x.sysc");
    EXPECT_EQ(c.instances[1].file, "/abs/y.sysc");
}

TEST(Config, Errors) {
    EXPECT_EQ(config_error("[oops]\n"), "config line 1: unknown section [oops]");
    EXPECT_EQ(config_error("[instance\n"), "config line 1: unterminated section header");
    EXPECT_EQ(config_error("refinement\n"), "config line 1: expected key = value");
    EXPECT_EQ(config_error("refinement =\n"), "config line 1: empty key or value");
    EXPECT_EQ(config_error("# c\nrefinement = two\n"), "config line 2: expected an integer, got 'two'");
    EXPECT_EQ(config_error("samples = 3x\n"), "config line 1: expected an integer, got '3x'");
    EXPECT_EQ(config_error("colour = red\n"), "config line 1: unknown campaign key 'colour'");
    EXPECT_EQ(config_error("[instance]\nfamily = klein\n"), "config line 2: unknown family 'klein'");
    EXPECT_EQ(config_error("[instance]\nshape = tall\n"), "config line 2: expected a number, got 'tall'");
    EXPECT_EQ(config_error("[instance]\nexpect_essential = maybe\n"), "config line 2: expected a boolean, got 'maybe'");
    EXPECT_EQ(config_error("[instance]\nwidth = 2\n"), "config line 2: unknown instance key 'width'");
    EXPECT_EQ(config_error("checks = sigma, volume\n"), "unknown check 'volume'");
    EXPECT_EQ(config_error("refinement = -1\n"), "refinement must be nonnegative");
    EXPECT_EQ(config_error("samples = 0\n"), "samples must be positive");
    EXPECT_EQ(config_error("jobs = 0\n"), "jobs must be positive");
    EXPECT_THROW(load_config("/nonexistent/campaign.cfg"), ConfigError);
}
