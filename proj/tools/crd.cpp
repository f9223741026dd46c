// crd: command-line front end for the cross-ratio dynamics library.
//
// Exit codes: 0 success, 1 parse error, 2 domain error, 3 verification failure.

#include <iostream>

#include "CLI11.hpp"
#include "crd/cli.hpp"

namespace {

struct Flags {
    std::string alpha = "-1";
    long steps = 10;
    std::string branch = "no-backtrack";
    std::uint64_t seed = 0;
    std::vector<std::string> tol;
    std::string field;
    std::string out;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--alpha", f.alpha, "parameter alpha as RE or RE,IM")->capture_default_str();
    sub->add_option("--steps", f.steps, "number of orbit steps")->capture_default_str();
    sub->add_option("--branch", f.branch, "no-backtrack, eigen-largest or eigen-smallest")->capture_default_str();
    sub->add_option("--seed", f.seed, "random seed")->capture_default_str();
    sub->add_option("--tol", f.tol, "tolerance override NAME=VALUE (deg, cls, scalar, rel); repeatable");
    sub->add_option("--field", f.field, "real or complex");
    sub->add_option("--out", f.out, "write the main artifact to this file");
}

crd::cli::Config config(const Flags& f) {
    crd::cli::Config c;
    c.alpha = crd::io::parse_scalar(f.alpha);
    if (f.steps < 0) throw crd::Error(crd::Errc::ParseError, "--steps must be non-negative");
    c.steps = f.steps;
    c.branch = crd::cli::parse_branch(f.branch);
    c.seed = f.seed;
    for (auto& t : f.tol) crd::cli::apply_tolerance(c.tol, t);
    c.field = f.field;
    c.out = f.out;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-ratio dynamics of polygons in the projective line"};
    app.require_subcommand(1);
    Flags f;
    std::string input, suite = "all", sizes, c01 = "2", cube;
    std::vector<std::string> u_points;
    long n = 0, k = 0;
    double beta = 0;

    auto* integrals = app.add_subcommand("integrals", "integrals of a polygon (JSON)");
    auto* relate = app.add_subcommand("relate", "alpha-related partners of a polygon (JSON)");
    auto* orbit = app.add_subcommand("orbit", "iterate the dynamics; CSV trace and drift summary");
    auto* exceptional = app.add_subcommand("exceptional", "classify the relation at an exceptional alpha");
    auto* loxogon = app.add_subcommand("loxogon", "construct a loxogon");
    auto* frieze = app.add_subcommand("frieze", "frieze pattern of a closed odd-gon");
    auto* tetrahedron = app.add_subcommand("tetrahedron", "consistent edge labeling of a tetrahedron");
    auto* verify = app.add_subcommand("verify", "run property suites (JSON records)");
    auto* render = app.add_subcommand("render", "draw a polygon or an orbit trace in the Poincare disk (SVG)");

    for (auto* sub : {integrals, relate, orbit, frieze, render}) sub->add_option("input", input, "polygon JSON file")->required();
    render->get_option("input")->description("polygon JSON or orbit CSV file");
    exceptional->add_option("input", input, "polygon file, JSON array of cross-ratios, or \"c1;c2;...\"")->required();
    loxogon->add_option("--n", n, "number of vertices (even)")->required();
    loxogon->add_option("--k", k, "diagonal step (odd)")->required();
    loxogon->add_option("--beta", beta, "real construction parameter")->required();
    tetrahedron->add_option("--u", u_points, "four vertices, each RE[,IM] or inf")->required()->expected(4);
    tetrahedron->add_option("--c01", c01, "label of edge 01 as RE[,IM]")->capture_default_str();
    tetrahedron->add_option("--cube", cube, "complete the cube from v0 = RE[,IM]");
    verify->add_option("--suite", suite, "suite name or all")->capture_default_str();
    verify->add_option("--n", sizes, "polygon sizes, e.g. 5..12 or 6,7");
    for (auto* sub : {integrals, relate, orbit, exceptional, loxogon, frieze, tetrahedron, verify, render}) add_common(sub, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : crd::cli::ParseFailure;
    }

    return crd::cli::guarded(
        [&]() -> int {
            auto cfg = config(f);
            namespace c = crd::cli;
            if (*integrals) return c::integrals(input, cfg, std::cout);
            if (*relate) return c::relate(input, cfg, std::cout);
            if (*orbit) return c::orbit(input, cfg, std::cout, cfg.out.empty() ? std::cerr : std::cout);
            if (*exceptional) return c::exceptional(input, cfg, std::cout);
            if (*loxogon) return c::loxogon(n, k, beta, cfg, std::cout, std::cerr);
            if (*frieze) return c::frieze(input, cfg, std::cout);
            if (*tetrahedron) return c::tetrahedron(u_points, crd::io::parse_scalar(c01), cube, cfg, std::cout);
            if (*verify) return c::verify(suite, sizes, cfg, std::cout);
            return c::render(input, cfg, std::cout);
        },
        std::cerr);
}
