#pragma once

#include <filesystem>
#include <iomanip>
#include <iostream>

#include "io.hpp"
#include "suites.hpp"

// Command implementations behind the `crd` executable. Each command writes its main artifact
// to `out` (or to the --out file) and returns the process exit code.
namespace crd::cli {

using io::Json;

enum Exit : int { Pass = 0, ParseFailure = 1, DomainFailure = 2, VerifyFailure = 3 };

struct Config {
    Complex<double> alpha{-1};
    long steps = 10;
    BranchPolicy branch = BranchPolicy::NoBacktrack;
    std::uint64_t seed = 0;
    Tolerances<double> tol;
    std::string field;  // "", "real" or "complex"
    std::string out;    // artifact file; empty means stdout
};

inline BranchPolicy parse_branch(const std::string& s) {
    for (BranchPolicy b : {BranchPolicy::NoBacktrack, BranchPolicy::EigenLargest, BranchPolicy::EigenSmallest})
        if (s == branch_name(b)) return b;
    throw Error(Errc::ParseError, "unknown branch policy '" + s + "'");
}

// NAME=VALUE with NAME one of deg, cls, scalar, rel
inline void apply_tolerance(Tolerances<double>& t, const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw Error(Errc::ParseError, "tolerance must read NAME=VALUE: '" + spec + "'");
    std::string name = spec.substr(0, eq);
    double v = io::parse_scalar(spec.substr(eq + 1)).real();
    if (!(v > 0)) throw Error(Errc::ParseError, "tolerance must be positive: '" + spec + "'");
    if (name == "deg") t.deg = v;
    else if (name == "cls") t.cls = v;
    else if (name == "scalar") t.scalar = v;
    else if (name == "rel") t.rel = v;
    else throw Error(Errc::ParseError, "unknown tolerance '" + name + "' (deg, cls, scalar, rel)");
}

// "5..12", "6,7", "5..7,11"
inline std::vector<long> parse_sizes(const std::string& s) {
    std::vector<long> out;
    auto to_long = [&](const std::string& t) {
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != t.size()) throw Error(Errc::ParseError, "bad size list '" + s + "'");
        return v;
    };
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto dots = item.find("..");
        if (dots == std::string::npos) out.push_back(to_long(item));
        else {
            long a = to_long(item.substr(0, dots)), b = to_long(item.substr(dots + 2));
            if (b < a) throw Error(Errc::ParseError, "empty size range '" + item + "'");
            for (long k = a; k <= b; ++k) out.push_back(k);
        }
    }
    if (out.empty()) throw Error(Errc::ParseError, "empty size list");
    for (long k : out)
        if (k < 3) throw Error(Errc::ParseError, "polygon sizes start at 3");
    return out;
}

inline TwistedPolygon<double> with_field(TwistedPolygon<double> P, const Config& cfg) {
    if (cfg.field.empty()) return P;
    if (cfg.field == "complex") P.field = Field::Complex;
    else if (cfg.field == "real") {
        bool real = true;
        for (auto& p : P.vertices) real &= p.num.imag() == 0.0 && p.den.imag() == 0.0;
        if (!real) throw Error(Errc::ParseError, "--field real given for a polygon with complex vertices");
        P.field = Field::Real;
    } else throw Error(Errc::ParseError, "--field must be real or complex");
    return P;
}

inline void emit(const Config& cfg, std::ostream& out, const std::string& text) {
    if (cfg.out.empty()) out << text;
    else io::write_text(cfg.out, text);
}

// ---- commands ----

inline int integrals(const std::string& file, const Config& cfg, std::ostream& out) {
    auto P = with_field(io::read_polygon(file), cfg);
    auto r = crd::integrals(P, cfg.alpha, cfg.tol);
    emit(cfg, out, io::dump(io::integral_report_json(r, P.n(), P.field)));
    return Pass;
}

inline int relate(const std::string& file, const Config& cfg, std::ostream& out) {
    auto P = with_field(io::read_polygon(file), cfg);
    bool allow_complex = P.field == Field::Complex || cfg.alpha.imag() != 0.0;
    auto r = alpha_related(P, cfg.alpha, cfg.tol, allow_complex, cfg.seed);
    Json j;
    j["classification"] = relation_name(r.classification);
    j["alpha"] = io::scalar_json(cfg.alpha);
    j["residual"] = r.residual;
    j["eigenvalue_ratio"] = io::scalar_json(r.eigenvalue_ratio);
    j["complexified"] = r.complexified;
    Json partners = Json::array(), degenerate = Json::array();
    for (std::size_t i = 0; i < r.partners.size(); ++i) {
        partners.push_back(io::polygon_json(r.partners[i]));
        degenerate.push_back(static_cast<bool>(r.degenerate[i]));
    }
    j["partners"] = partners;
    j["degenerate"] = degenerate;
    emit(cfg, out, io::dump(j));
    return Pass;
}

// CSV trace to --out (or stdout); drift summary JSON to `summary`.
inline int orbit(const std::string& file, const Config& cfg, std::ostream& out, std::ostream& summary) {
    auto P = with_field(io::read_polygon(file), cfg);
    bool allow_complex = P.field == Field::Complex || cfg.alpha.imag() != 0.0;
    OrbitState<double> s;
    s.current = P;
    s.alpha = cfg.alpha;
    s.branch_policy = cfg.branch;
    const auto c0 = cross_ratios(P, cfg.tol);
    const auto F0 = F_all(c0);
    const auto prod0 = product(c0);
    std::string csv = io::csv_header(P.n(), static_cast<long>(F0.size())) + io::csv_row(0, c0, F0, prod0, 0.0);
    double drift_F = 0, drift_prod = 0, worst_residual = 0;
    std::string terminated;
    for (long k = 1; k <= cfg.steps; ++k) {
        try {
            s = step(s, cfg.tol, allow_complex);
        } catch (const Error& e) {
            if (e.code() == Errc::ParseError) throw;
            terminated = e.what();
            break;
        }
        auto c = cross_ratios(s.current, cfg.tol);
        auto F = F_all(c);
        for (std::size_t i = 0; i < F.size(); ++i) drift_F = std::max(drift_F, std::abs(F[i] - F0[i]) / std::max(1.0, std::abs(F0[i])));
        drift_prod = std::max(drift_prod, std::abs(product(c) - prod0) / std::max(1.0, std::abs(prod0)));
        worst_residual = std::max(worst_residual, s.residual);
        csv += io::csv_row(k, c, F, product(c), s.residual);
    }
    emit(cfg, out, csv);
    Json j;
    j["steps"] = s.step;
    j["requested_steps"] = cfg.steps;
    j["alpha"] = io::scalar_json(cfg.alpha);
    j["branch"] = branch_name(cfg.branch);
    j["max_drift_F"] = drift_F;
    j["max_drift_c_prod"] = drift_prod;
    j["max_residual"] = worst_residual;
    j["terminated"] = terminated.empty() ? Json(nullptr) : Json(terminated);
    summary << io::dump(j);
    return terminated.empty() ? Pass : DomainFailure;
}

// Input: a polygon file, a JSON array of cross-ratios, or an inline list "c1;c2;...".
inline CVec<double> read_cross_ratios(const std::string& input, const Tolerances<double>& tol) {
    if (std::filesystem::exists(input)) {
        Json j = io::parse_json(io::read_file(input), input);
        if (j.is_object() && j.contains("c")) j = j["c"];
        if (j.is_object()) return cross_ratios(io::polygon_from_json(j), tol);
        if (!j.is_array()) throw Error(Errc::ParseError, input + ": expected a polygon or an array of cross-ratios");
        CVec<double> c;
        for (std::size_t i = 0; i < j.size(); ++i) c.push_back(io::scalar_from_json(j[i], "c[" + std::to_string(i) + "]"));
        return c;
    }
    CVec<double> c;
    std::stringstream ss(input);
    std::string item;
    while (std::getline(ss, item, ';')) c.push_back(io::parse_scalar(item));
    return c;
}

inline int exceptional(const std::string& input, const Config& cfg, std::ostream& out) {
    auto c = read_cross_ratios(input, cfg.tol);
    if (c.size() < 3) throw Error(Errc::ParseError, "need at least three cross-ratios");
    auto r = exceptional_classify(c, cfg.alpha, cfg.tol.cls, cfg.seed);
    Json j;
    j["kind"] = exceptional_name(r.kind);
    j["alpha"] = io::scalar_json(cfg.alpha);
    j["c"] = io::scalars_json(c);
    j["closure"] = io::scalars_json(r.closure);
    j["trace_residual"] = io::scalar_json(r.trace_residual);
    j["u"] = io::scalars_json(r.u);
    j["u_sums"] = io::scalars_json(r.u_sums);
    j["u_product"] = io::scalar_json(r.u_product);
    j["dij_residual"] = r.dij_residual;
    emit(cfg, out, io::dump(j));
    return Pass;
}

inline int loxogon(long n, long k, double beta, const Config& cfg, std::ostream& out, std::ostream& err) {
    auto P = make_loxogon<double>(n, k, beta);
    auto r = verify_loxogon(P, k, cfg.tol.rel);
    emit(cfg, out, io::dump(io::polygon_json(P)));
    Json j;
    j["alpha"] = io::scalar_json(r.alpha);
    j["residual"] = r.residual;
    j["is_loxogon"] = r.is_loxogon;
    j["rigidity_case"] = r.rigidity_case;
    j["projectively_regular"] = r.projectively_regular;
    err << io::dump(j);
    return r.is_loxogon ? Pass : VerifyFailure;
}

inline std::string entry_text(Complex<double> z) {
    char buf[64];
    if (std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z.real()))) std::snprintf(buf, sizeof buf, "%.6g", z.real());
    else std::snprintf(buf, sizeof buf, "%.4g%+.4gi", z.real(), z.imag());
    return buf;
}

// Rows d = 1 .. n-1 of the frieze [V_i, V_{i+d}]: aligned text to `out`, JSON to --out.
inline int frieze(const std::string& file, const Config& cfg, std::ostream& out) {
    auto P = with_field(io::read_polygon(file), cfg);
    auto V = lift_to_vectors(P, cfg.tol);
    long n = P.n();
    std::vector<CVec<double>> rows;
    for (long d = 1; d < n; ++d) {
        CVec<double> row;
        for (long i = 0; i < n; ++i) row.push_back(frieze_entry(V, i, i + d));
        rows.push_back(row);
    }
    std::size_t w = 0;
    for (auto& row : rows)
        for (auto& z : row) w = std::max(w, entry_text(z).size());
    w += 2;
    std::string text;
    for (std::size_t d = 0; d < rows.size(); ++d) {
        std::string line(d * w / 2, ' ');
        for (auto& z : rows[d]) {
            std::string e = entry_text(z);
            line += std::string(w - e.size(), ' ') + e;
        }
        text += line + "\n";
    }
    out << text;
    if (!cfg.out.empty()) {
        Json j;
        j["n"] = n;
        Json jr = Json::array();
        for (auto& row : rows) jr.push_back(io::scalars_json(row));
        j["rows"] = jr;
        io::write_text(cfg.out, io::dump(j));
    }
    return Pass;
}

inline std::array<Point<double>, 4> parse_four_points(const std::vector<std::string>& items) {
    if (items.size() != 4) throw Error(Errc::ParseError, "a tetrahedron needs four vertices");
    std::array<Point<double>, 4> u;
    for (std::size_t k = 0; k < 4; ++k) u[k] = io::parse_point(items[k]);
    return u;
}

inline int tetrahedron(const std::vector<std::string>& u_text, Complex<double> c01, const std::string& cube_v0, const Config& cfg, std::ostream& out) {
    auto L = consistent_labeling(parse_four_points(u_text), c01, cfg.tol.deg);
    auto r = verify_labeling(L);
    Json j;
    Json labels;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) labels["c_" + std::to_string(a) + std::to_string(b)] = io::scalar_json(L.label(a, b));
    j["labels"] = labels;
    j["opposite"] = r.opposite;
    j["vertex_product"] = r.vertex_product;
    j["adjacency"] = r.adjacency;
    j["matrix_identity"] = r.matrix_identity;
    j["matrix_pairs"] = r.matrix_pairs;
    double worst = std::max({r.opposite, r.vertex_product, r.adjacency});
    double scale = 1;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            if (a != b) scale = std::max(scale, L.A(a, b).max_abs());
    worst = std::max({worst, r.matrix_identity / (scale * scale * scale), r.matrix_pairs / (scale * scale)});
    if (!cube_v0.empty()) {
        auto cube = cube_complete(L, io::parse_point(cube_v0), cfg.tol.deg);
        Json jc;
        Json v = Json::array();
        for (auto& p : cube.v) v.push_back(io::point_json(p));
        jc["v"] = v;
        jc["faces"] = cube.faces;
        jc["transports"] = cube.transports;
        jc["cross_ratio"] = cube.cross_ratio;
        j["cube"] = jc;
        worst = std::max({worst, cube.faces, cube.transports, cube.cross_ratio});
    }
    j["pass"] = worst < cfg.tol.rel;
    emit(cfg, out, io::dump(j));
    return worst < cfg.tol.rel ? Pass : VerifyFailure;
}

inline int verify(const std::string& suite, const std::string& sizes, const Config& cfg, std::ostream& out) {
    std::vector<std::string> names;
    if (suite == "all")
        for (auto& [k, f] : suites::registry()) names.push_back(k);
    else if (suites::find(suite)) names.push_back(suite);
    else {
        std::string known;
        for (auto& [k, f] : suites::registry()) known += " " + k;
        throw Error(Errc::ParseError, "unknown suite '" + suite + "' (known:" + known + ", all)");
    }
    suites::Options o;
    if (!sizes.empty()) o.sizes = parse_sizes(sizes);
    o.seed = cfg.seed;
    Json arr = Json::array();
    bool ok = true;
    for (auto& name : names) {
        for (auto& r : suites::run(name, o)) {
            Json j;
            j["suite"] = name;
            j["check"] = r.check;
            j["n"] = r.n;
            j["samples"] = r.samples;
            j["max_residual"] = r.max_residual;
            j["pass"] = r.pass;
            arr.push_back(j);
            ok &= r.pass;
        }
    }
    emit(cfg, out, io::dump(arr));
    return ok ? Pass : VerifyFailure;
}

inline int render(const std::string& file, const Config& cfg, std::ostream& out) {
    std::string text = io::read_file(file);
    std::vector<TwistedPolygon<double>> polys;
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '{' || text[first] == '['))
        polys.push_back(with_field(io::polygon_from_json(io::parse_json(text, file)), cfg));
    else
        for (auto& c : io::read_trace_c(text)) polys.push_back(reconstruct(c, cfg.tol));
    io::SvgStyle st;
    st.tau = cfg.tol.deg;
    emit(cfg, out, io::render_svg(polys, st));
    return Pass;
}

// Runs a command, mapping errors to exit codes.
template <class F> int guarded(F&& f, std::ostream& err) {
    try {
        return f();
    } catch (const Error& e) {
        err << "crd: " << e.what() << "\n";
        return e.code() == Errc::ParseError ? ParseFailure : DomainFailure;
    }
}

} // namespace crd::cli
