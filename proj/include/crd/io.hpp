#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "lax.hpp"

// Flat-file formats: polygon JSON, reports as JSON with 17 significant digits, orbit traces as
// CSV and SVG drawings in the Poincare disk. All writers are deterministic.
namespace crd::io {

using Json = nlohmann::ordered_json;

// ---- numbers ----

inline std::string format17(double x) {
    if (!std::isfinite(x)) return "null";
    if (x == 0) return "0";  // also folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void dump_to(std::string& out, const Json& j, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ',';
            first = false;
            newline(depth + 1);
            out += Json(it.key()).dump();
            out += indent < 0 ? ":" : ": ";
            dump_to(out, it.value(), indent, depth + 1);
        }
        newline(depth);
        out += '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // arrays of numbers stay on one line
        bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_number() || e.is_null(); });
        out += '[';
        bool first = true;
        for (const auto& e : j) {
            if (!first) out += flat && indent >= 0 ? ", " : ",";
            first = false;
            if (!flat) newline(depth + 1);
            dump_to(out, e, indent, depth + 1);
        }
        if (!flat) newline(depth);
        out += ']';
        return;
    }
    case Json::value_t::number_float: out += format17(j.get<double>()); return;
    default: out += j.dump(); return;
    }
}

// JSON text with every floating-point number printed to 17 significant digits.
inline std::string dump(const Json& j, int indent = 2) {
    std::string out;
    dump_to(out, j, indent, 0);
    if (indent >= 0) out += '\n';
    return out;
}

// ---- scalars and points ----

inline Json scalar_json(Complex<double> z) { return Json::array({z.real(), z.imag()}); }

inline Json scalars_json(const CVec<double>& v) {
    Json a = Json::array();
    for (auto& z : v) a.push_back(scalar_json(z));
    return a;
}

inline Json point_json(const Point<double>& p) { return Json{{"num", scalar_json(p.num)}, {"den", scalar_json(p.den)}}; }

[[noreturn]] inline void parse_fail(const std::string& what) { throw Error(Errc::ParseError, what); }

inline Complex<double> scalar_from_json(const Json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && (j.size() == 1 || j.size() == 2) && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_number(); }))
        return {j[0].get<double>(), j.size() == 2 ? j[1].get<double>() : 0.0};
    parse_fail(where + ": expected a number or [re, im]");
}

inline Point<double> point_from_json(const Json& j, const std::string& where) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return Point<double>::infinity();
        parse_fail(where + ": the only string vertex is \"inf\"");
    }
    if (j.is_object()) {
        if (!j.contains("num") || !j.contains("den")) parse_fail(where + ": homogeneous vertex needs \"num\" and \"den\"");
        try {
            return Point<double>::from(scalar_from_json(j["num"], where + ".num"), scalar_from_json(j["den"], where + ".den"));
        } catch (const Error& e) {
            if (e.code() == Errc::ParseError) throw;
            parse_fail(where + ": " + e.what());
        }
    }
    return Point<double>::affine(scalar_from_json(j, where));
}

// "RE" or "RE,IM"
inline Complex<double> parse_scalar(const std::string& s) {
    auto number = [&](const std::string& t) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            parse_fail("not a number: '" + t + "'");
        }
        if (used != t.size()) parse_fail("not a number: '" + t + "'");
        return v;
    };
    auto comma = s.find(',');
    if (comma == std::string::npos) return {number(s), 0.0};
    return {number(s.substr(0, comma)), number(s.substr(comma + 1))};
}

// "RE[,IM]" or "inf"
inline Point<double> parse_point(const std::string& s) {
    if (s == "inf") return Point<double>::infinity();
    return Point<double>::affine(parse_scalar(s));
}

// ---- polygons ----

inline Json polygon_json(const TwistedPolygon<double>& P) {
    Json j;
    j["field"] = field_name(P.field);
    j["n"] = P.n();
    Json v = Json::array();
    for (auto& p : P.vertices) v.push_back(point_json(p));
    j["vertices"] = v;
    const Matrix2<double>& M = P.monodromy;
    if (M.b == Complex<double>(0) && M.c == Complex<double>(0) && M.a == M.d) j["monodromy"] = nullptr;
    else j["monodromy"] = Json::array({scalar_json(M.a), scalar_json(M.b), scalar_json(M.c), scalar_json(M.d)});
    return j;
}

inline TwistedPolygon<double> polygon_from_json(const Json& j) {
    if (!j.is_object()) parse_fail("polygon: expected a JSON object");
    if (!j.contains("vertices") || !j["vertices"].is_array()) parse_fail("polygon: missing \"vertices\" array");
    TwistedPolygon<double> P;
    const Json& vs = j["vertices"];
    for (std::size_t i = 0; i < vs.size(); ++i) P.vertices.push_back(point_from_json(vs[i], "vertices[" + std::to_string(i) + "]"));
    if (j.contains("n")) {
        if (!j["n"].is_number_integer() || j["n"].get<long>() != P.n()) parse_fail("polygon: \"n\" does not match the number of vertices");
    }
    if (P.n() < 3) parse_fail("polygon: at least three vertices are needed");
    if (j.contains("monodromy") && !j["monodromy"].is_null()) {
        const Json& m = j["monodromy"];
        if (!m.is_array() || m.size() != 4) parse_fail("polygon: \"monodromy\" must be null or four [re, im] entries");
        P.monodromy = {scalar_from_json(m[0], "monodromy[0]"), scalar_from_json(m[1], "monodromy[1]"), scalar_from_json(m[2], "monodromy[2]"),
                       scalar_from_json(m[3], "monodromy[3]")};
        if (std::abs(P.monodromy.det()) == 0.0) parse_fail("polygon: singular monodromy");
    }
    bool all_real = std::abs(P.monodromy.a.imag()) + std::abs(P.monodromy.b.imag()) + std::abs(P.monodromy.c.imag()) +
                        std::abs(P.monodromy.d.imag()) == 0.0;
    for (auto& p : P.vertices) all_real &= p.num.imag() == 0.0 && p.den.imag() == 0.0;
    if (j.contains("field")) {
        if (!j["field"].is_string()) parse_fail("polygon: \"field\" must be \"real\" or \"complex\"");
        std::string f = j["field"].get<std::string>();
        if (f == "real") {
            if (!all_real) parse_fail("polygon: field is \"real\" but some data are complex");
            P.field = Field::Real;
        } else if (f == "complex") P.field = Field::Complex;
        else parse_fail("polygon: \"field\" must be \"real\" or \"complex\"");
    } else P.field = all_real ? Field::Real : Field::Complex;
    return P;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) parse_fail("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Json parse_json(const std::string& text, const std::string& where) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        parse_fail(where + ": malformed JSON (" + e.what() + ")");
    }
}

inline TwistedPolygon<double> read_polygon(const std::string& path) { return polygon_from_json(parse_json(read_file(path), path)); }

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::ParseError, "cannot write '" + path + "'");
    out << text;
}

// ---- reports ----

inline Json integral_report_json(const IntegralReport<double>& r, long n, Field f) {
    Json j;
    j["n"] = n;
    j["field"] = field_name(f);
    j["closed"] = r.closed;
    j["alpha"] = scalar_json(r.alpha);
    j["F"] = scalars_json(r.F);
    j["G"] = scalars_json(r.G);
    j["c_prod"] = scalar_json(r.c_prod);
    j["E_alpha"] = scalar_json(r.E_alpha);
    j["alt_perimeter"] = r.alt_perimeter ? scalar_json(*r.alt_perimeter) : Json(nullptr);
    if (r.ijk) j["IJK"] = Json{{"I", scalar_json(r.ijk->I)}, {"J", scalar_json(r.ijk->J)}, {"K", scalar_json(r.ijk->K)}};
    else j["IJK"] = nullptr;
    if (r.axis) j["axis"] = Json::array({point_json((*r.axis)[0]), point_json((*r.axis)[1])});
    else j["axis"] = nullptr;
    return j;
}

// ---- orbit traces ----

inline std::string csv_header(long n, long nF) {
    std::string h = "step";
    for (long i = 1; i <= n; ++i) h += ",c_" + std::to_string(i) + "_re,c_" + std::to_string(i) + "_im";
    for (long k = 0; k < nF; ++k) h += ",F_" + std::to_string(k) + "_re,F_" + std::to_string(k) + "_im";
    h += ",c_prod_re,c_prod_im,residual\n";
    return h;
}

inline std::string csv_row(long step, const CVec<double>& c, const CVec<double>& F, Complex<double> c_prod, double residual) {
    std::string r = std::to_string(step);
    auto add = [&](Complex<double> z) { r += "," + format17(z.real()) + "," + format17(z.imag()); };
    for (auto& z : c) add(z);
    for (auto& z : F) add(z);
    add(c_prod);
    r += "," + format17(residual) + "\n";
    return r;
}

// Cross-ratio rows of a trace written by csv_row.
inline std::vector<CVec<double>> read_trace_c(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) parse_fail("trace: empty file");
    std::vector<std::string> head;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) head.push_back(cell);
    }
    long n = 0;
    while (std::find(head.begin(), head.end(), "c_" + std::to_string(n + 1) + "_re") != head.end()) ++n;
    if (head.empty() || head[0] != "step" || n < 3) parse_fail("trace: header does not describe a cross-ratio trace");
    std::vector<CVec<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != head.size()) parse_fail("trace: row width differs from header");
        CVec<double> c;
        for (long i = 0; i < n; ++i)
            c.push_back({parse_scalar(cells[static_cast<std::size_t>(1 + 2 * i)]).real(), parse_scalar(cells[static_cast<std::size_t>(2 + 2 * i)]).real()});
        rows.push_back(std::move(c));
    }
    if (rows.empty()) parse_fail("trace: no rows");
    return rows;
}

// ---- Poincare disk rendering ----

// Point of P^1 in the closed unit disk. The real line goes to the boundary circle through the
// Cayley map w = (z - i)/(z + i); points off the real line are placed by projecting the Riemann
// sphere orthogonally onto the plane of that circle, w -> 2w / (1 + |w|^2).
inline Complex<double> disk_point(const Point<double>& p) {
    const Complex<double> i(0, 1);
    Complex<double> a = p.num - i * p.den, b = p.num + i * p.den;
    return 2.0 * a * std::conj(b) / (std::norm(a) + std::norm(b));
}

struct SvgStyle {
    double size = 512, margin = 16;
    double tau = 1e-10;  // vertices closer than this (chordal) get a warning badge
};

namespace detail {

inline std::string f6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return std::string(buf) == "-0.000000" ? "0.000000" : buf;
}

struct Screen {
    double cx, cy, r;
    std::pair<double, double> operator()(Complex<double> w) const { return {cx + r * w.real(), cy - r * w.imag()}; }
};

// Path segment from u to v (already in the disk): circular arc orthogonal to the boundary when
// both ends are on the circle, a diameter when they are antipodal, a straight chord otherwise.
inline std::string geodesic(const Screen& S, Complex<double> u, Complex<double> v) {
    auto [x2, y2] = S(v);
    bool boundary = std::abs(std::abs(u) - 1) < 1e-9 && std::abs(std::abs(v) - 1) < 1e-9;
    Complex<double> sum = u + v;
    if (!boundary || std::abs(sum) < 1e-9 || std::abs(u - v) < 1e-12) return " L " + f6(x2) + " " + f6(y2);
    Complex<double> centre = 2.0 * u * v / sum;  // meeting point of the tangents at u and v
    double rad = std::abs(centre - u) * S.r;
    auto [x1, y1] = S(u);
    auto [xc, yc] = S(centre);
    double cross = (x1 - xc) * (y2 - yc) - (y1 - yc) * (x2 - xc);
    return " A " + f6(rad) + " " + f6(rad) + " 0 0 " + (cross > 0 ? "1 " : "0 ") + f6(x2) + " " + f6(y2);
}

} // namespace detail

// Polygons drawn in order; later ones are drawn fainter (orbit traces).
inline std::string render_svg(const std::vector<TwistedPolygon<double>>& polys, const SvgStyle& st = {}) {
    detail::Screen S{st.size / 2, st.size / 2, st.size / 2 - st.margin};
    std::string s;
    std::string sz = detail::f6(st.size);
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + sz + "\" height=\"" + sz + "\" viewBox=\"0 0 " + sz + " " + sz + "\">\n";
    s += "<circle cx=\"" + detail::f6(S.cx) + "\" cy=\"" + detail::f6(S.cy) + "\" r=\"" + detail::f6(S.r) +
         "\" fill=\"#f7f7f7\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    long warnings = 0;
    for (std::size_t k = 0; k < polys.size(); ++k) {
        const auto& P = polys[k];
        double opacity = polys.size() == 1 ? 1.0 : 1.0 - 0.8 * static_cast<double>(k) / static_cast<double>(polys.size() - 1);
        long n = P.n();
        std::vector<Complex<double>> w;
        for (long i = 0; i <= n; ++i) w.push_back(disk_point(P.vertex(i)));
        auto [x0, y0] = S(w[0]);
        std::string d = "M " + detail::f6(x0) + " " + detail::f6(y0);
        for (long i = 0; i < n; ++i) d += detail::geodesic(S, w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(i + 1)]);
        s += "<path class=\"polygon\" d=\"" + d + "\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.2\" stroke-opacity=\"" +
             detail::f6(opacity) + "\"/>\n";
        for (long i = 0; i < n; ++i) {
            auto [x, y] = S(w[static_cast<std::size_t>(i)]);
            s += "<circle class=\"vertex\" cx=\"" + detail::f6(x) + "\" cy=\"" + detail::f6(y) + "\" r=\"2.5\" fill=\"#b22222\" fill-opacity=\"" +
                 detail::f6(opacity) + "\"/>\n";
        }
        for (long i = 0; i < n; ++i)
            for (long j = i + 1; j < n; ++j)
                if (chordal(P.vertices[static_cast<std::size_t>(i)], P.vertices[static_cast<std::size_t>(j)]) <= st.tau) {
                    auto [x, y] = S(w[static_cast<std::size_t>(i)]);
                    s += "<g class=\"warning\"><title>polygon " + std::to_string(k) + ": vertices " + std::to_string(i + 1) + " and " +
                         std::to_string(j + 1) + " nearly coincide</title><circle cx=\"" + detail::f6(x) + "\" cy=\"" + detail::f6(y) +
                         "\" r=\"7\" fill=\"none\" stroke=\"#e69500\" stroke-width=\"2\"/><text x=\"" + detail::f6(x + 8) + "\" y=\"" +
                         detail::f6(y - 8) + "\" font-size=\"12\" fill=\"#e69500\">!</text></g>\n";
                    ++warnings;
                }
    }
    s += "<!-- polygons: " + std::to_string(polys.size()) + ", warnings: " + std::to_string(warnings) + " -->\n";
    s += "</svg>\n";
    return s;
}

} // namespace crd::io
