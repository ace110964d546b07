#include "dcm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dcm {

JVal JVal::boolean(bool b) {
    JVal v;
    v.kind_ = Kind::Bool;
    v.b_ = b;
    return v;
}
JVal JVal::num(double x) {
    JVal v;
    v.kind_ = Kind::Num;
    v.n_ = x;
    return v;
}
JVal JVal::str(std::string s) {
    JVal v;
    v.kind_ = Kind::Str;
    v.s_ = std::move(s);
    return v;
}
JVal JVal::arr() {
    JVal v;
    v.kind_ = Kind::Arr;
    return v;
}
JVal JVal::obj() {
    JVal v;
    v.kind_ = Kind::Obj;
    return v;
}

JVal& JVal::push(JVal v) {
    items_.push_back(std::move(v));
    return *this;
}
JVal& JVal::set(const std::string& k, JVal v) {
    fields_[k] = std::move(v);
    return *this;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

void escape_into(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
}

} // namespace

std::string JVal::dump() const {
    std::string out;
    switch (kind_) {
        case Kind::Null:
            out = "null";
            break;
        case Kind::Bool:
            out = b_ ? "true" : "false";
            break;
        case Kind::Num:
            out = format_double(n_);
            break;
        case Kind::Str:
            escape_into(out, s_);
            break;
        case Kind::Arr: {
            out = "[";
            for (std::size_t i = 0; i < items_.size(); ++i) {
                if (i) out += ",";
                out += items_[i].dump();
            }
            out += "]";
            break;
        }
        case Kind::Obj: {
            out = "{";
            bool first = true;
            for (const auto& [k, v] : fields_) {  // std::map keeps keys sorted
                if (!first) out += ",";
                first = false;
                escape_into(out, k);
                out += ":";
                out += v.dump();
            }
            out += "}";
            break;
        }
    }
    return out;
}

// --- parsing -----------------------------------------------------------------

namespace {

using nlohmann::json;

Vec vec_from(const json& a, int dim) {
    Vec v = Vec::zero(dim);
    if (!a.is_array() || static_cast<int>(a.size()) != dim)
        throw std::invalid_argument("descriptor: point has wrong dimension");
    for (int d = 0; d < dim; ++d) v[d] = a[d].get<double>();
    return v;
}

ConvexBody body_from(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw std::invalid_argument("body descriptor: missing kind");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "ball") {
        int dim = j.value("dim", 2);
        return ConvexBody::ball(j.at("r").get<double>(), dim);
    }
    if (kind == "polytope") {
        const auto& vs = j.at("vertices");
        if (!vs.is_array() || vs.empty())
            throw std::invalid_argument("body descriptor: vertices required");
        int dim = j.contains("dim") ? j.at("dim").get<int>()
                                    : static_cast<int>(vs[0].size());
        std::vector<Vec> pts;
        for (const auto& p : vs) pts.push_back(vec_from(p, dim));
        return ConvexBody::from_vertices(dim, pts);
    }
    throw std::invalid_argument("body descriptor: unknown kind '" + kind + "'");
}

double value_or_inf(const json& v) {
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s == "inf" || s == "+inf")
            return std::numeric_limits<double>::infinity();
        throw std::invalid_argument("grid values: unknown token '" + s + "'");
    }
    return v.get<double>();
}

ConvexFunctionRep function_from(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw std::invalid_argument("function descriptor: missing kind");
    std::string kind = j.at("kind").get<std::string>();
    bool even = j.value("even", false);

    if (kind == "quadratic") {
        int dim = j.value("dim", 2);
        return ConvexFunctionRep::quadratic(dim, j.value("a", 1.0), j.value("offset", 0.0));
    }
    if (kind == "scaled_norm") {
        int dim = j.value("dim", 2);
        return ConvexFunctionRep::scaled_norm(dim, j.value("c", 1.0), j.value("b", 0.0));
    }
    if (kind == "indicator") {
        ConvexBody K = body_from(j.at("body"));
        return ConvexFunctionRep::body_indicator(K, j.value("offset", 0.0));
    }
    if (kind == "support") {
        ConvexBody K = body_from(j.at("body"));
        return ConvexFunctionRep::support_fn(K, j.value("offset", 0.0));
    }
    if (kind == "max_affine") {
        int dim = j.value("dim", 2);
        std::vector<AffinePiece> pieces;
        for (const auto& p : j.at("pieces")) {
            AffinePiece ap;
            ap.slope = vec_from(p.at("slope"), dim);
            ap.offset = p.value("offset", 0.0);
            pieces.push_back(ap);
        }
        auto rep = ConvexFunctionRep::max_affine(dim, std::move(pieces));
        rep.even = even;
        return rep;
    }
    if (kind == "grid") {
        int dim = j.value("dim", 2);
        GridSpec spec(dim, j.at("R").get<double>(), j.at("N").get<int>());
        GridFn g(spec);
        const auto& vals = j.at("values");
        if (vals.size() != g.values.size())
            throw std::invalid_argument("grid values: wrong length");
        for (std::size_t i = 0; i < g.values.size(); ++i)
            g.values[i] = value_or_inf(vals[i]);
        return ConvexFunctionRep::grid_sampled(std::move(g), even);
    }
    throw std::invalid_argument("function descriptor: unknown kind '" + kind + "'");
}

} // namespace

ConvexBody parse_body_json(const std::string& text) {
    return body_from(json::parse(text));
}

ConvexFunctionRep parse_function_json(const std::string& text) {
    return function_from(json::parse(text));
}

LogConcaveFunction parse_log_concave_json(const std::string& text) {
    json j = json::parse(text);
    if (j.contains("phi")) {
        ConvexFunctionRep phi = function_from(j.at("phi"));
        if (j.contains("support")) {
            const auto& s = j.at("support");
            if (s.is_string() && s.get<std::string>() == "unbounded")
                return LogConcaveFunction::from_phi(std::move(phi), std::nullopt);
            return LogConcaveFunction::from_phi(std::move(phi), body_from(s));
        }
        return LogConcaveFunction::from_phi(std::move(phi));
    }
    return LogConcaveFunction::from_phi(function_from(j));
}

EuclideanMeasure parse_measure_json(const std::string& text) {
    json j = json::parse(text);
    EuclideanMeasure m;
    m.dim = j.value("dim", 2);
    if (!j.contains("atoms") || !j.at("atoms").is_array())
        throw std::invalid_argument("measure descriptor: atoms array required");
    for (const auto& a : j.at("atoms"))
        m.add(vec_from(a.at("y"), m.dim), a.at("w").get<double>());
    m.validate();
    m.provenance = j.value("provenance", std::string("input"));
    return m;
}

// --- emission ----------------------------------------------------------------

namespace {

JVal vec_to_json(const Vec& v, int dim) {
    JVal a = JVal::arr();
    for (int d = 0; d < dim; ++d) a.push(JVal::num(v[d]));
    return a;
}

} // namespace

JVal body_to_json(const ConvexBody& K) {
    JVal o = JVal::obj();
    o.set("dim", JVal::num(K.dim));
    if (K.kind == ConvexBody::Kind::Ball) {
        o.set("kind", JVal::str("ball"));
        o.set("r", JVal::num(K.radius));
    } else {
        o.set("kind", JVal::str("polytope"));
        JVal vs = JVal::arr();
        for (const auto& v : K.vertices) vs.push(vec_to_json(v, K.dim));
        o.set("vertices", std::move(vs));
    }
    return o;
}

JVal function_to_json(const ConvexFunctionRep& rep) {
    using K = ConvexFunctionRep::Kind;
    JVal o = JVal::obj();
    o.set("dim", JVal::num(rep.dim));
    o.set("even", JVal::boolean(rep.even));
    switch (rep.kind) {
        case K::Quadratic:
            o.set("kind", JVal::str("quadratic"));
            o.set("a", JVal::num(rep.quad_a));
            o.set("offset", JVal::num(rep.offset));
            break;
        case K::ScaledNorm:
            o.set("kind", JVal::str("scaled_norm"));
            o.set("c", JVal::num(rep.norm_c));
            o.set("b", JVal::num(rep.offset));
            break;
        case K::BodyIndicator:
            o.set("kind", JVal::str("indicator"));
            o.set("body", body_to_json(*rep.body));
            o.set("offset", JVal::num(rep.offset));
            break;
        case K::SupportFn:
            o.set("kind", JVal::str("support"));
            o.set("body", body_to_json(*rep.body));
            o.set("offset", JVal::num(rep.offset));
            break;
        case K::MaxAffine: {
            o.set("kind", JVal::str("max_affine"));
            JVal ps = JVal::arr();
            for (const auto& p : rep.pieces) {
                JVal pj = JVal::obj();
                pj.set("slope", vec_to_json(p.slope, rep.dim));
                pj.set("offset", JVal::num(p.offset));
                ps.push(std::move(pj));
            }
            o.set("pieces", std::move(ps));
            break;
        }
        case K::Grid: {
            o.set("kind", JVal::str("grid"));
            o.set("R", JVal::num(rep.grid.spec.R));
            o.set("N", JVal::num(rep.grid.spec.N));
            JVal vals = JVal::arr();
            for (double v : rep.grid.values)
                vals.push(std::isinf(v) ? JVal::str("inf") : JVal::num(v));
            o.set("values", std::move(vals));
            break;
        }
    }
    return o;
}

JVal log_concave_to_json(const LogConcaveFunction& f) {
    JVal o = JVal::obj();
    o.set("phi", function_to_json(f.phi));
    o.set("support", f.support ? body_to_json(*f.support) : JVal::str("unbounded"));
    o.set("max_location", vec_to_json(f.max_location, f.dim()));
    return o;
}

JVal measure_to_json(const EuclideanMeasure& m) {
    JVal o = JVal::obj();
    o.set("dim", JVal::num(m.dim));
    o.set("provenance", JVal::str(m.provenance));
    JVal atoms = JVal::arr();
    for (std::size_t i = 0; i < m.points.size(); ++i) {
        JVal a = JVal::obj();
        a.set("y", vec_to_json(m.points[i], m.dim));
        a.set("w", JVal::num(m.weights[i]));
        atoms.push(std::move(a));
    }
    o.set("atoms", std::move(atoms));
    return o;
}

JVal spherical_to_json(const SphericalMeasure& m) {
    JVal o = JVal::obj();
    o.set("dim", JVal::num(m.dim));
    JVal atoms = JVal::arr();
    for (std::size_t i = 0; i < m.directions.size(); ++i) {
        JVal a = JVal::obj();
        a.set("v", vec_to_json(m.directions[i], m.dim));
        a.set("w", JVal::num(m.weights[i]));
        atoms.push(std::move(a));
    }
    o.set("atoms", std::move(atoms));
    return o;
}

namespace {

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

std::string measure_to_csv(const EuclideanMeasure& m) {
    std::string out;
    for (int d = 0; d < m.dim; ++d) out += "y" + std::to_string(d) + ",";
    out += "weight\n";
    for (std::size_t i = 0; i < m.points.size(); ++i) {
        for (int d = 0; d < m.dim; ++d) out += csv_number(m.points[i][d]) + ",";
        out += csv_number(m.weights[i]) + "\n";
    }
    return out;
}

std::string spherical_to_csv(const SphericalMeasure& m) {
    std::string out;
    for (int d = 0; d < m.dim; ++d) out += "v" + std::to_string(d) + ",";
    out += "weight\n";
    for (std::size_t i = 0; i < m.directions.size(); ++i) {
        for (int d = 0; d < m.dim; ++d) out += csv_number(m.directions[i][d]) + ",";
        out += csv_number(m.weights[i]) + "\n";
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

} // namespace dcm
