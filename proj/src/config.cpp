#include "fraclap/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fraclap/io.hpp"
#include "fraclap/special.hpp"
#include "json.hpp"

namespace fraclap {

namespace {

using nlohmann::json;

void fail(const std::string& what) { throw std::invalid_argument("config: " + what); }

double num(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) fail(std::string(key) + " must be a number");
    return j[key].get<double>();
}

}  // namespace

RunConfig RunConfig::parse(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
    RunConfig c;
    if (j.contains("problem")) {
        const json& p = j["problem"];
        if (p.contains("domain")) {
            const json& d = p["domain"];
            c.domain_kind = d.value("kind", std::string("interval"));
            if (c.domain_kind == "interval") {
                c.a = num(d, "a", c.a);
                c.b = num(d, "b", c.b);
                if (!(c.b > c.a)) fail("interval must satisfy a < b");
            } else if (c.domain_kind == "polygon") {
                if (d.contains("vertices")) {
                    for (const auto& v : d["vertices"]) {
                        if (!v.is_array() || v.size() != 2) fail("polygon vertices must be [x,y]");
                        c.polygon_vertices.push_back({v[0].get<double>(), v[1].get<double>()});
                    }
                } else if (d.contains("preset")) {
                    const std::string name = d["preset"].get<std::string>();
                    Polygon poly = name == "lshape"     ? Polygon::l_shape()
                                   : name == "square"   ? Polygon::unit_square()
                                   : name == "sector"   ? Polygon::sector_triangle()
                                                        : throw std::invalid_argument(
                                                              "config: unknown polygon preset " +
                                                              name);
                    c.polygon_vertices = poly.vertices();
                } else {
                    fail("polygon domain needs vertices or preset");
                }
            } else {
                fail("domain kind must be interval or polygon");
            }
        }
        c.s = num(p, "s", c.s);
        if (!(c.s > 0.0 && c.s < 1.0)) fail("s must lie strictly in (0,1)");
        auto parse_data = [&](const char* key, DataSpec& spec) {
            if (!p.contains(key)) return;
            const json& f = p[key];
            spec.kind = f.value("kind", std::string("zero"));
            if (spec.kind != "zero" && spec.kind != "constant" && spec.kind != "getoor" &&
                spec.kind != "sine" && spec.kind != "exp")
                fail(std::string("unknown data kind for ") + key);
            spec.value = num(f, "value", spec.value);
            spec.k = num(f, "k", spec.k);
        };
        parse_data("f", c.f);
        parse_data("F", c.big_f);
    }
    if (j.contains("discretization")) {
        const json& d = j["discretization"];
        c.n = static_cast<int>(num(d, "n", c.n));
        c.degree = static_cast<int>(num(d, "degree", c.degree));
        c.grading = num(d, "grading", c.grading);
        c.Y = num(d, "Y", c.Y);
        c.ext_n_omega = static_cast<int>(num(d, "ext_n_omega", c.ext_n_omega));
        c.ext_degree = static_cast<int>(num(d, "ext_degree", c.ext_degree));
        if (c.n < 2 || c.degree < 1 || c.degree > 4) fail("bad discretization sizes");
        if (c.grading < 1.0) fail("grading exponent must be >= 1");
    }
    if (j.contains("diagnostics")) {
        const json& d = j["diagnostics"];
        if (d.contains("eps")) {
            c.eps_set.clear();
            for (const auto& e : d["eps"]) c.eps_set.push_back(e.get<double>());
        }
        c.p_max = static_cast<int>(num(d, "p_max", c.p_max));
        if (d.contains("r_ladder")) {
            c.r_ladder.clear();
            for (const auto& r : d["r_ladder"]) c.r_ladder.push_back(r.get<double>());
        }
    }
    if (j.contains("cover")) {
        const json& d = j["cover"];
        c.cover_c = num(d, "c", c.cover_c);
        c.cover_c_hat = num(d, "c_hat", c.cover_c_hat);
        c.xi = num(d, "xi", c.xi);
        c.mc_samples = static_cast<int>(num(d, "mc_samples", c.mc_samples));
        if (!(c.cover_c > 0.0 && c.cover_c < 1.0)) fail("cover.c must lie in (0,1)");
        if (c.cover_c_hat != 0.0 && !(c.cover_c_hat > c.cover_c && c.cover_c_hat < 1.0))
            fail("cover.c_hat must satisfy c < c_hat < 1");
    }
    if (j.contains("seed")) c.seed = j["seed"].get<unsigned long long>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();

    c.hash = hex64(fnv1a64(c.serialize()));
    return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string RunConfig::serialize() const {
    json j;
    j["problem"]["domain"]["kind"] = domain_kind;
    if (domain_kind == "interval") {
        j["problem"]["domain"]["a"] = a;
        j["problem"]["domain"]["b"] = b;
    } else {
        auto arr = json::array();
        for (const Vec2& v : polygon_vertices) arr.push_back({v.x, v.y});
        j["problem"]["domain"]["vertices"] = arr;
    }
    j["problem"]["s"] = s;
    j["problem"]["f"] = {{"kind", f.kind}, {"value", f.value}, {"k", f.k}};
    j["problem"]["F"] = {{"kind", big_f.kind}, {"value", big_f.value}, {"k", big_f.k}};
    j["discretization"] = {{"n", n},
                           {"degree", degree},
                           {"grading", grading},
                           {"Y", Y},
                           {"ext_n_omega", ext_n_omega},
                           {"ext_degree", ext_degree}};
    j["diagnostics"] = {{"eps", eps_set}, {"p_max", p_max}, {"r_ladder", r_ladder}};
    j["cover"] = {{"c", cover_c}, {"c_hat", cover_c_hat}, {"xi", xi}, {"mc_samples", mc_samples}};
    j["seed"] = seed;
    j["threads"] = threads;
    j["out_dir"] = out_dir;
    return j.dump();
}

std::shared_ptr<Field1D> make_data_field(const DataSpec& spec, double s) {
    if (spec.kind == "zero") return fields::constant(0.0);
    if (spec.kind == "constant") return fields::constant(spec.value);
    if (spec.kind == "getoor") return fields::constant(getoor_constant(1, s));
    if (spec.kind == "sine") return fields::sine(spec.k, spec.value);
    if (spec.kind == "exp") return fields::exponential(spec.k);
    throw std::invalid_argument("config: unknown data kind " + spec.kind);
}

}  // namespace fraclap
