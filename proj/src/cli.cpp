#include "fraclap/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "fraclap/config.hpp"
#include "fraclap/quadrature.hpp"
#include "fraclap/covering.hpp"
#include "fraclap/diagnostics.hpp"
#include "fraclap/errors.hpp"
#include "fraclap/extension.hpp"
#include "fraclap/io.hpp"
#include "fraclap/solver1d.hpp"

namespace fraclap {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string preset_dir() {
    if (const char* env = std::getenv("FRACLAP_PRESET_DIR")) return env;
    return "presets";
}

RunConfig load_config(const std::string& config_path, const std::string& preset,
                      const std::string& out_override, std::optional<unsigned long long> seed,
                      std::optional<int> threads) {
    RunConfig cfg;
    if (!config_path.empty()) {
        cfg = RunConfig::from_file(config_path);
    } else if (!preset.empty()) {
        const fs::path p = fs::path(preset_dir()) / (preset + ".json");
        cfg = RunConfig::from_file(p.string());
    } else {
        throw std::invalid_argument("config: need --config PATH or --preset NAME");
    }
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    cfg.hash = hex64(fnv1a64(cfg.serialize()));
    return cfg;
}

Mesh1D make_problem_mesh(const RunConfig& cfg) {
    return cfg.grading == 1.0 ? uniform_mesh(cfg.n, cfg.a, cfg.b)
                              : graded_mesh(cfg.n, cfg.grading, cfg.a, cfg.b);
}

// exact solution (value * scaled bump power) when f is a constant
std::shared_ptr<Field1D> exact_constant_rhs_solution(double a, double b, double s, double c) {
    const double r = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const double scale = c * std::pow(r, 2.0 * s) / getoor_constant(1, s);
    auto family = [=](double x, int order) -> double {
        const double X = (x - mid) / r;
        const double g = 1.0 - X * X;
        if (g <= 0.0) return 0.0;
        switch (order) {
            case 0:
                return scale * std::pow(g, s);
            case 1:
                return scale * (-2.0 * s * X * std::pow(g, s - 1.0)) / r;
            default:
                return 0.0;
        }
    };
    return std::make_shared<AnalyticField1D>(family, 1);
}

// Field over (0,L): t -> u(anchor + dir*t); derivatives carry dir^order.
class EndpointView final : public Field1D {
public:
    EndpointView(std::shared_ptr<Field1D> u, double anchor, double dir)
        : u_(std::move(u)), anchor_(anchor), dir_(dir) {}
    double derivative(double t, int order) const override {
        const double v = u_->derivative(anchor_ + dir_ * t, order);
        return (order % 2 == 1 && dir_ < 0) ? -v : v;
    }
    int max_order() const override { return u_->max_order(); }
    double resolution() const override { return u_->resolution(); }

private:
    std::shared_ptr<Field1D> u_;
    double anchor_;
    double dir_;
};

class SlabView final : public SlabField {
public:
    explicit SlabView(std::shared_ptr<ExtensionField1D> U) : U_(std::move(U)) {}
    double derivative(double x, double y, int dx, int dy) const override {
        return U_->eval(x, y, dx, dy);
    }
    int max_order() const override { return U_->xspace->degree; }
    double resolution() const override { return U_->xspace->mesh.h_min(); }

private:
    std::shared_ptr<ExtensionField1D> U_;
};

Polygon config_polygon(const RunConfig& cfg) {
    if (cfg.polygon_vertices.empty())
        throw std::invalid_argument("config: polygon domain required for this command");
    return Polygon::from_vertices(cfg.polygon_vertices);
}

int cmd_solve(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const std::string header = file_header(cfg.hash, cfg.seed);
    json summary;
    summary["config"] = cfg.hash;

    if (cfg.domain_kind == "interval") {
        const FractionalParams params = FractionalParams::make(cfg.s, 1);
        auto f = make_data_field(cfg.f, cfg.s);
        AssemblyOptions aopt;
        aopt.n_threads = cfg.threads;
        FractionalForm form(FemSpace1D{make_problem_mesh(cfg), cfg.degree}, params, aopt);
        const DiscreteSolution u = solve_dirichlet_1d(*f, form);

        CsvWriter csv((fs::path(cfg.out_dir) / "solution.csv").string(), header, {"x", "u"});
        const int n_out = 512;
        for (int i = 0; i <= n_out; ++i) {
            const double x = cfg.a + (cfg.b - cfg.a) * i / n_out;
            csv.row_numeric({x, u.eval(x)});
        }
        csv.close();

        summary["energy"] = u.energy;
        summary["residual"] = u.residual_norm;
        summary["n"] = cfg.n;
        summary["degree"] = cfg.degree;
        if (cfg.f.kind == "constant" || cfg.f.kind == "getoor") {
            const double c = cfg.f.kind == "getoor" ? getoor_constant(1, cfg.s) : cfg.f.value;
            auto exact = exact_constant_rhs_solution(cfg.a, cfg.b, cfg.s, c);
            summary["l2_error_vs_closed_form"] = error_norms(u, *exact).l2;
        }
    } else {
        const Polygon poly = config_polygon(cfg);
        const FractionalParams params = FractionalParams::make(cfg.s, 2);
        const double value = cfg.f.kind == "zero" ? 0.0 : cfg.f.value;
        Extension2DOptions opt;
        const ExtensionField2D U =
            solve_extension_2d(poly, [value](Vec2) { return value; }, params, opt);
        CsvWriter csv((fs::path(cfg.out_dir) / "solution.csv").string(), header,
                      {"x1", "x2", "trace_u"});
        Vec2 lo, hi;
        poly.bounding_box(lo, hi);
        const int grid = 48;
        for (int i = 0; i <= grid; ++i)
            for (int j = 0; j <= grid; ++j) {
                const Vec2 p{lo.x + (hi.x - lo.x) * i / grid, lo.y + (hi.y - lo.y) * j / grid};
                csv.row_numeric({p.x, p.y, poly.contains(p) ? U.eval(p, 0.0) : 0.0});
            }
        csv.close();
        summary["residual"] = U.residual;
    }
    write_text_file((fs::path(cfg.out_dir) / "summary.json").string(), summary.dump(2) + "\n");
    return 0;
}

int cmd_extend(const RunConfig& cfg) {
    if (cfg.domain_kind != "interval")
        throw std::invalid_argument("extend: implemented for interval domains");
    fs::create_directories(cfg.out_dir);
    const std::string header = file_header(cfg.hash, cfg.seed);
    const FractionalParams params = FractionalParams::make(cfg.s, 1);
    auto f = make_data_field(cfg.f, cfg.s);
    ExtensionOptions opt;
    opt.n_omega = cfg.ext_n_omega;
    opt.degree_x = cfg.ext_degree;
    opt.Y = cfg.Y;
    // the pointwise DtN extrapolation needs the first collocation level close
    // to the boundary corners; see dtn_trace
    opt.y_first_fraction = 1e-6;
    opt.grading = 3.0;
    const ExtensionField1D U = solve_extension_1d(f.get(), nullptr, params, cfg.a, cfg.b, opt);

    CsvWriter csv((fs::path(cfg.out_dir) / "extension.csv").string(), header, {"x", "y", "U"});
    const std::vector<double> slices{0.0, U.ymesh.nodes[1], 0.125 * U.Y, 0.5 * U.Y};
    const int n_out = 256;
    for (double y : slices)
        for (int i = 0; i <= n_out; ++i) {
            const double x =
                U.xspace->mesh.a() + (U.xspace->mesh.b() - U.xspace->mesh.a()) * i / n_out;
            csv.row_numeric({x, y, U.eval(x, y)});
        }
    csv.close();

    const DiscreteSolution dtn = dtn_trace(U);
    double num = 0.0, den = 0.0;
    {
        const QuadratureRule r = gauss_legendre(64, cfg.a, cfg.b);
        for (int i = 0; i < r.size(); ++i) {
            const double d = dtn.eval(r.nodes[i]) - f->value(r.nodes[i]);
            num += r.weights[i] * d * d;
            den += r.weights[i] * f->value(r.nodes[i]) * f->value(r.nodes[i]);
        }
    }
    json summary;
    summary["config"] = cfg.hash;
    summary["energy"] = U.energy;
    summary["residual"] = U.residual;
    summary["Y"] = U.Y;
    summary["dtn_rel_l2_residual"] = den > 0 ? std::sqrt(num / den) : 0.0;
    write_text_file((fs::path(cfg.out_dir) / "summary.json").string(), summary.dump(2) + "\n");
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    if (cfg.domain_kind != "interval")
        throw std::invalid_argument("verify: implemented for interval domains");
    fs::create_directories(cfg.out_dir);
    const std::string header = file_header(cfg.hash, cfg.seed);
    const FractionalParams params = FractionalParams::make(cfg.s, 1);
    auto f = make_data_field(cfg.f, cfg.s);

    AssemblyOptions aopt;
    aopt.n_threads = cfg.threads;
    FractionalForm form(FemSpace1D{make_problem_mesh(cfg), cfg.degree}, params, aopt);
    const DiscreteSolution uh = solve_dirichlet_1d(*f, form);
    auto uh_field = uh.as_field();

    RegularityReport report;
    const double L_analytic = 0.5;
    auto xs = fields::power(cfg.s);

    // analytic closed-form family rows (first eps drives the growth fit)
    std::vector<std::pair<int, double>> fit_rows;
    for (double eps : cfg.eps_set) {
        for (int p = 0; p <= cfg.p_max; ++p) {
            const WeightedNormResult w = weighted_norm_vertex_1d(*xs, L_analytic, p, eps, cfg.s);
            report.rows.push_back({"analytic_xs", p, 0, p, eps, w.value, w.divergent});
            if (eps == cfg.eps_set.front()) fit_rows.emplace_back(p, w.value);
        }
    }
    report.fit = fit_gamma(fit_rows);

    // discrete rows at both endpoints
    for (int side = 0; side < 2; ++side) {
        auto view = std::make_shared<EndpointView>(uh_field, side == 0 ? cfg.a : cfg.b,
                                                   side == 0 ? 1.0 : -1.0);
        const std::string region = side == 0 ? "vertex_a" : "vertex_b";
        for (double eps : cfg.eps_set)
            for (int p = 0; p <= cfg.degree; ++p) {
                const WeightedNormResult w =
                    weighted_norm_vertex_1d(*view, 0.25 * (cfg.b - cfg.a), p, eps, cfg.s);
                report.rows.push_back({region, p, 0, p, eps, w.value, w.divergent});
            }
    }

    report.gamma_f = analytic_data_classifier_1d(*f, cfg.a, cfg.b, 6).gamma_f;

    // inequality battery
    const HardyResult hardy = hardy_check_1d(*xs, L_analytic, cfg.eps_set.front(), cfg.s);
    report.inequality_checks.emplace_back("hardy_xs_ratio", hardy.ratio);
    for (double R : cfg.r_ladder) {
        const LocalizationResult loc =
            localization_check(*f, 0.5 * (cfg.a + cfg.b), R * (cfg.b - cfg.a) * 0.5, params, form);
        report.inequality_checks.emplace_back("localization_dual_R" + format_g17(R),
                                              loc.ratio_dual);
        report.inequality_checks.emplace_back("localization_h1ms_R" + format_g17(R),
                                              loc.ratio_h1ms);
    }

    ExtensionOptions eopt;
    eopt.n_omega = cfg.ext_n_omega;
    eopt.degree_x = cfg.ext_degree;
    eopt.Y = cfg.Y;
    auto U = std::make_shared<ExtensionField1D>(
        solve_extension_1d(f.get(), nullptr, params, cfg.a, cfg.b, eopt));
    report.inequality_checks.emplace_back("poincare_ratio_H", poincare_ratio(*U, 0.5 * U->Y));
    report.inequality_checks.emplace_back("trace_ratio", trace_inequality_check(*U).ratio);
    report.inequality_checks.emplace_back("multiplicative_trace_max",
                                          multiplicative_trace_check(*U).max_ratio);
    for (double t : {0.0, 0.2, 0.4}) {
        const ShiftProbeResult sp = shift_theorem_probe(*U, f.get(), nullptr, t, form);
        report.inequality_checks.emplace_back("shift_C_t_" + format_g17(t), sp.ratio);
    }
    report.inequality_checks.emplace_back("apriori_ratio",
                                          ncheck(*U, f.get(), nullptr, form).apriori_ratio);

    // interior Caccioppoli on the analytic harmonic pair (s = 1/2 reference)
    {
        const FractionalParams p_half = FractionalParams::make(0.5, 1);
        auto Uh = fields::harmonic_extension_sine(2.0);
        auto fh = fields::sine(2.0, 2.0);
        FractionalForm half_form(FemSpace1D{uniform_mesh(32, cfg.a, cfg.b), 1}, p_half);
        for (double R : cfg.r_ladder) {
            const CaccioppoliResult cc = caccioppoli_interior_check(
                *Uh, p_half, 0.5 * (cfg.a + cfg.b), R * 0.5 * (cfg.b - cfg.a), 0.5, 1, fh.get(),
                nullptr, half_form, 6.0);
            report.inequality_checks.emplace_back("caccioppoli_interior_R" + format_g17(R),
                                                  cc.ratio);
        }
    }
    for (double R : cfg.r_ladder) {
        const TubularResult tb = tubular_bound_check(*U, R * 0.5 * (cfg.b - cfg.a), 0.4);
        report.inequality_checks.emplace_back("tubular_R" + format_g17(R), tb.ratio);
    }

    // emit
    CsvWriter rows_csv((fs::path(cfg.out_dir) / "report.csv").string(), header,
                       {"region", "p", "p_perp", "p_par", "eps", "value", "divergent"});
    for (const ReportRow& r : report.rows)
        rows_csv.row({r.region, std::to_string(r.p), std::to_string(r.p_perp),
                      std::to_string(r.p_par), format_g17(r.eps),
                      r.divergent ? "inf" : format_g17(r.value), r.divergent ? "1" : "0"});
    rows_csv.close();

    CsvWriter ineq_csv((fs::path(cfg.out_dir) / "inequality.csv").string(), header,
                       {"check", "value"});
    for (const auto& [name, value] : report.inequality_checks)
        ineq_csv.row({name, format_g17(value)});
    ineq_csv.close();

    json summary;
    summary["config"] = cfg.hash;
    summary["gamma_fit"] = {{"gamma", report.fit.gamma},
                            {"log_c", report.fit.log_c},
                            {"residual", report.fit.residual},
                            {"valid", report.fit.valid}};
    summary["gamma_f"] = report.gamma_f;
    summary["solver_residual"] = uh.residual_norm;
    json divergent = json::array();
    for (const ReportRow& r : report.rows)
        if (r.divergent)
            divergent.push_back({{"region", r.region}, {"p", r.p}, {"eps", r.eps}});
    summary["divergent_rows"] = divergent;
    write_text_file((fs::path(cfg.out_dir) / "summary.json").string(), summary.dump(2) + "\n");

    for (const ReportRow& r : report.rows)
        if (r.divergent) {
            std::cerr << "divergent weighted norm at region=" << r.region << " p=" << r.p
                      << " eps=" << r.eps << "\n";
            return 5;
        }
    return 0;
}

json tail_json(const DeltaTail& t) {
    return json{{"delta", t.delta},
                {"final_sum", t.partial_sums.empty() ? 0.0 : t.partial_sums.back()},
                {"levels", t.partial_sums.size()},
                {"increment_ratio", t.increment_ratio},
                {"tail_below_1e-12", t.tail_below_radius},
                {"extrapolated_remainder", t.extrapolated_remainder},
                {"cauchy", t.cauchy}};
}

json cert_json(const BallCovering& cov) {
    json j;
    j["region"] = cov.region.label();
    j["c"] = cov.c;
    j["c_tilde"] = cov.c_tilde;
    j["c_hat"] = cov.c_hat;
    j["items"] = cov.items.size();
    j["coverage_fraction"] = cov.cert.coverage_fraction;
    j["coverage_samples"] = cov.cert.coverage_samples;
    j["overlap_max"] = cov.cert.overlap_max;
    j["overlap_max_doubled"] = cov.cert.overlap_max_doubled;
    j["c_b"] = cov.cert.c_b;
    j["delta_tails"] = json::array();
    for (const DeltaTail& t : cov.delta_tails) j["delta_tails"].push_back(tail_json(t));
    return j;
}

int cmd_cover(const RunConfig& cfg) {
    const Polygon poly = config_polygon(cfg);
    fs::create_directories(cfg.out_dir);
    const std::string header = file_header(cfg.hash, cfg.seed);

    const double xi0 = cfg.xi > 0.0
                           ? cfg.xi
                           : 0.25 * std::min(poly.min_edge_length(), poly.min_vertex_separation());
    const NeighborhoodDecomposition dec = decompose(poly, xi0);

    CsvWriter csv((fs::path(cfg.out_dir) / "coverings.csv").string(), header,
                  {"kind", "cx", "cy", "R", "level"});
    json cert;
    cert["xi_requested"] = xi0;
    cert["xi"] = dec.xi();
    cert["coverings"] = json::array();

    CoverParams cp;
    cp.c = cfg.cover_c;
    cp.c_hat = cfg.cover_c_hat;
    cp.mc_samples = cfg.mc_samples;
    cp.seed = static_cast<unsigned>(cfg.seed);

    auto emit_items = [&](const BallCovering& cov, const std::string& kind) {
        for (const CoverItem& it : cov.items)
            csv.row({kind, format_g17(it.center.x), format_g17(it.center.y),
                     format_g17(cov.stretched_radius(it)), std::to_string(it.level)});
    };

    for (int v = 0; v < poly.n(); ++v) {
        const BallCovering cov = cover_vertex(dec, v, cp);
        emit_items(cov, "ball");
        cert["coverings"].push_back(cert_json(cov));
    }
    // vertex-edge chains need c comfortably above the wedge opening xi
    CoverParams cpve = cp;
    cpve.c = std::min(0.45, std::max(cp.c, 1.3 * dec.xi()));
    cpve.c_hat = 0.0;
    for (int v = 0; v < poly.n(); ++v) {
        for (int e : poly.edges_at_vertex(v)) {
            const VertexEdgeCovering vec(dec, v, e, cpve);
            emit_items(vec.outer(), "half-ball");
            json jouter = cert_json(vec.outer());
            const int mid = vec.n_half_balls() / 2;
            const BallCovering sub = vec.subcovering(mid);
            emit_items(sub, "ball");
            jouter["subcovering_mid"] = cert_json(sub);
            cert["coverings"].push_back(jouter);
        }
    }
    for (int e = 0; e < poly.n(); ++e) {
        const BallCovering cov = cover_edge(dec, e, cp);
        emit_items(cov, "ball");
        cert["coverings"].push_back(cert_json(cov));
    }
    csv.close();
    write_text_file((fs::path(cfg.out_dir) / "certification.json").string(),
                    cert.dump(2) + "\n");
    return 0;
}

int cmd_report(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const std::string header = file_header(cfg.hash, cfg.seed);
    CsvWriter csv((fs::path(cfg.out_dir) / "growth.csv").string(), header,
                  {"region", "p", "log_norm", "envelope"});
    json summary;
    summary["config"] = cfg.hash;

    if (cfg.domain_kind == "interval") {
        auto xs = fields::power(cfg.s);
        std::vector<std::pair<int, double>> rows;
        for (int p = 0; p <= cfg.p_max; ++p) {
            const WeightedNormResult w =
                weighted_norm_vertex_1d(*xs, 0.5, p, cfg.eps_set.front(), cfg.s);
            rows.emplace_back(p, w.value);
        }
        const GammaFit fit = fit_gamma(rows);
        for (const auto& [p, n] : rows) {
            const double plogp = p == 0 ? 0.0 : p * std::log(static_cast<double>(p));
            csv.row({"analytic_xs", std::to_string(p), format_g17(std::log(n)),
                     format_g17(fit.log_c + (p + 1) * std::log(fit.gamma) + plogp)});
        }
        summary["gamma"] = fit.gamma;
        summary["residual"] = fit.residual;
    } else {
        const Polygon poly = config_polygon(cfg);
        const double xi0 =
            cfg.xi > 0.0 ? cfg.xi
                         : 0.25 * std::min(poly.min_edge_length(), poly.min_vertex_separation());
        const NeighborhoodDecomposition dec = decompose(poly, xi0);
        json fits = json::array();
        for (int v = 0; v < poly.n(); ++v) {
            const double angle = poly.interior_angle(v);
            const Vec2 tv = (poly.vertex((v + 1) % poly.n()) - poly.vertex(v)).normalized();
            auto u = corner_power_field(poly.vertex(v), std::atan2(tv.y, tv.x), M_PI / angle);
            std::vector<std::pair<int, double>> rows;
            const int pmax = std::min(cfg.p_max, 6);
            for (int p = 0; p <= pmax; ++p) {
                const WeightedNormResult w = weighted_norm_sector(
                    dec, v, *u, p, p - 0.5 - cfg.s + cfg.eps_set.front());
                rows.emplace_back(p, w.value);
            }
            const GammaFit fit = fit_gamma(rows);
            for (const auto& [p, n] : rows) {
                const double plogp = p == 0 ? 0.0 : p * std::log(static_cast<double>(p));
                csv.row({"omega_v[" + std::to_string(v) + "]", std::to_string(p),
                         format_g17(std::log(n)),
                         format_g17(fit.log_c + (p + 1) * std::log(fit.gamma) + plogp)});
            }
            fits.push_back({{"vertex", v}, {"gamma", fit.gamma}, {"valid", fit.valid}});
        }
        summary["fits"] = fits;
    }
    csv.close();
    write_text_file((fs::path(cfg.out_dir) / "summary.json").string(), summary.dump(2) + "\n");
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"fractional Laplacian solver and verifier toolkit"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir;
    std::optional<unsigned long long> seed;
    std::optional<int> threads;
    for (auto* sub : {app.add_subcommand("solve", "direct Galerkin solve"),
                      app.add_subcommand("extend", "Caffarelli-Silvestre extension solve"),
                      app.add_subcommand("verify", "weighted-norm and inequality report"),
                      app.add_subcommand("cover", "neighborhood covering constructions"),
                      app.add_subcommand("report", "analytic growth tables")}) {
        sub->add_option("--config", config_path, "configuration JSON path");
        sub->add_option("--preset", preset, "preset name under the preset directory");
        sub->add_option("--out", out_dir, "output directory override");
        sub->add_option("--seed", seed, "sampling seed override");
        sub->add_option("--threads", threads, "thread count override");
    }

    std::vector<std::string> argv_like(args.rbegin(), args.rend());
    try {
        app.parse(std::vector<std::string>(argv_like));  // CLI11 takes reversed args
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        const RunConfig cfg = load_config(config_path, preset, out_dir, seed, threads);
        if (app.got_subcommand("solve")) return cmd_solve(cfg);
        if (app.got_subcommand("extend")) return cmd_extend(cfg);
        if (app.got_subcommand("verify")) return cmd_verify(cfg);
        if (app.got_subcommand("cover")) return cmd_cover(cfg);
        if (app.got_subcommand("report")) return cmd_report(cfg);
        return 2;
    } catch (const QuadratureToleranceError& e) {
        std::cerr << "quadrature tolerance not met: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace fraclap
