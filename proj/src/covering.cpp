#include "fraclap/covering.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "fraclap/errors.hpp"

namespace fraclap {

namespace {

double radical_inverse(unsigned long long i, unsigned base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

// DeltaTail from per-level stretched radii sums. counts/radii may extend past
// the enumerated items (closed-form rows of the lattice coverings).
DeltaTail make_delta_tail(double delta, const std::vector<double>& level_sums,
                          const std::vector<double>& level_radii, double tail_radius) {
    DeltaTail t;
    t.delta = delta;
    t.tail_radius = tail_radius;
    t.partial_sums.resize(level_sums.size());
    double acc = 0.0;
    for (size_t m = 0; m < level_sums.size(); ++m) {
        acc += level_sums[m];
        t.partial_sums[m] = acc;
        if (level_radii[m] < tail_radius) t.tail_below_radius += level_sums[m];
    }
    // increment ratio over the trailing levels
    std::vector<double> ratios;
    for (size_t m = level_sums.size() >= 9 ? level_sums.size() - 8 : 1; m < level_sums.size(); ++m)
        if (level_sums[m - 1] > 0.0) ratios.push_back(level_sums[m] / level_sums[m - 1]);
    if (!ratios.empty()) {
        std::sort(ratios.begin(), ratios.end());
        t.increment_ratio = ratios[ratios.size() / 2];
    }
    if (!level_sums.empty() && t.increment_ratio < 1.0 && t.increment_ratio > 0.0)
        t.extrapolated_remainder =
            level_sums.back() * t.increment_ratio / (1.0 - t.increment_ratio);
    else
        t.extrapolated_remainder = std::numeric_limits<double>::infinity();
    t.cauchy = t.increment_ratio < 0.98;
    return t;
}

struct LevelAccumulator {
    std::vector<double> sums;
    std::vector<double> radii;
    void add(int level, double value, double radius) {
        if (level >= static_cast<int>(sums.size())) {
            sums.resize(level + 1, 0.0);
            radii.resize(level + 1, 0.0);
        }
        sums[level] += value;
        radii[level] = std::max(radii[level], radius);
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Vertex neighborhood covering
// ---------------------------------------------------------------------------

BallCovering cover_vertex(const NeighborhoodDecomposition& dec, int vertex,
                          const CoverParams& params) {
    const Polygon& poly = dec.polygon();
    const double xi = dec.xi();
    const Vec2 P = poly.vertex(vertex);
    const double c = params.c;
    if (!(c > 0.0 && c < 1.0)) throw ParameterError("cover_vertex: c must lie in (0,1)", 0.5);
    if (params.c_hat != 0.0 && !(params.c_hat < 1.0))
        throw ParameterError("cover_vertex: c_hat must lie in (0,1)", 0.9);

    BallCovering cov;
    cov.region = RegionTag{RegionKind::kVertex, vertex, -1};
    cov.c = c;

    auto member = [&](Vec2 p) { return poly.contains(p) && dec.in_vertex_nbhd(vertex, p); };

    // area-uniform samples of the neighborhood inside the disk of radius xi
    auto sample_region = [&](int want, unsigned seed) {
        std::vector<Vec2> out;
        unsigned long long idx = 1 + 31ULL * seed;
        long attempts = 0;
        const long cap = 400L * want + 1000;
        while (static_cast<int>(out.size()) < want && attempts++ < cap) {
            const double u1 = radical_inverse(idx, 2);
            const double u2 = radical_inverse(idx, 3);
            ++idx;
            const double r = xi * std::sqrt(u1);
            const double th = 2.0 * M_PI * u2;
            const Vec2 p = P + Vec2{r * std::cos(th), r * std::sin(th)};
            if (member(p)) out.push_back(p);
        }
        return out;
    };

    const std::vector<Vec2> feas_pts = sample_region(3000, params.seed + 7);
    if (feas_pts.empty()) {
        // empty neighborhood: vacuous covering
        cov.c_hat = params.c_hat > 0 ? params.c_hat : std::min(0.9, 2 * c);
        cov.c_tilde = params.c_tilde > 0 ? params.c_tilde : 0.5 * (cov.c + cov.c_hat);
        cov.cert.coverage_fraction = 1.0;
        for (double d : params.delta_probes)
            cov.delta_tails.push_back(make_delta_tail(d, {}, {}, params.floor_radius));
        return cov;
    }

    double feasible = std::numeric_limits<double>::infinity();
    for (const Vec2& p : feas_pts)
        feasible = std::min(feasible, poly.boundary_distance(p) / (p - P).norm());
    double c_hat = params.c_hat;
    if (c_hat == 0.0) {
        c_hat = std::min(0.92 * feasible, std::min(0.95, 2.0 * c));
        if (!(c_hat > c))
            throw ParameterError("cover_vertex: no feasible stretch factor above c", feasible);
    } else if (c_hat > feasible) {
        throw ParameterError("cover_vertex: stretched balls would exit the domain; feasible c_hat",
                             feasible);
    } else if (!(c_hat > c)) {
        throw ParameterError("cover_vertex: require c < c_hat", feasible);
    }
    cov.c_hat = c_hat;
    cov.c_tilde = params.c_tilde > 0 ? params.c_tilde : 0.5 * (c + c_hat);
    if (!(c < cov.c_tilde && cov.c_tilde < cov.c_hat))
        throw ParameterError("cover_vertex: require c < c_tilde < c_hat", cov.c_hat);

    const int k_max =
        std::max(0, static_cast<int>(std::ceil(std::log2(c_hat * xi / params.floor_radius))));

    // candidate lattice per dyadic shell; spacing well below the covering radii
    const int n_r = std::max(2, static_cast<int>(std::ceil(4.2 / c)));
    const double dth = 0.12 * c;
    std::vector<std::vector<int>> selected_by_shell(k_max + 1);
    std::vector<CoverItem> items;

    std::vector<Vec2> cand;
    for (int k = 0; k <= k_max; ++k) {
        const double r_hi = xi * std::pow(2.0, -k);
        const double r_lo = 0.5 * r_hi;
        cand.clear();
        for (int ir = 0; ir < n_r; ++ir) {
            const double r = r_lo + (r_hi - r_lo) * (ir + 0.5) / n_r;
            const int nth = static_cast<int>(std::ceil(2.0 * M_PI / dth));
            for (int it = 0; it < nth; ++it) {
                const double th = it * dth;
                const Vec2 p = P + Vec2{r * std::cos(th), r * std::sin(th)};
                if (member(p)) cand.push_back(p);
            }
        }
        auto covered = [&](Vec2 p) {
            for (int kk = std::max(0, k - 2); kk <= k; ++kk)
                for (int idx : selected_by_shell[kk]) {
                    const CoverItem& it = items[idx];
                    if ((p - it.center).norm() <= 0.85 * c * it.anchor_dist) return true;
                }
            return false;
        };
        // farthest-point insertion until the shell candidates are covered
        while (true) {
            int best = -1;
            double best_score = -1.0;
            for (size_t ci = 0; ci < cand.size(); ++ci) {
                if (covered(cand[ci])) continue;
                double min_d = std::numeric_limits<double>::infinity();
                for (int kk = std::max(0, k - 2); kk <= k; ++kk)
                    for (int idx : selected_by_shell[kk])
                        min_d = std::min(min_d, (cand[ci] - items[idx].center).norm());
                const double score = std::isfinite(min_d) ? min_d : 1e300;
                if (score > best_score) {
                    best_score = score;
                    best = static_cast<int>(ci);
                }
            }
            if (best < 0) break;
            CoverItem it;
            it.center = cand[best];
            it.anchor_dist = (cand[best] - P).norm();
            it.level = k;
            it.kind = CoverItemKind::kBall;
            selected_by_shell[k].push_back(static_cast<int>(items.size()));
            items.push_back(it);
            if (static_cast<long>(items.size()) > params.max_items)
                throw std::runtime_error("cover_vertex: item budget exceeded");
        }
    }
    cov.items = items;

    // --- certification ---
    auto level_of = [&](double rv) {
        const int k = static_cast<int>(std::floor(std::log2(xi / std::max(rv, 1e-300))));
        return std::clamp(k, 0, k_max);
    };
    auto covered_by = [&](Vec2 p) {
        const int k = level_of((p - P).norm());
        for (int kk = std::max(0, k - 2); kk <= std::min(k_max, k + 2); ++kk)
            for (int idx : selected_by_shell[kk]) {
                const CoverItem& it = items[idx];
                if ((p - it.center).norm() <= c * it.anchor_dist * (1.0 + 1e-12)) return true;
            }
        return false;
    };

    const std::vector<Vec2> cover_pts = sample_region(params.mc_samples, params.seed);
    long ok = 0;
    for (const Vec2& p : cover_pts) ok += covered_by(p) ? 1 : 0;
    cov.cert.coverage_samples = static_cast<long>(cover_pts.size());
    cov.cert.coverage_fraction =
        cover_pts.empty() ? 1.0 : static_cast<double>(ok) / cover_pts.size();

    // overlap of the stretched balls, sampled per dyadic annulus
    auto overlap_pass = [&](int per_level, unsigned seed) {
        int N = 0;
        double cb = 1.0;
        unsigned long long idx = 1 + 97ULL * seed;
        for (int k = 0; k <= k_max; ++k) {
            const double r_hi = xi * std::pow(2.0, -k);
            const double r_lo = 0.25 * r_hi;
            for (int t = 0; t < per_level; ++t) {
                const double u1 = radical_inverse(idx, 2);
                const double u2 = radical_inverse(idx, 3);
                ++idx;
                const double r = std::sqrt(r_lo * r_lo + u1 * (r_hi * r_hi - r_lo * r_lo));
                const double th = 2.0 * M_PI * u2;
                const Vec2 p = P + Vec2{r * std::cos(th), r * std::sin(th)};
                int cnt = 0;
                for (int kk = std::max(0, k - 3); kk <= std::min(k_max, k + 3); ++kk)
                    for (int ii : selected_by_shell[kk]) {
                        const CoverItem& it = items[ii];
                        const double R = c_hat * it.anchor_dist;
                        if ((p - it.center).norm() <= R) {
                            ++cnt;
                            const double rv = (p - P).norm();
                            cb = std::max(cb, std::max(rv / R, R / rv));
                        }
                    }
                N = std::max(N, cnt);
            }
        }
        return std::pair<int, double>(N, cb);
    };
    const int per_level = std::max(64, params.mc_samples / std::max(1, k_max + 1));
    auto [N1, cb1] = overlap_pass(per_level, params.seed + 1);
    auto [N2, cb2] = overlap_pass(2 * per_level, params.seed + 2);
    cov.cert.overlap_max = N1;
    cov.cert.overlap_max_doubled = N2;
    cov.cert.overlap_samples = static_cast<long>(per_level) * (k_max + 1);
    cov.cert.c_b = std::max(cb1, cb2);

    LevelAccumulator acc;
    for (const CoverItem& it : items) {
        const double R = c_hat * it.anchor_dist;
        acc.add(it.level, 1.0, R);
    }
    for (double d : params.delta_probes) {
        LevelAccumulator da;
        for (const CoverItem& it : items) {
            const double R = c_hat * it.anchor_dist;
            da.add(it.level, std::pow(R, d), R);
        }
        cov.delta_tails.push_back(make_delta_tail(d, da.sums, da.radii, 1e-12));
    }
    return cov;
}

// ---------------------------------------------------------------------------
// Row-lattice coverings refined toward an edge (shared by cover_edge and the
// vertex-edge sub-coverings). Membership is closed-form per row, so coverage
// and overlap can be certified without enumerating the geometrically growing
// deep rows.
// ---------------------------------------------------------------------------

namespace {

struct RowLattice {
    Vec2 origin;
    Vec2 tangent;
    Vec2 normal;
    double band_top;  // heights covered: (0, band_top]
    double c;
    double c_hat;
    double rho;      // band ratio
    double spacing;  // delta_m = spacing * y_m
    double par_min, par_max;
    std::function<bool(Vec2)> keep_probe;  // region test for keeping a center

    double band(int m) const { return band_top * std::pow(rho, m); }
    double row_height(int m) const { return band(m) * 0.5 * (1.0 + rho); }
    double delta(int m) const { return spacing * row_height(m); }

    Vec2 center(int m, long j) const {
        return origin + tangent * (j * delta(m)) + normal * row_height(m);
    }

    bool kept(int m, long j) const {
        const Vec2 p = center(m, j);
        const double r = 0.9 * c * row_height(m);
        const Vec2 probes[5] = {p, p + tangent * r, p - tangent * r, p + normal * r,
                                p - normal * r};
        for (const Vec2& q : probes)
            if (keep_probe(q)) return true;
        return false;
    }

    int row_of_height(double w) const {
        if (w >= band_top) return 0;
        const int m = static_cast<int>(std::floor(std::log(band_top / w) / std::log(1.0 / rho)));
        return std::max(0, m);
    }

    std::pair<long, long> j_range(int m) const {
        const double d = delta(m);
        return {static_cast<long>(std::floor(par_min / d)) - 1,
                static_cast<long>(std::ceil(par_max / d)) + 1};
    }

    // local coordinates
    void local(Vec2 p, double& par, double& w) const {
        par = (p - origin).dot(tangent);
        w = (p - origin).dot(normal);
    }

    bool covered(Vec2 p, int max_row) const {
        double par, w;
        local(p, par, w);
        if (w <= 0.0 || w > band_top) return false;
        const int m0 = row_of_height(w);
        for (int m = std::max(0, m0 - 1); m <= std::min(max_row, m0 + 1); ++m) {
            const double d = delta(m);
            const long jc = std::lround(par / d);
            for (long j = jc - 1; j <= jc + 1; ++j) {
                if (!kept(m, j)) continue;
                if ((p - center(m, j)).norm() <= c * row_height(m) * (1.0 + 1e-12)) return true;
            }
        }
        return false;
    }

    int overlap_count(Vec2 p, int max_row, double* cb = nullptr) const {
        double par, w;
        local(p, par, w);
        int cnt = 0;
        if (w <= 0.0) return 0;
        const int m0 = w > band_top ? 0 : row_of_height(w);
        for (int m = std::max(0, m0 - 3); m <= std::min(max_row, m0 + 3); ++m) {
            const double d = delta(m);
            const long jc = std::lround(par / d);
            const long reach = static_cast<long>(std::ceil(c_hat / spacing)) + 1;
            for (long j = jc - reach; j <= jc + reach; ++j) {
                if (!kept(m, j)) continue;
                const double R = c_hat * row_height(m);
                if ((p - center(m, j)).norm() <= R) {
                    ++cnt;
                    if (cb != nullptr && w > 0)
                        *cb = std::max(*cb, std::max(w / R, R / w));
                }
            }
        }
        return cnt;
    }
};

RowLattice make_lattice(Vec2 origin, Vec2 tangent, Vec2 normal, double band_top, double c,
                        double c_hat, double par_min, double par_max,
                        std::function<bool(Vec2)> keep_probe) {
    RowLattice lat;
    lat.origin = origin;
    lat.tangent = tangent;
    lat.normal = normal;
    lat.band_top = band_top;
    lat.c = c;
    lat.c_hat = c_hat;
    lat.rho = (1.0 - 0.5 * c) / (1.0 + 0.5 * c);
    lat.spacing = std::sqrt(3.0) * 0.95 * c;
    lat.par_min = par_min;
    lat.par_max = par_max;
    lat.keep_probe = std::move(keep_probe);
    return lat;
}

// Enumerate rows into items within the budget; append closed-form level data
// down to the radius floor for the delta tails.
void lattice_items_and_tails(const RowLattice& lat, const CoverParams& base, double floor_radius,
                             long max_items, const std::vector<double>& delta_probes,
                             CoverItemKind kind, BallCovering& cov, int& rows_enumerated) {
    std::vector<long> row_counts;
    long total = 0;
    int m = 0;
    rows_enumerated = 0;
    while (lat.c_hat * lat.row_height(m) >= floor_radius) {
        const auto [jlo, jhi] = lat.j_range(m);
        long cnt = 0;
        if (total <= max_items) {
            for (long j = jlo; j <= jhi; ++j) {
                if (!lat.kept(m, j)) continue;
                ++cnt;
                if (total + cnt <= max_items) {
                    CoverItem it;
                    it.center = lat.center(m, j);
                    it.anchor_dist = lat.row_height(m);
                    it.level = m;
                    it.kind = kind;
                    cov.items.push_back(it);
                }
            }
            total += cnt;
            rows_enumerated = m + 1;
            row_counts.push_back(cnt);
        } else {
            // extrapolate the per-row count geometrically (row width shrinks by rho)
            const double last = static_cast<double>(row_counts.back());
            row_counts.push_back(static_cast<long>(std::ceil(last / lat.rho)));
        }
        ++m;
        if (m > 4000) break;
    }
    for (double dp : delta_probes) {
        std::vector<double> sums(row_counts.size()), radii(row_counts.size());
        for (size_t r = 0; r < row_counts.size(); ++r) {
            const double R = lat.c_hat * lat.row_height(static_cast<int>(r));
            sums[r] = static_cast<double>(row_counts[r]) * std::pow(R, dp);
            radii[r] = R;
        }
        cov.delta_tails.push_back(make_delta_tail(dp, sums, radii, 1e-12));
    }
}

}  // namespace

BallCovering cover_edge(const NeighborhoodDecomposition& dec, int edge,
                        const CoverParams& params) {
    const Polygon& poly = dec.polygon();
    const double c = params.c;
    if (!(c > 0.0 && c < 1.0)) throw ParameterError("cover_edge: c must lie in (0,1)", 0.5);
    const double band_top = std::pow(dec.xi(), dec.edge_exponent());

    BallCovering cov;
    cov.region = RegionTag{RegionKind::kEdge, -1, edge};
    cov.c = c;

    auto member = [&](Vec2 p) { return poly.contains(p) && dec.in_edge_nbhd(edge, p); };

    // feasibility of the stretch factor: stretched balls must stay inside
    const Vec2 A = poly.edge_start(edge);
    const Vec2 tangent = poly.edge_tangent(edge);
    const Vec2 normal = poly.edge_normal(edge);
    const double L = poly.edge_length(edge);
    double feasible = std::numeric_limits<double>::infinity();
    bool any = false;
    unsigned long long idx = 1;
    for (int t = 0; t < 4000; ++t) {
        const double u1 = radical_inverse(idx, 2);
        const double u2 = radical_inverse(idx, 3);
        ++idx;
        const Vec2 p = A + tangent * (u1 * L) + normal * (u2 * band_top);
        if (!member(p)) continue;
        any = true;
        double w = (p - A).dot(normal);
        feasible = std::min(feasible, poly.boundary_distance(p) / w);
    }
    if (!any) {
        cov.c_hat = params.c_hat > 0 ? params.c_hat : std::min(0.9, 2 * c);
        cov.c_tilde = params.c_tilde > 0 ? params.c_tilde : 0.5 * (cov.c + cov.c_hat);
        cov.cert.coverage_fraction = 1.0;
        for (double d : params.delta_probes)
            cov.delta_tails.push_back(make_delta_tail(d, {}, {}, params.floor_radius));
        return cov;
    }
    double c_hat = params.c_hat;
    if (c_hat == 0.0) {
        c_hat = std::min({0.92 * feasible, 0.95, 2.0 * c});
        if (!(c_hat > c))
            throw ParameterError("cover_edge: no feasible stretch factor above c", feasible);
    } else if (c_hat > feasible || !(c_hat > c)) {
        throw ParameterError("cover_edge: infeasible c_hat; feasible bound", feasible);
    }
    cov.c_hat = c_hat;
    cov.c_tilde = params.c_tilde > 0 ? params.c_tilde : 0.5 * (c + c_hat);

    RowLattice lat = make_lattice(A, tangent, normal, band_top, c, c_hat, 0.0, L, member);
    int rows_enum = 0;
    lattice_items_and_tails(lat, params, params.floor_radius, params.max_items,
                            params.delta_probes, CoverItemKind::kBall, cov, rows_enum);
    const int max_row = std::max(0, static_cast<int>(std::floor(
                                        std::log(c_hat * lat.row_height(0) / params.floor_radius) /
                                        std::log(1.0 / lat.rho))) +
                                        2);

    // coverage certification on region samples
    unsigned long long cidx = 1 + 13ULL * params.seed;
    long ok = 0, total = 0;
    long attempts = 0;
    while (total < params.mc_samples && attempts++ < 400L * params.mc_samples) {
        const double u1 = radical_inverse(cidx, 2);
        const double u2 = radical_inverse(cidx, 3);
        ++cidx;
        const Vec2 p = A + tangent * (u1 * L) + normal * (u2 * band_top);
        if (!member(p)) continue;
        ++total;
        ok += lat.covered(p, max_row) ? 1 : 0;
    }
    cov.cert.coverage_samples = total;
    cov.cert.coverage_fraction = total == 0 ? 1.0 : static_cast<double>(ok) / total;

    // overlap, stratified per row band
    auto overlap_pass = [&](int per_row, unsigned seed) {
        int N = 0;
        double cb = 1.0;
        unsigned long long oidx = 1 + 41ULL * seed;
        const int deep = std::min(max_row, 40);
        for (int m = 0; m <= deep; ++m) {
            for (int t = 0; t < per_row; ++t) {
                const double u1 = radical_inverse(oidx, 2);
                const double u2 = radical_inverse(oidx, 3);
                ++oidx;
                const double w = lat.band(m + 1) + u2 * (lat.band(m) - lat.band(m + 1));
                const Vec2 p = A + tangent * (u1 * L) + normal * w;
                N = std::max(N, lat.overlap_count(p, max_row, &cb));
            }
        }
        return std::pair<int, double>(N, cb);
    };
    const int per_row = std::max(64, params.mc_samples / std::max(1, std::min(max_row, 40) + 1));
    auto [N1, cb1] = overlap_pass(per_row, params.seed + 1);
    auto [N2, cb2] = overlap_pass(2 * per_row, params.seed + 2);
    cov.cert.overlap_max = N1;
    cov.cert.overlap_max_doubled = N2;
    cov.cert.overlap_samples = static_cast<long>(per_row) * (std::min(max_row, 40) + 1);
    cov.cert.c_b = std::max(cb1, cb2);
    return cov;
}

// ---------------------------------------------------------------------------
// Vertex-edge covering: geometric chain of half-balls + per-half-ball lattices
// ---------------------------------------------------------------------------

VertexEdgeCovering::VertexEdgeCovering(const NeighborhoodDecomposition& dec, int vertex, int edge,
                                       const CoverParams& params)
    : poly_(dec.polygon()), vertex_(vertex), edge_(edge), params_(params) {
    const double xi = dec.xi();
    const double c = params.c;
    if (!(c > 0.0 && c < 1.0))
        throw ParameterError("cover_vertex_edge: c must lie in (0,1)", 0.5);
    if (params.c_hat != 0.0 && !(params.c_hat < 1.0))
        throw ParameterError("cover_vertex_edge: c_hat must lie in (0,1)", 0.9);
    // the wedge opening xi must be small against c for the chain to cover
    if (xi > 0.8 * c)
        throw ParameterError("cover_vertex_edge: xi too large for requested c; need c >=",
                             xi / 0.8);

    vertex_pos_ = poly_.vertex(vertex);
    const auto everts = poly_.vertices_of_edge(edge);
    if (everts[0] != vertex && everts[1] != vertex)
        throw std::invalid_argument("cover_vertex_edge: edge not incident to vertex");
    const Vec2 far_end = poly_.vertex(everts[0] == vertex ? everts[1] : everts[0]);
    tangent_ = (far_end - vertex_pos_).normalized();
    // inward normal consistent with the polygon orientation
    normal_ = poly_.edge_normal(edge);
    if (everts[0] != vertex) {
        // edge stored in the opposite direction; normal unchanged, tangent flipped
    }

    // feasibility of the half-ball property along the chain
    auto other_boundary_dist = [&](Vec2 p) {
        double dmin = std::numeric_limits<double>::infinity();
        for (int k = 0; k < poly_.n(); ++k) {
            if (k == edge) continue;
            dmin = std::min(dmin, point_segment_distance(p, poly_.edge_start(k), poly_.edge_end(k)));
        }
        dmin = std::min(dmin, (p - far_end).norm());
        dmin = std::min(dmin, (p - vertex_pos_).norm());
        return dmin;
    };

    const double q = 1.0 / (1.0 + 0.7 * c);
    const double d0 = 0.98 * xi;
    double feasible = std::numeric_limits<double>::infinity();
    std::vector<double> dists;
    for (double d = d0; c * d >= params.floor_radius; d *= q) {
        dists.push_back(d);
        feasible = std::min(feasible, other_boundary_dist(vertex_pos_ + tangent_ * d) / d);
        if (dists.size() > 100000) break;
    }
    if (2.0 * c > feasible)
        throw ParameterError(
            "cover_vertex_edge: half-ball precondition fails (angle too small); feasible c",
            0.5 * feasible);
    double c_hat = params.c_hat;
    if (c_hat == 0.0) c_hat = std::min({0.92 * feasible, 0.95, 2.0 * c});
    if (!(c_hat > c) || c_hat > feasible)
        throw ParameterError("cover_vertex_edge: infeasible c_hat; feasible bound", feasible);

    outer_.region = RegionTag{RegionKind::kVertexEdge, vertex, edge};
    outer_.c = c;
    outer_.c_hat = c_hat;
    outer_.c_tilde = params.c_tilde > 0 ? params.c_tilde : 0.5 * (c + c_hat);
    for (size_t i = 0; i < dists.size(); ++i) {
        CoverItem it;
        it.center = vertex_pos_ + tangent_ * dists[i];
        it.anchor_dist = dists[i];
        it.level = static_cast<int>(i);
        it.kind = CoverItemKind::kHalfBall;
        outer_.items.push_back(it);
    }

    // coverage of the wedge by the unstretched half-balls
    auto member = [&](Vec2 p) {
        return poly_.contains(p) && dec.in_vertex_edge_nbhd(vertex, edge, p);
    };
    unsigned long long idx = 1 + 17ULL * params.seed;
    long ok = 0, total = 0, attempts = 0;
    const double th_max = std::asin(std::min(1.0, xi)) * 1.2 + 1e-3;
    while (total < params.mc_samples && attempts++ < 400L * params.mc_samples) {
        const double u1 = radical_inverse(idx, 2);
        const double u2 = radical_inverse(idx, 3);
        ++idx;
        const double r = xi * std::sqrt(u1);
        const double th = th_max * u2;
        const Vec2 p =
            vertex_pos_ + tangent_ * (r * std::cos(th)) + normal_ * (r * std::sin(th));
        if (!member(p)) continue;
        ++total;
        // nearest chain members by index
        const double dpar = (p - vertex_pos_).dot(tangent_);
        int i0 = static_cast<int>(std::round(std::log(dpar / d0) / std::log(q)));
        bool cov = false;
        for (int i = std::max(0, i0 - 2); i <= std::min<int>(dists.size() - 1, i0 + 2); ++i)
            if ((p - outer_.items[i].center).norm() <= c * dists[i] * (1 + 1e-12)) cov = true;
        ok += cov ? 1 : 0;
    }
    outer_.cert.coverage_samples = total;
    outer_.cert.coverage_fraction = total == 0 ? 1.0 : static_cast<double>(ok) / total;

    // overlap of the stretched half-balls along the chain
    int N = 0;
    double cb = 1.0;
    unsigned long long oidx = 1 + 53ULL * params.seed;
    const int strata = std::min<int>(static_cast<int>(dists.size()), 60);
    for (int i = 0; i < strata; ++i) {
        for (int t = 0; t < 200; ++t) {
            const double u1 = radical_inverse(oidx, 2);
            const double u2 = radical_inverse(oidx, 3);
            ++oidx;
            const double r = dists[i] * (0.8 + 0.4 * u1);
            const double th = th_max * u2;
            const Vec2 p =
                vertex_pos_ + tangent_ * (r * std::cos(th)) + normal_ * (r * std::sin(th));
            if (!poly_.contains(p)) continue;
            int cnt = 0;
            const double dpar = (p - vertex_pos_).dot(tangent_);
            int i0 = dpar > 0 ? static_cast<int>(std::round(std::log(dpar / d0) / std::log(q)))
                              : 0;
            for (int ii = std::max(0, i0 - 6); ii <= std::min<int>(dists.size() - 1, i0 + 6);
                 ++ii) {
                const double R = c_hat * dists[ii];
                if ((p - outer_.items[ii].center).norm() <= R) {
                    ++cnt;
                    const double rv = (p - vertex_pos_).norm();
                    cb = std::max(cb, std::max(rv / R, R / rv));
                }
            }
            N = std::max(N, cnt);
        }
    }
    outer_.cert.overlap_max = N;
    outer_.cert.overlap_max_doubled = N;
    outer_.cert.overlap_samples = 200L * strata;
    outer_.cert.c_b = cb;

    for (double dp : params.delta_probes) {
        std::vector<double> sums(dists.size()), radii(dists.size());
        for (size_t i = 0; i < dists.size(); ++i) {
            const double R = c_hat * dists[i];
            sums[i] = std::pow(R, dp);
            radii[i] = R;
        }
        outer_.delta_tails.push_back(make_delta_tail(dp, sums, radii, 1e-12));
    }
}

double VertexEdgeCovering::feasible_c1_hat() const {
    return (outer_.c_tilde - outer_.c) / outer_.c;
}

BallCovering VertexEdgeCovering::subcovering(int i, const SubCoverParams& params) const {
    if (i < 0 || i >= n_half_balls())
        throw std::invalid_argument("subcovering: half-ball index out of range");
    const CoverItem& H = outer_.items[i];
    const double Rh = outer_.c * H.anchor_dist;        // radius of H_i
    const double Rt = outer_.c_tilde * H.anchor_dist;  // radius of the intermediate half-ball

    const double feas = feasible_c1_hat();
    double c1_hat = params.c1_hat;
    if (c1_hat == 0.0) c1_hat = std::min(0.9 * feas, 0.9);
    double c1 = params.c1;
    if (c1 == 0.0) c1 = 0.5 * c1_hat;
    if (!(c1 > 0 && c1 < c1_hat))
        throw ParameterError("subcovering: require 0 < c1 < c1_hat; feasible c1_hat", feas);
    if (c1_hat > feas)
        throw ParameterError("subcovering: stretched balls exit the intermediate half-ball",
                             feas);

    BallCovering cov;
    cov.region = outer_.region;
    cov.c = c1;
    cov.c_hat = c1_hat;
    cov.c_tilde = 0.5 * (c1 + c1_hat);

    // half-disk membership in the local frame of H_i
    auto member = [&](Vec2 p) {
        const Vec2 rel = p - H.center;
        const double w = rel.dot(normal_);
        return w >= 0.0 && rel.norm() <= Rh;
    };
    RowLattice lat = make_lattice(H.center, tangent_, normal_, Rh, c1, c1_hat, -Rh, Rh, member);
    int rows_enum = 0;
    lattice_items_and_tails(lat, params_, params.floor_radius, params.max_items,
                            params.delta_probes, CoverItemKind::kBall, cov, rows_enum);
    const int max_row =
        std::max(0, static_cast<int>(std::floor(std::log(c1_hat * lat.row_height(0) /
                                                         params.floor_radius) /
                                                std::log(1.0 / lat.rho))) +
                        2);

    // containment of the stretched balls in the intermediate half-ball
    bool contained = true;
    for (const CoverItem& it : cov.items) {
        const double reach = (it.center - H.center).norm() + c1_hat * it.anchor_dist;
        if (reach > Rt * (1.0 + 1e-9)) contained = false;
    }
    if (!contained)
        throw ParameterError("subcovering: containment violated; feasible c1_hat", feas);

    // coverage of H_i
    unsigned long long idx = 1 + 29ULL * params.seed;
    long ok = 0, total = 0, attempts = 0;
    while (total < params.mc_samples && attempts++ < 100L * params.mc_samples) {
        const double u1 = radical_inverse(idx, 2);
        const double u2 = radical_inverse(idx, 3);
        ++idx;
        const double r = Rh * std::sqrt(u1);
        const double th = M_PI * u2;
        const Vec2 p = H.center + tangent_ * (r * std::cos(th)) + normal_ * (r * std::sin(th));
        if (!member(p)) continue;
        ++total;
        ok += lat.covered(p, max_row) ? 1 : 0;
    }
    cov.cert.coverage_samples = total;
    cov.cert.coverage_fraction = total == 0 ? 1.0 : static_cast<double>(ok) / total;

    // overlap per row stratum
    auto overlap_pass = [&](int per_row, unsigned seed) {
        int N = 0;
        double cb = 1.0;
        unsigned long long oidx = 1 + 71ULL * seed;
        const int deep = std::min(max_row, 30);
        for (int m = 0; m <= deep; ++m) {
            for (int t = 0; t < per_row; ++t) {
                const double u1 = radical_inverse(oidx, 2);
                const double u2 = radical_inverse(oidx, 3);
                ++oidx;
                const double w = lat.band(m + 1) + u2 * (lat.band(m) - lat.band(m + 1));
                const double par = -Rh + 2.0 * Rh * u1;
                const Vec2 p = H.center + tangent_ * par + normal_ * w;
                N = std::max(N, lat.overlap_count(p, max_row, &cb));
            }
        }
        return std::pair<int, double>(N, cb);
    };
    auto [N1, cb1] = overlap_pass(100, params.seed + 1);
    auto [N2, cb2] = overlap_pass(200, params.seed + 2);
    cov.cert.overlap_max = N1;
    cov.cert.overlap_max_doubled = N2;
    cov.cert.overlap_samples = 100L * (std::min(max_row, 30) + 1);
    cov.cert.c_b = std::max(cb1, cb2);
    return cov;
}

}  // namespace fraclap
