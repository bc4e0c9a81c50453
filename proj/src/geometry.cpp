#include "fraclap/geometry.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fraclap {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool segments_properly_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return (q - p).cross(r - p); };
    const double o1 = orient(a, b, c);
    const double o2 = orient(a, b, d);
    const double o3 = orient(c, d, a);
    const double o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 &&
           o4 != 0;
}

}  // namespace

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

Polygon Polygon::from_vertices(std::vector<Vec2> vertices) {
    Polygon poly(std::move(vertices));
    // normalize to counterclockwise orientation
    double twice_area = 0.0;
    const int n = poly.n();
    for (int i = 0; i < n; ++i) twice_area += poly.vertices_[i].cross(poly.vertices_[(i + 1) % n]);
    if (twice_area < 0.0) std::reverse(poly.vertices_.begin(), poly.vertices_.end());
    poly.validate();
    return poly;
}

void Polygon::validate() const {
    const int nn = n();
    if (nn < 3) throw std::invalid_argument("Polygon: need at least 3 vertices");
    const double scale = diameter();
    for (int i = 0; i < nn; ++i) {
        if ((vertex(i) - vertex((i + 1) % nn)).norm() < 1e-12 * scale)
            throw std::invalid_argument("Polygon: repeated consecutive vertices");
    }
    // simplicity: non-adjacent edges must not intersect or touch
    for (int i = 0; i < nn; ++i) {
        for (int j = i + 1; j < nn; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == nn - 1);
            if (adjacent) continue;
            if (segments_properly_intersect(edge_start(i), edge_end(i), edge_start(j), edge_end(j)))
                throw std::invalid_argument("Polygon: self-intersecting boundary");
            if (point_segment_distance(edge_start(j), edge_start(i), edge_end(i)) <
                    1e-12 * scale ||
                point_segment_distance(edge_start(i), edge_start(j), edge_end(j)) < 1e-12 * scale)
                throw std::invalid_argument("Polygon: boundary touches itself");
        }
    }
    for (int i = 0; i < nn; ++i) {
        const double ang = interior_angle(i);
        if (!(ang > 1e-9 && ang < 2.0 * kPi - 1e-9))
            throw std::invalid_argument("Polygon: cusp or slit angle at a vertex");
    }
}

Polygon Polygon::from_json(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    if (!j.contains("vertices") || !j["vertices"].is_array())
        throw std::invalid_argument("polygon JSON: missing \"vertices\" array");
    std::vector<Vec2> vs;
    for (const auto& item : j["vertices"]) {
        if (!item.is_array() || item.size() != 2)
            throw std::invalid_argument("polygon JSON: vertex entries must be [x,y]");
        vs.push_back({item[0].get<double>(), item[1].get<double>()});
    }
    return from_vertices(std::move(vs));
}

Polygon Polygon::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("polygon JSON: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string Polygon::to_json() const {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (const Vec2& v : vertices_) j["vertices"].push_back({v.x, v.y});
    return j.dump(2);
}

Polygon Polygon::unit_square() { return from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

Polygon Polygon::l_shape() {
    return from_vertices({{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}});
}

Polygon Polygon::sector_triangle(double leg) {
    return from_vertices({{0, 0}, {leg, 0}, {0, leg}});
}

std::array<int, 2> Polygon::edges_at_vertex(int i) const { return {(i + n() - 1) % n(), i}; }

std::array<int, 2> Polygon::vertices_of_edge(int k) const { return {k, (k + 1) % n()}; }

double Polygon::interior_angle(int i) const {
    const Vec2 a = vertex((i + 1) % n()) - vertex(i);
    const Vec2 b = vertex((i + n() - 1) % n()) - vertex(i);
    double ang = std::atan2(a.cross(b), a.dot(b));
    if (ang < 0.0) ang += 2.0 * kPi;
    return ang;
}

double Polygon::area() const {
    double twice = 0.0;
    for (int i = 0; i < n(); ++i) twice += vertices_[i].cross(vertices_[(i + 1) % n()]);
    return 0.5 * std::abs(twice);
}

double Polygon::diameter() const {
    double d = 0.0;
    for (int i = 0; i < n(); ++i)
        for (int j = i + 1; j < n(); ++j) d = std::max(d, (vertex(i) - vertex(j)).norm());
    return d;
}

double Polygon::min_edge_length() const {
    double m = edge_length(0);
    for (int k = 1; k < n(); ++k) m = std::min(m, edge_length(k));
    return m;
}

double Polygon::min_vertex_separation() const {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n(); ++i)
        for (int j = i + 1; j < n(); ++j) m = std::min(m, (vertex(i) - vertex(j)).norm());
    return m;
}

void Polygon::bounding_box(Vec2& lo, Vec2& hi) const {
    lo = hi = vertices_[0];
    for (const Vec2& v : vertices_) {
        lo.x = std::min(lo.x, v.x);
        lo.y = std::min(lo.y, v.y);
        hi.x = std::max(hi.x, v.x);
        hi.y = std::max(hi.y, v.y);
    }
}

double Polygon::boundary_distance(Vec2 p) const {
    double d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n(); ++k)
        d = std::min(d, point_segment_distance(p, edge_start(k), edge_end(k)));
    return d;
}

bool Polygon::contains(Vec2 p, double tol) const {
    if (boundary_distance(p) <= tol) return true;
    bool inside = false;
    for (int k = 0; k < n(); ++k) {
        const Vec2 a = edge_start(k);
        const Vec2 b = edge_end(k);
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

double DistanceSet::rho(int vertex, int edge) const {
    if (r_v[vertex] == 0.0) return std::numeric_limits<double>::infinity();
    return r_e[edge] / r_v[vertex];
}

DistanceSet distances(const Polygon& poly, Vec2 x, double tol) {
    if (!poly.contains(x, tol * std::max(1.0, poly.diameter())))
        throw std::domain_error("distances: point lies outside the closed polygon");
    DistanceSet out;
    out.r_v.resize(poly.n());
    out.r_e.resize(poly.n());
    for (int i = 0; i < poly.n(); ++i) out.r_v[i] = (x - poly.vertex(i)).norm();
    for (int k = 0; k < poly.n(); ++k)
        out.r_e[k] = point_segment_distance(x, poly.edge_start(k), poly.edge_end(k));
    return out;
}

std::string RegionTag::label() const {
    switch (kind) {
        case RegionKind::kVertex:
            return "omega_v[" + std::to_string(vertex) + "]";
        case RegionKind::kVertexEdge:
            return "omega_ve[" + std::to_string(vertex) + "," + std::to_string(edge) + "]";
        case RegionKind::kEdge:
            return "omega_e[" + std::to_string(edge) + "]";
        case RegionKind::kInterior:
            return "interior";
    }
    return "?";
}

Vec2 halton2(unsigned long long index) {
    auto radical_inverse = [](unsigned long long i, unsigned base) {
        double f = 1.0, r = 0.0;
        while (i > 0) {
            f /= base;
            r += f * static_cast<double>(i % base);
            i /= base;
        }
        return r;
    };
    return {radical_inverse(index, 2), radical_inverse(index, 3)};
}

std::vector<Vec2> sample_polygon(const Polygon& poly, int count, unsigned seed) {
    Vec2 lo, hi;
    poly.bounding_box(lo, hi);
    std::vector<Vec2> out;
    out.reserve(count);
    unsigned long long idx = 1 + static_cast<unsigned long long>(seed) * 7919ULL;
    while (static_cast<int>(out.size()) < count) {
        const Vec2 u = halton2(idx++);
        const Vec2 p{lo.x + u.x * (hi.x - lo.x), lo.y + u.y * (hi.y - lo.y)};
        if (poly.contains(p)) out.push_back(p);
    }
    return out;
}

NeighborhoodDecomposition::NeighborhoodDecomposition(Polygon poly, double xi_requested,
                                                     double xi_effective, DecomposeOptions opt)
    : poly_(std::move(poly)), xi_requested_(xi_requested), xi_(xi_effective), opt_(opt) {
    for (int i = 0; i < poly_.n(); ++i)
        regions_.push_back({RegionTag{RegionKind::kVertex, i, -1}, 0.0});
    for (int i = 0; i < poly_.n(); ++i)
        for (int e : poly_.edges_at_vertex(i))
            regions_.push_back({RegionTag{RegionKind::kVertexEdge, i, e}, 0.0});
    for (int k = 0; k < poly_.n(); ++k)
        regions_.push_back({RegionTag{RegionKind::kEdge, -1, k}, 0.0});
    regions_.push_back({RegionTag{RegionKind::kInterior, -1, -1}, 0.0});
}

bool NeighborhoodDecomposition::in_vertex_nbhd(int vertex, Vec2 x) const {
    const DistanceSet d = distances(poly_, x);
    if (!(d.r_v[vertex] < xi_)) return false;
    for (int e : poly_.edges_at_vertex(vertex))
        if (!(d.rho(vertex, e) >= xi_)) return false;
    return true;
}

bool NeighborhoodDecomposition::in_vertex_edge_nbhd(int vertex, int edge, Vec2 x) const {
    const DistanceSet d = distances(poly_, x);
    return d.r_v[vertex] < xi_ && d.rho(vertex, edge) < xi_;
}

bool NeighborhoodDecomposition::in_edge_nbhd(int edge, Vec2 x) const {
    const DistanceSet d = distances(poly_, x);
    if (!(d.r_e[edge] < std::pow(xi_, opt_.edge_exponent))) return false;
    for (int v : poly_.vertices_of_edge(edge))
        if (!(d.r_v[v] >= xi_)) return false;
    return true;
}

RegionTag NeighborhoodDecomposition::classify(Vec2 x) const {
    const DistanceSet d = distances(poly_, x);
    const double xi_e = std::pow(xi_, opt_.edge_exponent);
    for (int i = 0; i < poly_.n(); ++i) {
        if (!(d.r_v[i] < xi_)) continue;
        bool all_rho = true;
        for (int e : poly_.edges_at_vertex(i))
            if (!(d.rho(i, e) >= xi_)) all_rho = false;
        if (all_rho) return {RegionKind::kVertex, i, -1};
    }
    for (int i = 0; i < poly_.n(); ++i) {
        if (!(d.r_v[i] < xi_)) continue;
        for (int e : poly_.edges_at_vertex(i))
            if (d.rho(i, e) < xi_) return {RegionKind::kVertexEdge, i, e};
    }
    for (int k = 0; k < poly_.n(); ++k) {
        if (!(d.r_e[k] < xi_e)) continue;
        bool away = true;
        for (int v : poly_.vertices_of_edge(k))
            if (!(d.r_v[v] >= xi_)) away = false;
        if (away) return {RegionKind::kEdge, -1, k};
    }
    return {RegionKind::kInterior, -1, -1};
}

const NeighborhoodDecomposition::Region* NeighborhoodDecomposition::find_region(
    const RegionTag& tag) const {
    for (const Region& r : regions_)
        if (r.tag == tag) return &r;
    return nullptr;
}

void NeighborhoodDecomposition::populate_statistics(int n_samples) {
    const std::vector<Vec2> pts = sample_polygon(poly_, n_samples, opt_.seed);
    std::vector<long> counts(regions_.size(), 0);
    double interior_dist = std::numeric_limits<double>::infinity();
    for (const Vec2& p : pts) {
        const RegionTag tag = classify(p);
        for (size_t r = 0; r < regions_.size(); ++r)
            if (regions_[r].tag == tag) {
                ++counts[r];
                break;
            }
        if (tag.kind == RegionKind::kInterior)
            interior_dist = std::min(interior_dist, poly_.boundary_distance(p));
    }
    const double total_area = poly_.area();
    for (size_t r = 0; r < regions_.size(); ++r)
        regions_[r].area_estimate = total_area * static_cast<double>(counts[r]) / pts.size();
    interior_bdry_dist_ = interior_dist;
}

namespace {

// Sampled disjointness: at most one claiming vertex nbhd, at most one edge
// nbhd, and no two vertex-edge nbhds differing in both components.
bool disjoint_on_samples(const Polygon& poly, double xi, const DecomposeOptions& opt,
                         const std::vector<Vec2>& pts) {
    const double xi_e = std::pow(xi, opt.edge_exponent);
    std::vector<std::pair<int, int>> ve_pairs;
    for (const Vec2& p : pts) {
        const DistanceSet d = distances(poly, p);
        int n_vertex = 0;
        for (int i = 0; i < poly.n(); ++i) {
            if (!(d.r_v[i] < xi)) continue;
            bool all_rho = true;
            for (int e : poly.edges_at_vertex(i))
                if (!(d.rho(i, e) >= xi)) all_rho = false;
            if (all_rho) ++n_vertex;
        }
        if (n_vertex > 1) return false;
        int n_edge = 0;
        for (int k = 0; k < poly.n(); ++k) {
            if (!(d.r_e[k] < xi_e)) continue;
            bool away = true;
            for (int v : poly.vertices_of_edge(k))
                if (!(d.r_v[v] >= xi)) away = false;
            if (away) ++n_edge;
        }
        if (n_edge > 1) return false;
        ve_pairs.clear();
        for (int i = 0; i < poly.n(); ++i) {
            if (!(d.r_v[i] < xi)) continue;
            for (int e : poly.edges_at_vertex(i))
                if (d.rho(i, e) < xi) ve_pairs.emplace_back(i, e);
        }
        for (size_t a = 0; a < ve_pairs.size(); ++a)
            for (size_t b = a + 1; b < ve_pairs.size(); ++b)
                if (ve_pairs[a].first != ve_pairs[b].first &&
                    ve_pairs[a].second != ve_pairs[b].second)
                    return false;
    }
    return true;
}

}  // namespace

NeighborhoodDecomposition decompose(const Polygon& poly, double xi, const DecomposeOptions& opt) {
    if (xi <= 0.0) throw std::invalid_argument("decompose: xi must be positive");
    const std::vector<Vec2> pts = sample_polygon(poly, opt.disjointness_samples, opt.seed);
    double effective = xi;
    int halvings = 0;
    while (!disjoint_on_samples(poly, effective, opt, pts)) {
        effective *= 0.5;
        if (++halvings > opt.max_halvings)
            throw std::invalid_argument("decompose: degenerate polygon, disjointness unreachable");
    }
    return NeighborhoodDecomposition(poly, xi, effective, opt);
}

}  // namespace fraclap
