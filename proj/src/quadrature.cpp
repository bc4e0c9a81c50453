#include "fraclap/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fraclap {

namespace {

// Golub-Welsch for the Jacobi weight (1-x)^0 (1+x)^b on (-1,1).
// Recurrence coefficients follow Gautschi's r_jacobi.
void jacobi_reference(double b, int n, std::vector<double>& nodes, std::vector<double>& weights) {
    const double a = 0.0;
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
    diag[0] = (b - a) / (a + b + 2.0);
    for (int k = 1; k < n; ++k) {
        const double q = 2.0 * k + a + b;
        diag[k] = (b * b - a * a) / (q * (q + 2.0));
        const double num = 4.0 * k * (k + a) * (k + b) * (k + a + b);
        const double den = q * q * (q + 1.0) * (q - 1.0);
        sub[k - 1] = std::sqrt(num / den);
    }
    const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                                std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw std::runtime_error("gauss_jacobi: eigensolve failed");

    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        nodes[i] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        weights[i] = mu0 * v0 * v0;
    }
}

// Reference rule on (0,1) with weight x^alpha.
QuadratureRule reference01(double alpha_exp, int n) {
    std::vector<double> t, w;
    jacobi_reference(alpha_exp, n, t, w);
    QuadratureRule r;
    r.weight_exponent = alpha_exp;
    r.a = 0.0;
    r.b = 1.0;
    r.nodes.resize(n);
    r.weights.resize(n);
    // x = (1+t)/2; weight x^alpha dx = 2^{-alpha-1} (1+t)^alpha dt
    const double scale = std::pow(2.0, -alpha_exp - 1.0);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = 0.5 * (1.0 + t[i]);
        r.weights[i] = scale * w[i];
    }
    return r;
}

std::map<std::pair<double, int>, QuadratureRule>& cache() {
    static std::map<std::pair<double, int>, QuadratureRule> c;
    return c;
}
std::mutex& cache_mutex() {
    static std::mutex m;
    return m;
}

std::string key_filename(double alpha_exp, int n) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "gj_%.17g_%d.txt", alpha_exp, n);
    return buf;
}

}  // namespace

QuadratureRule map_rule_to(const QuadratureRule& ref01, double a, double b) {
    QuadratureRule r;
    r.weight_exponent = ref01.weight_exponent;
    r.a = a;
    r.b = b;
    const double len = b - a;
    const double jac = std::pow(len, ref01.weight_exponent + 1.0);
    r.nodes.resize(ref01.nodes.size());
    r.weights.resize(ref01.weights.size());
    for (size_t i = 0; i < ref01.nodes.size(); ++i) {
        r.nodes[i] = a + len * ref01.nodes[i];
        r.weights[i] = jac * ref01.weights[i];
    }
    return r;
}

QuadratureRule gauss_jacobi(double alpha_exp, int n, double a, double b) {
    if (!(alpha_exp > -1.0)) throw std::domain_error("gauss_jacobi: weight exponent must be > -1");
    if (n < 1) throw std::invalid_argument("gauss_jacobi: need at least one node");
    if (!(b > a)) throw std::invalid_argument("gauss_jacobi: empty interval");
    return map_rule_to(cached_gauss_jacobi(alpha_exp, n), a, b);
}

QuadratureRule gauss_legendre(int n, double a, double b) { return gauss_jacobi(0.0, n, a, b); }

const QuadratureRule& cached_gauss_jacobi(double alpha_exp, int n) {
    std::lock_guard<std::mutex> lock(cache_mutex());
    auto key = std::make_pair(alpha_exp, n);
    auto it = cache().find(key);
    if (it == cache().end()) it = cache().emplace(key, reference01(alpha_exp, n)).first;
    return it->second;
}

void save_rule_to_disk(const std::string& dir, double alpha_exp, int n) {
    const QuadratureRule& r = cached_gauss_jacobi(alpha_exp, n);
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / key_filename(alpha_exp, n));
    out.precision(17);
    out << alpha_exp << " " << n << "\n";
    for (int i = 0; i < r.size(); ++i) out << r.nodes[i] << " " << r.weights[i] << "\n";
}

bool load_rule_from_disk(const std::string& dir, double alpha_exp, int n, QuadratureRule& out) {
    std::ifstream in(std::filesystem::path(dir) / key_filename(alpha_exp, n));
    if (!in) return false;
    double ae;
    int m;
    if (!(in >> ae >> m) || m != n) return false;
    out.nodes.resize(n);
    out.weights.resize(n);
    out.weight_exponent = alpha_exp;
    out.a = 0.0;
    out.b = 1.0;
    for (int i = 0; i < n; ++i)
        if (!(in >> out.nodes[i] >> out.weights[i])) return false;
    return true;
}

}  // namespace fraclap
