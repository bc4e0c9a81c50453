#include "fraclap/mesh1d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "fraclap/quadrature.hpp"

namespace fraclap {

double Mesh1D::h_min() const {
    double m = h(0);
    for (int e = 1; e < n_elements(); ++e) m = std::min(m, h(e));
    return m;
}

double Mesh1D::h_max() const {
    double m = h(0);
    for (int e = 1; e < n_elements(); ++e) m = std::max(m, h(e));
    return m;
}

int Mesh1D::find_element(double x) const {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    int e = static_cast<int>(it - nodes.begin()) - 1;
    return std::clamp(e, 0, n_elements() - 1);
}

Mesh1D uniform_mesh(int n, double a, double b) {
    if (n < 1 || !(b > a)) throw std::invalid_argument("uniform_mesh: bad arguments");
    Mesh1D m;
    m.nodes.resize(n + 1);
    for (int k = 0; k <= n; ++k) m.nodes[k] = a + (b - a) * k / n;
    return m;
}

Mesh1D graded_mesh(int n, double beta, double a, double b) {
    if (n < 2) throw std::invalid_argument("graded_mesh: need n >= 2");
    if (beta < 1.0) throw std::invalid_argument("graded_mesh: grading exponent must be >= 1");
    if (!(b > a)) throw std::invalid_argument("graded_mesh: empty interval");
    Mesh1D m;
    m.nodes.resize(n + 1);
    const double half = 0.5 * (b - a);
    for (int k = 0; k <= n; ++k) {
        if (2 * k <= n) {
            m.nodes[k] = a + half * std::pow(2.0 * k / n, beta);
        } else {
            m.nodes[k] = a + b - (a + half * std::pow(2.0 * (n - k) / n, beta));
        }
    }
    return m;
}

Mesh1D geometric_mesh_towards_zero(double Y, double first_fraction, double ratio) {
    if (!(Y > 0.0) || !(first_fraction > 0.0 && first_fraction < 1.0) || !(ratio > 1.0))
        throw std::invalid_argument("geometric_mesh_towards_zero: bad arguments");
    std::vector<double> up;
    up.push_back(0.0);
    double h = first_fraction * Y;
    double acc = 0.0;
    while (acc + h < Y * (1.0 - 1e-12)) {
        acc += h;
        up.push_back(acc);
        h *= ratio;
    }
    up.push_back(Y);
    Mesh1D m;
    m.nodes = std::move(up);
    return m;
}

LagrangeShape::LagrangeShape(int degree) : degree_(degree) {
    if (degree < 1 || degree > 4) throw std::invalid_argument("LagrangeShape: degree 1..4");
    const int n = degree + 1;
    Eigen::MatrixXd V(n, n);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / degree;
        for (int j = 0; j < n; ++j) V(i, j) = std::pow(t, j);
    }
    coeffs_ = V.fullPivLu().solve(Eigen::MatrixXd::Identity(n, n));
}

double LagrangeShape::eval(int i, double t, int order) const {
    const int n = degree_ + 1;
    if (order > degree_) return 0.0;
    double acc = 0.0;
    for (int j = n - 1; j >= order; --j) {
        double fall = 1.0;
        for (int k = 0; k < order; ++k) fall *= static_cast<double>(j - k);
        acc = acc * t + fall * coeffs_(j, i);
    }
    return acc;
}

const LagrangeShape& LagrangeShape::get(int degree) {
    static std::mutex mu;
    static std::map<int, LagrangeShape> shapes;
    std::lock_guard<std::mutex> lock(mu);
    auto it = shapes.find(degree);
    if (it == shapes.end()) it = shapes.emplace(degree, LagrangeShape(degree)).first;
    return it->second;
}

double FemSpace1D::node_position(int g) const {
    const int e = std::min(g / degree, mesh.n_elements() - 1);
    const int iloc = g - e * degree;
    return mesh.nodes[e] + mesh.h(e) * iloc / degree;
}

std::vector<double> FemSpace1D::all_node_positions() const {
    std::vector<double> xs(n_nodes());
    for (int g = 0; g < n_nodes(); ++g) xs[g] = node_position(g);
    return xs;
}

double FemSpace1D::eval(const Eigen::VectorXd& coeffs, double x, int order) const {
    if (x < mesh.a() || x > mesh.b()) return 0.0;
    const int e = mesh.find_element(x);
    const double h = mesh.h(e);
    const double t = (x - mesh.nodes[e]) / h;
    const LagrangeShape& shape = LagrangeShape::get(degree);
    double acc = 0.0;
    for (int i = 0; i <= degree; ++i)
        acc += coeffs[global_index(e, i)] * shape.eval(i, t, order);
    return acc / std::pow(h, order);
}

namespace {

Eigen::SparseMatrix<double> assemble_1d(const FemSpace1D& space, int da, int db, double alpha,
                                        bool weighted) {
    const int q = space.degree;
    const LagrangeShape& shape = LagrangeShape::get(q);
    const int n = space.n_nodes();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(space.mesh.n_elements() * (q + 1) * (q + 1));
    const int nq = q + 6;
    for (int e = 0; e < space.mesh.n_elements(); ++e) {
        const double x0 = space.mesh.nodes[e];
        const double h = space.mesh.h(e);
        QuadratureRule rule;
        if (weighted && e == 0) {
            // Element touching the weight singularity: Gauss-Jacobi is exact.
            rule = gauss_jacobi(alpha, nq, x0, x0 + h);
        } else {
            rule = gauss_legendre(nq, x0, x0 + h);
        }
        for (int i = 0; i <= q; ++i) {
            for (int j = 0; j <= q; ++j) {
                double acc = 0.0;
                for (int k = 0; k < rule.size(); ++k) {
                    const double x = rule.nodes[k];
                    const double t = (x - x0) / h;
                    double w = rule.weights[k];
                    if (weighted && e != 0) w *= std::pow(x - space.mesh.a(), alpha);
                    acc += w * shape.eval(i, t, da) * shape.eval(j, t, db);
                }
                acc /= std::pow(h, da + db);
                trips.emplace_back(space.global_index(e, i), space.global_index(e, j), acc);
            }
        }
    }
    Eigen::SparseMatrix<double> M(n, n);
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

}  // namespace

Eigen::SparseMatrix<double> mass_matrix(const FemSpace1D& space) {
    return assemble_1d(space, 0, 0, 0.0, false);
}

Eigen::SparseMatrix<double> stiffness_matrix(const FemSpace1D& space) {
    return assemble_1d(space, 1, 1, 0.0, false);
}

Eigen::SparseMatrix<double> weighted_mass_matrix(const FemSpace1D& space, double alpha) {
    return assemble_1d(space, 0, 0, alpha, true);
}

Eigen::SparseMatrix<double> weighted_stiffness_matrix(const FemSpace1D& space, double alpha) {
    return assemble_1d(space, 1, 1, alpha, true);
}

Eigen::VectorXd load_vector(const FemSpace1D& space, const std::function<double(double)>& f,
                            int quad_points) {
    const int q = space.degree;
    const LagrangeShape& shape = LagrangeShape::get(q);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(space.n_nodes());
    for (int e = 0; e < space.mesh.n_elements(); ++e) {
        const double x0 = space.mesh.nodes[e];
        const double h = space.mesh.h(e);
        const QuadratureRule rule = gauss_legendre(quad_points, x0, x0 + h);
        for (int k = 0; k < rule.size(); ++k) {
            const double x = rule.nodes[k];
            const double t = (x - x0) / h;
            const double fw = f(x) * rule.weights[k];
            for (int i = 0; i <= q; ++i)
                b[space.global_index(e, i)] += fw * shape.eval(i, t, 0);
        }
    }
    return b;
}

Eigen::VectorXd interpolate(const FemSpace1D& space, const std::function<double(double)>& f) {
    Eigen::VectorXd c(space.n_nodes());
    for (int g = 0; g < space.n_nodes(); ++g) c[g] = f(space.node_position(g));
    return c;
}

namespace {

class FemField final : public Field1D {
public:
    FemField(std::shared_ptr<const FemSpace1D> space, Eigen::VectorXd coeffs)
        : space_(std::move(space)), coeffs_(std::move(coeffs)) {}

    double derivative(double x, int order) const override {
        if (order > space_->degree) return 0.0;
        return space_->eval(coeffs_, x, order);
    }
    int max_order() const override { return space_->degree; }
    double resolution() const override { return space_->mesh.h_min(); }

private:
    std::shared_ptr<const FemSpace1D> space_;
    Eigen::VectorXd coeffs_;
};

}  // namespace

std::shared_ptr<Field1D> make_fem_field(std::shared_ptr<const FemSpace1D> space,
                                        Eigen::VectorXd coeffs) {
    return std::make_shared<FemField>(std::move(space), std::move(coeffs));
}

}  // namespace fraclap
