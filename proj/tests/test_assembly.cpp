#include <Eigen/Eigenvalues>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fraclap/assembly1d.hpp"
#include "fraclap/mesh1d.hpp"
#include "fraclap/special.hpp"

using namespace fraclap;

TEST_CASE("matrix is exactly symmetric") {
    const FractionalParams p = FractionalParams::make(0.3, 1);
    FemSpace1D space{graded_mesh(8, 2.0, -1.0, 1.0), 2};
    const Eigen::MatrixXd A = assemble_fractional_stiffness(space, p);
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two-element hat entry matches the Fourier closed form at s=1/2") {
    // For the hat on nodes {-1,0,1}: |phi|^2_{H^{1/2}(R)} = 8 ln 2 (via
    // phi_hat = 2(1-cos xi)/xi^2 and int_0^inf sin^4 u / u^3 du = ln 2), so
    // a(phi,phi) = C(1,1/2)/2 * 8 ln 2 = 4 ln 2 / pi.
    const FractionalParams p = FractionalParams::make(0.5, 1);
    FemSpace1D space{uniform_mesh(2, -1.0, 1.0), 1};
    const Eigen::MatrixXd A = assemble_fractional_stiffness(space, p);
    REQUIRE(A.rows() == 1);
    const double want = 4.0 * std::log(2.0) / M_PI;
    CHECK(std::abs(A(0, 0) - want) < 1e-8);
}

TEST_CASE("entries agree with the same transform at 10x quadrature resolution") {
    for (double s : {0.25, 0.5, 0.75}) {
        const FractionalParams p = FractionalParams::make(s, 1);
        FemSpace1D space{uniform_mesh(6, -1.0, 1.0), 2};
        AssemblyOptions coarse;
        AssemblyOptions fine;
        fine.n_sing = 50;
        fine.n_reg = 40;
        const Eigen::MatrixXd A = assemble_fractional_stiffness(space, p, coarse);
        const Eigen::MatrixXd B = assemble_fractional_stiffness(space, p, fine);
        CHECK((A - B).cwiseAbs().maxCoeff() < 1e-8 * B.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("smallest eigenvalue stays positive under refinement") {
    const FractionalParams p = FractionalParams::make(0.5, 1);
    for (int n : {8, 32, 128}) {
        FemSpace1D space{uniform_mesh(n, -1.0, 1.0), 1};
        const Eigen::MatrixXd A = assemble_fractional_stiffness(space, p);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues()(0) > 0.0);
    }
}

TEST_CASE("off-diagonal decay follows the kernel power") {
    const double s = 0.3;
    const FractionalParams p = FractionalParams::make(s, 1);
    const int n = 128;
    FemSpace1D space{uniform_mesh(n, -1.0, 1.0), 1};
    const Eigen::MatrixXd A = assemble_fractional_stiffness(space, p);
    const int i = n / 2 - 1;  // center row
    // log-log fit of |A(i, i+k)| against k
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int k = 4; k <= 40; k *= 2) {
        const double lx = std::log(static_cast<double>(k));
        const double ly = std::log(std::abs(A(i, i + k)));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    CHECK(slope < -(1.0 + 2.0 * s) + 0.2);
    CHECK(slope > -(1.0 + 2.0 * s) - 0.2);
    // and the decay is monotone
    for (int k = 2; k < 40; ++k) CHECK(std::abs(A(i, i + k + 1)) < std::abs(A(i, i + k)));
}

TEST_CASE("parallel assembly matches single thread for a fixed partition") {
    const FractionalParams p = FractionalParams::make(0.4, 1);
    FemSpace1D space{uniform_mesh(16, 0.0, 1.0), 2};
    AssemblyOptions serial;
    AssemblyOptions par;
    par.n_threads = 4;
    const Eigen::MatrixXd A = assemble_fractional_stiffness(space, p, serial);
    const Eigen::MatrixXd B = assemble_fractional_stiffness(space, p, par);
    CHECK((A - B).cwiseAbs().maxCoeff() < 1e-12 * A.cwiseAbs().maxCoeff());
}

TEST_CASE("dual norm through the Riesz map is monotone in the data") {
    const FractionalParams p = FractionalParams::make(0.5, 1);
    FractionalForm form(FemSpace1D{uniform_mesh(32, -1.0, 1.0), 1}, p);
    Eigen::VectorXd b = Eigen::VectorXd::Ones(form.n_free());
    const double n1 = form.dual_norm(b);
    const double n2 = form.dual_norm(2.0 * b);
    CHECK(n1 > 0.0);
    CHECK(n2 == doctest::Approx(2.0 * n1).epsilon(1e-12));
}
