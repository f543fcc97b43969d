#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <random>

#include "mfkrig/kernel.hpp"

using namespace mfkrig;

namespace {

KernelParams params1d(double theta, double nugget = 0.0) {
    return KernelParams{VectorXd::Constant(1, theta), 1.0, nugget};
}

}  // namespace

TEST_CASE("kernel is 1 at zero distance") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int rep = 0; rep < 20; ++rep) {
        VectorXd a(3);
        a << u(gen), u(gen), u(gen);
        KernelParams p{VectorXd::Constant(3, std::exp(u(gen))), 1.0, 0.0};
        REQUIRE(kernel_eval(a, a, p) == 1.0);
    }
}

TEST_CASE("kernel closed form in one dimension") {
    VectorXd a = VectorXd::Zero(1), b = VectorXd::Ones(1);
    REQUIRE_THAT(kernel_eval(a, b, params1d(1.0)),
                 Catch::Matchers::WithinAbs(0.36787944117144233, 1e-15));
}

TEST_CASE("kernel is symmetric and in (0, 1]") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int rep = 0; rep < 100; ++rep) {
        VectorXd a(2), b(2);
        a << u(gen), u(gen);
        b << u(gen), u(gen);
        KernelParams p{(VectorXd(2) << 0.5, 2.0).finished(), 1.0, 0.0};
        const double kab = kernel_eval(a, b, p);
        REQUIRE(kab == kernel_eval(b, a, p));
        REQUIRE(kab > 0.0);
        REQUIRE(kab <= 1.0);
    }
}

TEST_CASE("kernel rejects dimension mismatch") {
    VectorXd a = VectorXd::Zero(2), b = VectorXd::Zero(3);
    REQUIRE_THROWS_AS(kernel_eval(a, b, params1d(1.0)), InvalidArgument);
    REQUIRE_THROWS_AS(kernel_eval(a, a, params1d(1.0)), InvalidArgument);
}

TEST_CASE("invalid kernel parameters are rejected") {
    REQUIRE_THROWS_AS(params1d(-1.0).validate(), InvalidArgument);
    REQUIRE_THROWS_AS(params1d(0.0).validate(), InvalidArgument);
    KernelParams bad_tau{VectorXd::Ones(1), 0.0, 0.0};
    REQUIRE_THROWS_AS(bad_tau.validate(), InvalidArgument);
    KernelParams bad_nugget{VectorXd::Ones(1), 1.0, -1e-9};
    REQUIRE_THROWS_AS(bad_nugget.validate(), InvalidArgument);
}

TEST_CASE("correlation matrix of a single point") {
    MatrixXd pts(1, 1);
    pts << 0.4;
    const MatrixXd r = correlation_matrix(pts, params1d(2.0, 1e-8));
    REQUIRE(r.rows() == 1);
    REQUIRE(r(0, 0) == 1.0 + 1e-8);
}

TEST_CASE("correlation matrix is exactly symmetric with positive spectrum") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MatrixXd pts(5, 2);
    for (Index i = 0; i < pts.size(); ++i) pts(i / 2, i % 2) = u(gen);
    KernelParams p{(VectorXd(2) << 3.0, 0.7).finished(), 1.0, 1e-8};
    const MatrixXd r = correlation_matrix(pts, p);

    REQUIRE((r.array() == r.transpose().array()).all());
    REQUIRE((r.diagonal().array() == 1.0 + 1e-8).all());

    // Dense eigensolve oracle: every eigenvalue positive after the nugget.
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(r);
    REQUIRE(eig.info() == Eigen::Success);
    REQUIRE(eig.eigenvalues().minCoeff() > 0.0);

    // Off-diagonal entries agree with the scalar kernel.
    for (Index i = 0; i < pts.rows(); ++i) {
        for (Index j = 0; j < pts.rows(); ++j) {
            if (i == j) continue;
            REQUIRE_THAT(r(i, j),
                         Catch::Matchers::WithinAbs(
                             kernel_eval(pts.row(i).transpose(), pts.row(j).transpose(), p),
                             1e-14));
        }
    }
}

TEST_CASE("cross correlation matches the scalar kernel") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    MatrixXd pts(4, 3), q(6, 3);
    for (Index i = 0; i < pts.size(); ++i) pts(i % 4, i / 4) = u(gen);
    for (Index i = 0; i < q.size(); ++i) q(i % 6, i / 6) = u(gen);
    const VectorXd theta = (VectorXd(3) << 1.0, 0.2, 4.0).finished();
    const MatrixXd rx = cross_correlation(pts, q, theta);
    REQUIRE(rx.rows() == 4);
    REQUIRE(rx.cols() == 6);
    KernelParams p{theta, 1.0, 0.0};
    for (Index i = 0; i < 4; ++i) {
        for (Index j = 0; j < 6; ++j) {
            REQUIRE_THAT(rx(i, j),
                         Catch::Matchers::WithinAbs(
                             kernel_eval(pts.row(i).transpose(), q.row(j).transpose(), p),
                             1e-14));
        }
    }
}
