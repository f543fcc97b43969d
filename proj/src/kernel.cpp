#include "mfkrig/kernel.hpp"

#include <cmath>
#include <string>

namespace mfkrig {

void KernelParams::validate() const {
    if (theta.size() == 0 || (theta.array() <= 0.0).any() || !theta.allFinite()) {
        throw InvalidArgument("KernelParams: theta must be positive and finite");
    }
    if (!(tau2 > 0.0) || !std::isfinite(tau2)) {
        throw InvalidArgument("KernelParams: tau2 must be positive");
    }
    if (!(nugget >= 0.0) || !std::isfinite(nugget)) {
        throw InvalidArgument("KernelParams: nugget must be nonnegative");
    }
}

double kernel_eval(const Eigen::Ref<const VectorXd>& a,
                   const Eigen::Ref<const VectorXd>& b,
                   const KernelParams& params) {
    if (a.size() != b.size() || a.size() != params.theta.size()) {
        throw InvalidArgument("kernel_eval: dimension mismatch (a: " +
                              std::to_string(a.size()) + ", b: " + std::to_string(b.size()) +
                              ", theta: " + std::to_string(params.theta.size()) + ")");
    }
    const double q = (params.theta.array() * (a - b).array().square()).sum();
    return std::exp(-q);
}

MatrixXd correlation_matrix(const Eigen::Ref<const MatrixXd>& points,
                            const KernelParams& params) {
    if (points.rows() < 1) {
        throw InvalidArgument("correlation_matrix: empty point set");
    }
    if (points.cols() != params.theta.size()) {
        throw InvalidArgument("correlation_matrix: dimension mismatch");
    }
    const Index n = points.rows();
    // Weighted squared distances via the expansion |u - v|^2 = |u|^2 + |v|^2 - 2 u.v
    // on sqrt(theta)-scaled coordinates; one GEMM instead of n^2 row traversals.
    const MatrixXd scaled = points.array().rowwise() *
                            params.theta.array().sqrt().transpose();
    const VectorXd sq = scaled.rowwise().squaredNorm();
    MatrixXd r = -2.0 * scaled * scaled.transpose();
    r.colwise() += sq;
    r.rowwise() += sq.transpose();
    r = (-r.array().max(0.0)).exp();
    r.diagonal().setConstant(1.0 + params.nugget);
    // GEMM rounding can break exact symmetry at the 1e-17 level; predictions
    // and factorizations assume R == R'.
    r = ((r + r.transpose()) * 0.5).eval();
    return r;
}

MatrixXd cross_correlation(const Eigen::Ref<const MatrixXd>& points,
                           const Eigen::Ref<const MatrixXd>& queries,
                           const Eigen::Ref<const VectorXd>& theta) {
    if (points.cols() != theta.size() || queries.cols() != theta.size()) {
        throw InvalidArgument("cross_correlation: dimension mismatch");
    }
    const Eigen::ArrayXd w = theta.array().sqrt();
    const MatrixXd a = points.array().rowwise() * w.transpose();
    const MatrixXd b = queries.array().rowwise() * w.transpose();
    MatrixXd r = -2.0 * a * b.transpose();
    r.colwise() += a.rowwise().squaredNorm();
    r.rowwise() += b.rowwise().squaredNorm().transpose();
    return (-r.array().max(0.0)).exp();
}

}  // namespace mfkrig
