#ifndef MFKRIG_KERNEL_HPP
#define MFKRIG_KERNEL_HPP

#include <Eigen/Dense>

#include "mfkrig/types.hpp"

namespace mfkrig {

/// Covariance hyperparameters of one Gaussian-random-field layer:
/// sigma^2(x, x') = tau2 * r(x, x'; theta) with the anisotropic
/// squared-exponential correlation r(a, b; theta) = exp(-sum_i theta_i (a_i - b_i)^2).
struct KernelParams {
    VectorXd theta;   ///< inverse-squared lengthscales, one per dimension, > 0
    double tau2 = 1.0;    ///< process variance, > 0
    double nugget = 1e-8; ///< diagonal regularization, >= 0 (not part of the field)

    /// Throws InvalidArgument unless theta_i > 0, tau2 > 0, nugget >= 0.
    void validate() const;
};

/// r(a, b; theta). Symmetric, in (0, 1], equal to 1 iff a == b.
double kernel_eval(const Eigen::Ref<const VectorXd>& a,
                   const Eigen::Ref<const VectorXd>& b,
                   const KernelParams& params);

/// n x n correlation matrix R_ij = r(x^i, x^j; theta) with params.nugget
/// added to the diagonal. Rows of points are the x^i.
MatrixXd correlation_matrix(const Eigen::Ref<const MatrixXd>& points,
                            const KernelParams& params);

/// n x m cross-correlation block r(x^i, q^j; theta) between a training set
/// and a query set (no nugget; the query points are off-diagonal).
MatrixXd cross_correlation(const Eigen::Ref<const MatrixXd>& points,
                           const Eigen::Ref<const MatrixXd>& queries,
                           const Eigen::Ref<const VectorXd>& theta);

}  // namespace mfkrig

#endif  // MFKRIG_KERNEL_HPP
