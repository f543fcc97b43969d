#ifndef MFKRIG_KRIGING_HPP
#define MFKRIG_KRIGING_HPP

#include <Eigen/Dense>
#include <vector>

#include "mfkrig/kernel.hpp"
#include "mfkrig/types.hpp"

namespace mfkrig {

/// Fitted single-level Kriging model: the posterior Gaussian random field
/// given (X, Y), a constant prior mean beta and covariance tau2 * r(.,.;theta).
///
/// Immutable once constructed; concurrent predictions are safe. The Cholesky
/// factor of R + nugget*I and alpha = (R + nugget*I)^{-1} (Y - beta) are
/// precomputed over the normalized training inputs.
class KrigingModel {
public:
    /// Builds the posterior for the given hyperparameters. The configured
    /// nugget may be escalated (x10 up to 1e-4) if the Cholesky factorization
    /// fails; throws NumericalFailure beyond that. The nugget actually used
    /// is recorded in params().nugget.
    KrigingModel(Dataset training, KernelParams params, double beta, Bounds bounds);

    /// Posterior mean E[y(x) | X, Y] = beta + r(x)' (R + nugget*I)^{-1} (Y - beta).
    double posterior_mean(const Eigen::Ref<const VectorXd>& x) const;

    /// Posterior variance tau2 * (1 - r(x)' (R + nugget*I)^{-1} r(x)),
    /// clamped at 0 from below.
    double posterior_var(const Eigen::Ref<const VectorXd>& x) const;

    /// Batch prediction; either output may be null. Rows of points are queries.
    void predict(const Eigen::Ref<const MatrixXd>& points,
                 VectorXd* mean, VectorXd* var) const;

    double beta() const { return beta_; }
    const KernelParams& params() const { return params_; }
    const Dataset& training() const { return training_; }
    const Bounds& bounds() const { return bounds_; }
    Index dim() const { return training_.dim(); }

    /// Lower-triangular L with L L' = R + nugget*I (normalized inputs).
    const MatrixXd& chol() const { return chol_; }
    const VectorXd& alpha() const { return alpha_; }
    const MatrixXd& normalized_points() const { return norm_points_; }

private:
    Dataset training_;
    KernelParams params_;
    double beta_;
    Bounds bounds_;
    MatrixXd norm_points_;
    MatrixXd chol_;
    VectorXd alpha_;
};

/// Log likelihood l(tau2, theta) = -1/2 (n log 2pi + log|Sigma| + (Y-beta)' Sigma^{-1} (Y-beta))
/// with Sigma = tau2 * (R + nugget*I). Coordinates are normalized by `bounds`
/// when given, otherwise used raw. Throws NumericalFailure if Sigma is not
/// positive definite at the given nugget (no escalation here).
double log_likelihood(const KernelParams& params, double beta, const Dataset& data,
                      const std::optional<Bounds>& bounds = std::nullopt);

/// Per-restart record of the hyperparameter search.
struct FitDiagnostics {
    struct Start {
        VectorXd theta0;   ///< Latin-hypercube initial theta
        double ll0;        ///< profiled log likelihood at theta0 (-inf if infeasible)
        VectorXd theta;    ///< refined theta
        double ll;         ///< profiled log likelihood at the refined point
    };
    std::vector<Start> starts;
    int best_index = -1;
};

/// Maximum likelihood fit. beta is the sample mean of Y (exactly); tau2 is
/// profiled out in closed form tau2(theta) = (Y-beta)' (R+nugget*I)^{-1} (Y-beta) / n;
/// theta maximizes the profiled likelihood via Nelder-Mead refinement of a
/// fixed-seed Latin-hypercube multistart over log(theta). Restarts may run in
/// parallel (config.n_threads); the winner is reduced deterministically
/// (best likelihood, ties broken by lowest start index).
///
/// Throws FitFailure if every restart is numerically infeasible.
KrigingModel fit_mle(const Dataset& data, const FitConfig& config,
                     FitDiagnostics* diagnostics = nullptr);

}  // namespace mfkrig

#endif  // MFKRIG_KRIGING_HPP
