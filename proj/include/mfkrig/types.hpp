#ifndef MFKRIG_TYPES_HPP
#define MFKRIG_TYPES_HPP

#include <Eigen/Dense>
#include <optional>

#include "mfkrig/errors.hpp"

namespace mfkrig {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Distance below which two design points count as the same point.
inline constexpr double kDuplicateTol = 1e-10;

/// Axis-aligned design-space box, used to affinely map every coordinate to
/// [0, 1] before kernel evaluation so that lengthscales are comparable across
/// heterogeneous units. Degenerate coordinates (zero width) map to 0.
class Bounds {
public:
    Bounds() = default;
    Bounds(VectorXd lower, VectorXd upper);

    /// Bounding box of a point set (rows are points).
    static Bounds of(const Eigen::Ref<const MatrixXd>& points);

    Index dim() const { return lower_.size(); }
    const VectorXd& lower() const { return lower_; }
    const VectorXd& upper() const { return upper_; }

    VectorXd normalize_point(const Eigen::Ref<const VectorXd>& x) const;
    MatrixXd normalize(const Eigen::Ref<const MatrixXd>& points) const;

    bool contains(const Eigen::Ref<const VectorXd>& x, double slack = 0.0) const;

private:
    VectorXd lower_, upper_;
};

/// Design points paired with scalar observations at one fidelity level.
/// Rows of points() are the x^i; observations() holds the matching y^i.
class Dataset {
public:
    /// Validates: n >= 1, matching lengths, finite coordinates, and no two
    /// points within kDuplicateTol of each other (throws DuplicatePoint).
    Dataset(MatrixXd points, VectorXd observations);

    Index size() const { return points_.rows(); }
    Index dim() const { return points_.cols(); }
    const MatrixXd& points() const { return points_; }
    const VectorXd& observations() const { return observations_; }

    /// Row index of a point within tolerance of x, or -1.
    Index find(const Eigen::Ref<const VectorXd>& x, double tol = kDuplicateTol) const;

    /// New dataset with one (point, observation) appended.
    Dataset appended(const Eigen::Ref<const VectorXd>& x, double y) const;

private:
    MatrixXd points_;
    VectorXd observations_;
};

/// Hyperparameter-search settings shared by all fitting entry points.
struct FitConfig {
    double nugget = 1e-8;       ///< initial diagonal regularization
    int n_starts = 10;          ///< Latin-hypercube multistarts in log-theta
    int max_iter = 200;         ///< Nelder-Mead iterations per start
    std::uint64_t seed = 0;     ///< drives the multistart layout
    double theta_min = 1e-3;    ///< theta search box, normalized coordinates
    double theta_max = 1e4;
    int n_threads = 1;          ///< parallel restarts; result is thread-count independent
    std::optional<Bounds> bounds;  ///< normalization box; default: data bounding box
};

}  // namespace mfkrig

#endif  // MFKRIG_TYPES_HPP
