#include "mfkrig/types.hpp"

#include <cmath>
#include <string>

namespace mfkrig {

Bounds::Bounds(VectorXd lower, VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size() || lower_.size() == 0) {
        throw InvalidArgument("Bounds: lower/upper must be nonempty and equal length");
    }
    for (Index i = 0; i < lower_.size(); ++i) {
        if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || upper_[i] < lower_[i]) {
            throw InvalidArgument("Bounds: coordinate " + std::to_string(i) +
                                  " has invalid range");
        }
    }
}

Bounds Bounds::of(const Eigen::Ref<const MatrixXd>& points) {
    if (points.rows() == 0 || points.cols() == 0) {
        throw InvalidArgument("Bounds::of: empty point set");
    }
    return Bounds(points.colwise().minCoeff(), points.colwise().maxCoeff());
}

VectorXd Bounds::normalize_point(const Eigen::Ref<const VectorXd>& x) const {
    if (x.size() != dim()) {
        throw InvalidArgument("Bounds::normalize_point: dimension mismatch");
    }
    VectorXd out(dim());
    for (Index i = 0; i < dim(); ++i) {
        const double w = upper_[i] - lower_[i];
        out[i] = w > 0.0 ? (x[i] - lower_[i]) / w : 0.0;
    }
    return out;
}

MatrixXd Bounds::normalize(const Eigen::Ref<const MatrixXd>& points) const {
    if (points.cols() != dim()) {
        throw InvalidArgument("Bounds::normalize: dimension mismatch");
    }
    MatrixXd out(points.rows(), points.cols());
    for (Index i = 0; i < dim(); ++i) {
        const double w = upper_[i] - lower_[i];
        if (w > 0.0) {
            out.col(i) = (points.col(i).array() - lower_[i]) / w;
        } else {
            out.col(i).setZero();
        }
    }
    return out;
}

bool Bounds::contains(const Eigen::Ref<const VectorXd>& x, double slack) const {
    if (x.size() != dim()) return false;
    for (Index i = 0; i < dim(); ++i) {
        if (x[i] < lower_[i] - slack || x[i] > upper_[i] + slack) return false;
    }
    return true;
}

Dataset::Dataset(MatrixXd points, VectorXd observations)
    : points_(std::move(points)), observations_(std::move(observations)) {
    if (points_.rows() == 0 || points_.cols() == 0) {
        throw InvalidArgument("Dataset: needs at least one point of dimension >= 1");
    }
    if (points_.rows() != observations_.size()) {
        throw InvalidArgument("Dataset: |points| != |observations|");
    }
    if (!points_.allFinite() || !observations_.allFinite()) {
        throw InvalidArgument("Dataset: non-finite coordinate or observation");
    }
    for (Index i = 0; i < points_.rows(); ++i) {
        for (Index j = i + 1; j < points_.rows(); ++j) {
            if ((points_.row(i) - points_.row(j)).norm() <= kDuplicateTol) {
                throw DuplicatePoint("Dataset: points " + std::to_string(i) + " and " +
                                     std::to_string(j) + " coincide within tolerance");
            }
        }
    }
}

Index Dataset::find(const Eigen::Ref<const VectorXd>& x, double tol) const {
    for (Index i = 0; i < points_.rows(); ++i) {
        if ((points_.row(i).transpose() - x).norm() <= tol) return i;
    }
    return -1;
}

Dataset Dataset::appended(const Eigen::Ref<const VectorXd>& x, double y) const {
    MatrixXd pts(points_.rows() + 1, points_.cols());
    pts.topRows(points_.rows()) = points_;
    pts.row(points_.rows()) = x.transpose();
    VectorXd obs(observations_.size() + 1);
    obs.head(observations_.size()) = observations_;
    obs[observations_.size()] = y;
    return Dataset(std::move(pts), std::move(obs));
}

}  // namespace mfkrig
