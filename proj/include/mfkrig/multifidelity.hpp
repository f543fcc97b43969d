#ifndef MFKRIG_MULTIFIDELITY_HPP
#define MFKRIG_MULTIFIDELITY_HPP

#include <string>
#include <utility>
#include <vector>

#include "mfkrig/kriging.hpp"

namespace mfkrig {

/// Fidelity rank of a test source; 1 is the lowest, T the highest
/// (e.g. historical < simulation < AR track < on-road).
struct FidelityLevel {
    int t = 1;
    std::string label;
};

/// Ordered stack of per-fidelity datasets, lowest fidelity first.
/// Levels must form the contiguous range 1..T and share one dimension;
/// the nested-design requirement X_T subset-of ... subset-of X_1 is checked
/// separately by validate_nesting.
class MultiFidelityDataset {
public:
    explicit MultiFidelityDataset(std::vector<std::pair<FidelityLevel, Dataset>> levels);

    int top_level() const { return static_cast<int>(levels_.size()); }
    Index dim() const { return levels_.front().second.dim(); }
    const FidelityLevel& level(int t) const { return at(t).first; }
    const Dataset& dataset(int t) const { return at(t).second; }

    /// Bounding box over all levels' points.
    Bounds bounding_box() const;

private:
    const std::pair<FidelityLevel, Dataset>& at(int t) const;
    std::vector<std::pair<FidelityLevel, Dataset>> levels_;
};

/// For each level t >= 2, maps row i of X_t to the row of X_{t-1} holding the
/// same point. map[t - 2][i] is that parent row.
struct NestingMap {
    std::vector<std::vector<Index>> parent_row;
};

/// Confirms X_t is contained in X_{t-1} for every t >= 2, with point
/// membership tested at `tol` in coordinates normalized by the data's
/// bounding box. Throws NestingViolation naming the offending level and
/// point. Returns the alignment used to build difference data.
NestingMap validate_nesting(const MultiFidelityDataset& data, double tol = kDuplicateTol);

/// Difference dataset (X_t, D_t) with D_t(x) = Y_t(x) - Y_{t-1}(x), each
/// lower-level value taken from the aligned observation, not a prediction.
Dataset build_difference_data(const MultiFidelityDataset& data, int t,
                              const NestingMap& map);

/// Co-Kriging stack y_t(x) = sum_{i<=t} d_i(x) of independently fitted
/// layers: layer 1 models (X_1, Y_1), layer t >= 2 models the difference
/// data (X_t, D_t). Mean and variance at fidelity t are the sums of the
/// first t layers' posterior statistics. Immutable; concurrent queries safe.
class MultiFidelityModel {
public:
    MultiFidelityModel(std::vector<KrigingModel> layers, std::vector<std::string> labels);

    int top_level() const { return static_cast<int>(layers_.size()); }
    Index dim() const { return layers_.front().dim(); }
    const KrigingModel& layer(int t) const;
    const std::string& label(int t) const;

    /// Sum of the first t layers' posterior means.
    double mean(const Eigen::Ref<const VectorXd>& x, int t) const;
    /// Sum of the first t layers' posterior variances (each >= 0).
    double var(const Eigen::Ref<const VectorXd>& x, int t) const;

    /// Batch queries at fidelity t; either output may be null.
    void predict(const Eigen::Ref<const MatrixXd>& points, int t,
                 VectorXd* mean, VectorXd* var) const;

private:
    void check_level(int t) const;
    std::vector<KrigingModel> layers_;
    std::vector<std::string> labels_;
};

/// Validates nesting, builds the difference datasets and fits every layer
/// with the same config (per-layer multistart substreams). Fit failures are
/// rethrown naming the layer.
MultiFidelityModel fit_multifidelity(const MultiFidelityDataset& data,
                                     const FitConfig& config);

}  // namespace mfkrig

#endif  // MFKRIG_MULTIFIDELITY_HPP
