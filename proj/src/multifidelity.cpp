#include "mfkrig/multifidelity.hpp"

#include <sstream>

#include "mfkrig/rng.hpp"

namespace mfkrig {

MultiFidelityDataset::MultiFidelityDataset(
    std::vector<std::pair<FidelityLevel, Dataset>> levels)
    : levels_(std::move(levels)) {
    if (levels_.empty()) {
        throw InvalidArgument("MultiFidelityDataset: at least one level required");
    }
    const Index d = levels_.front().second.dim();
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (levels_[i].first.t != static_cast<int>(i) + 1) {
            throw InvalidArgument(
                "MultiFidelityDataset: levels must form the contiguous range 1..T "
                "in ascending order (got t = " + std::to_string(levels_[i].first.t) +
                " at position " + std::to_string(i + 1) + ")");
        }
        if (levels_[i].second.dim() != d) {
            throw InvalidArgument("MultiFidelityDataset: levels disagree on dimension");
        }
    }
}

const std::pair<FidelityLevel, Dataset>& MultiFidelityDataset::at(int t) const {
    if (t < 1 || t > top_level()) {
        throw InvalidArgument("MultiFidelityDataset: level " + std::to_string(t) +
                              " out of range 1.." + std::to_string(top_level()));
    }
    return levels_[static_cast<std::size_t>(t) - 1];
}

Bounds MultiFidelityDataset::bounding_box() const {
    VectorXd lo = levels_.front().second.points().colwise().minCoeff();
    VectorXd hi = levels_.front().second.points().colwise().maxCoeff();
    for (const auto& [level, data] : levels_) {
        lo = lo.cwiseMin(data.points().colwise().minCoeff().transpose());
        hi = hi.cwiseMax(data.points().colwise().maxCoeff().transpose());
    }
    return Bounds(lo, hi);
}

NestingMap validate_nesting(const MultiFidelityDataset& data, double tol) {
    NestingMap map;
    const Bounds box = data.bounding_box();
    for (int t = 2; t <= data.top_level(); ++t) {
        const MatrixXd upper = box.normalize(data.dataset(t).points());
        const MatrixXd lower = box.normalize(data.dataset(t - 1).points());
        std::vector<Index> rows(upper.rows(), -1);
        for (Index i = 0; i < upper.rows(); ++i) {
            for (Index j = 0; j < lower.rows(); ++j) {
                if ((upper.row(i) - lower.row(j)).norm() <= tol) {
                    rows[i] = j;
                    break;
                }
            }
            if (rows[i] < 0) {
                std::ostringstream msg;
                msg << "nesting violation: level " << t << " point " << i << " ("
                    << data.dataset(t).points().row(i) << ") is not in level "
                    << t - 1;
                throw NestingViolation(msg.str());
            }
        }
        map.parent_row.push_back(std::move(rows));
    }
    return map;
}

Dataset build_difference_data(const MultiFidelityDataset& data, int t,
                              const NestingMap& map) {
    if (t < 2 || t > data.top_level()) {
        throw InvalidArgument("build_difference_data: level must be in 2..T");
    }
    const Dataset& upper = data.dataset(t);
    const Dataset& lower = data.dataset(t - 1);
    const auto& rows = map.parent_row.at(static_cast<std::size_t>(t) - 2);
    VectorXd diff(upper.size());
    for (Index i = 0; i < upper.size(); ++i) {
        diff[i] = upper.observations()[i] - lower.observations()[rows[i]];
    }
    return Dataset(upper.points(), std::move(diff));
}

MultiFidelityModel::MultiFidelityModel(std::vector<KrigingModel> layers,
                                       std::vector<std::string> labels)
    : layers_(std::move(layers)), labels_(std::move(labels)) {
    if (layers_.empty()) {
        throw InvalidArgument("MultiFidelityModel: at least one layer required");
    }
    if (labels_.size() != layers_.size()) {
        throw InvalidArgument("MultiFidelityModel: one label per layer required");
    }
    for (const auto& layer : layers_) {
        if (layer.dim() != layers_.front().dim()) {
            throw InvalidArgument("MultiFidelityModel: layers disagree on dimension");
        }
    }
}

void MultiFidelityModel::check_level(int t) const {
    if (t < 1 || t > top_level()) {
        throw InvalidArgument("MultiFidelityModel: level " + std::to_string(t) +
                              " out of range 1.." + std::to_string(top_level()));
    }
}

const KrigingModel& MultiFidelityModel::layer(int t) const {
    check_level(t);
    return layers_[static_cast<std::size_t>(t) - 1];
}

const std::string& MultiFidelityModel::label(int t) const {
    check_level(t);
    return labels_[static_cast<std::size_t>(t) - 1];
}

double MultiFidelityModel::mean(const Eigen::Ref<const VectorXd>& x, int t) const {
    check_level(t);
    double sum = 0.0;
    for (int i = 1; i <= t; ++i) sum += layers_[i - 1].posterior_mean(x);
    return sum;
}

double MultiFidelityModel::var(const Eigen::Ref<const VectorXd>& x, int t) const {
    check_level(t);
    double sum = 0.0;
    for (int i = 1; i <= t; ++i) sum += layers_[i - 1].posterior_var(x);
    return sum;
}

void MultiFidelityModel::predict(const Eigen::Ref<const MatrixXd>& points, int t,
                                 VectorXd* mean, VectorXd* var) const {
    check_level(t);
    if (mean) mean->setZero(points.rows());
    if (var) var->setZero(points.rows());
    VectorXd m, v;
    for (int i = 1; i <= t; ++i) {
        layers_[i - 1].predict(points, mean ? &m : nullptr, var ? &v : nullptr);
        if (mean) *mean += m;
        if (var) *var += v;
    }
}

MultiFidelityModel fit_multifidelity(const MultiFidelityDataset& data,
                                     const FitConfig& config) {
    const NestingMap map = validate_nesting(data);
    FitConfig layer_config = config;
    if (!layer_config.bounds) layer_config.bounds = data.bounding_box();

    std::vector<KrigingModel> layers;
    std::vector<std::string> labels;
    layers.reserve(data.top_level());
    for (int t = 1; t <= data.top_level(); ++t) {
        // Layer 1 keeps the root seed so a one-level stack reproduces a plain
        // Kriging fit exactly; difference layers get their own substreams.
        layer_config.seed =
            t == 1 ? config.seed : derive_stream(config.seed, "fit-layer", t);
        const Dataset layer_data =
            t == 1 ? data.dataset(1) : build_difference_data(data, t, map);
        try {
            layers.push_back(fit_mle(layer_data, layer_config));
        } catch (const NumericalFailure& err) {
            throw FitFailure("layer " + std::to_string(t) + " (" +
                             data.level(t).label + "): " + err.what());
        }
        labels.push_back(data.level(t).label);
    }
    return MultiFidelityModel(std::move(layers), std::move(labels));
}

}  // namespace mfkrig
