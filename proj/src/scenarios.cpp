#include "mfkrig/scenarios.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "mfkrig/rng.hpp"

namespace mfkrig {

namespace bench1d {

Bounds domain() {
    return Bounds(VectorXd::Constant(1, kLo), VectorXd::Constant(1, kHi));
}

double eval(int level, double x) {
    if (x < kLo || x > kHi) {
        throw InvalidArgument("bench1d::eval: x = " + std::to_string(x) +
                              " outside [-5, 5]");
    }
    switch (level) {
        case 1: return 0.7 - (x / 6.0) * (x / 6.0);
        case 2: return std::exp(-(x / 3.0) * (x / 3.0)) - 0.1;
        case 3: return std::exp(-(x / 2.0) * (x / 2.0));
        default:
            throw InvalidArgument("bench1d::eval: level must be 1, 2 or 3");
    }
}

namespace {

Dataset sampled(int level, const std::vector<double>& xs) {
    MatrixXd pts(static_cast<Index>(xs.size()), 1);
    VectorXd obs(static_cast<Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        pts(static_cast<Index>(i), 0) = xs[i];
        obs[static_cast<Index>(i)] = eval(level, xs[i]);
    }
    return Dataset(std::move(pts), std::move(obs));
}

}  // namespace

MultiFidelityDataset design() {
    std::vector<double> x1;
    for (int i = 0; i <= 20; ++i) x1.push_back(-5.0 + 0.5 * i);
    const std::vector<double> x2 = {-5.0, -3.5, -2.0, -0.5, 1.0, 2.5, 4.0};
    const std::vector<double> x3 = {-5.0, -2.0, 1.0, 4.0};
    std::vector<std::pair<FidelityLevel, Dataset>> levels;
    levels.emplace_back(FidelityLevel{1, "low"}, sampled(1, x1));
    levels.emplace_back(FidelityLevel{2, "mid"}, sampled(2, x2));
    levels.emplace_back(FidelityLevel{3, "high"}, sampled(3, x3));
    return MultiFidelityDataset(std::move(levels));
}

MatrixXd grid(Index n) {
    if (n < 2) {
        throw InvalidArgument("bench1d::grid: n must be >= 2");
    }
    MatrixXd g(n, 1);
    for (Index i = 0; i < n; ++i) {
        g(i, 0) = kLo + (kHi - kLo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return g;
}

}  // namespace bench1d

namespace lane_change {

Bounds design_bounds() {
    VectorXd lo(3), hi(3);
    lo << 5.0, 0.0, 0.1;
    hi << 35.0, 30.0, 1.0;
    return Bounds(lo, hi);
}

double min_range(const Eigen::Ref<const VectorXd>& x, const VehicleParams& params) {
    if (x.size() != 3) {
        throw InvalidArgument("lane_change::min_range: expected (v, Rdot, 1/R)");
    }
    if (!design_bounds().contains(x, 1e-9)) {
        throw InvalidArgument("lane_change::min_range: input outside the design bounds");
    }
    const double rdot = x[1];
    const double range = 1.0 / x[2];
    // Effective deceleration fades with the AV's own speed (v + Rdot) and
    // carries a controller resonance over the frontal-vehicle speed band.
    const double fade = 1.0 + (x[0] + rdot) / params.speed_fade;
    const double resonance =
        1.0 + params.resonance_amp * std::sin(2.0 * M_PI * x[0] / params.resonance_len);
    const double decel_eff = params.decel / (fade * resonance);
    const double closure = rdot * params.reaction_delay +
                           rdot * rdot / (2.0 * decel_eff);
    return std::max(0.0, range - closure);
}

MatrixXd mesh_grid() {
    MatrixXd grid(2560, 3);
    Index row = 0;
    for (int iv = 0; iv < 16; ++iv) {
        const double v = 5.0 + 2.0 * iv;
        for (int ir = 0; ir < 16; ++ir) {
            const double rdot = 2.0 * ir;
            for (int ik = 0; ik < 10; ++ik) {
                const double rinv = 0.1 + 0.1 * ik;
                grid.row(row++) << v, rdot, rinv;
            }
        }
    }
    return grid;
}

Split build_split(const SplitSpec& spec) {
    const MatrixXd grid = mesh_grid();
    const Index total = grid.rows();
    if (spec.n_low < 1 || spec.n_high < 1 || spec.n_high > spec.n_low ||
        spec.n_low >= total) {
        throw InvalidArgument("lane_change::build_split: need 1 <= n_high <= n_low < " +
                              std::to_string(total));
    }
    VectorXd truth(total);
    for (Index i = 0; i < total; ++i) {
        truth[i] = min_range(grid.row(i).transpose(), spec.vehicle);
    }

    std::vector<Index> order(static_cast<std::size_t>(total));
    std::iota(order.begin(), order.end(), Index{0});
    Rng split_rng(derive_stream(spec.seed, "split"));
    split_rng.shuffle(order);

    // D_1 = first n_low of the shuffle, D_2 = first n_high of those (so
    // D_2 is a subset of D_1 and nesting holds by construction).
    MatrixXd low_pts(spec.n_low, 3), high_pts(spec.n_high, 3);
    VectorXd low_obs(spec.n_low), high_obs(spec.n_high);
    Rng noise_rng(derive_stream(spec.seed, "noise"));
    for (Index i = 0; i < spec.n_low; ++i) {
        const Index k = order[static_cast<std::size_t>(i)];
        low_pts.row(i) = grid.row(k);
        low_obs[i] = truth[k] + noise_rng.uniform(-spec.noise_amplitude,
                                                  spec.noise_amplitude);
        if (i < spec.n_high) {
            high_pts.row(i) = grid.row(k);
            high_obs[i] = truth[k];
        }
    }

    const Index n_test = total - spec.n_low;
    MatrixXd test_pts(n_test, 3);
    VectorXd test_vals(n_test);
    for (Index i = 0; i < n_test; ++i) {
        const Index k = order[static_cast<std::size_t>(spec.n_low + i)];
        test_pts.row(i) = grid.row(k);
        test_vals[i] = truth[k];
    }

    std::vector<std::pair<FidelityLevel, Dataset>> levels;
    levels.emplace_back(FidelityLevel{1, "historical"},
                        Dataset(std::move(low_pts), std::move(low_obs)));
    levels.emplace_back(FidelityLevel{2, "simulation"},
                        Dataset(std::move(high_pts), std::move(high_obs)));
    return Split{MultiFidelityDataset(std::move(levels)), std::move(test_pts),
                 std::move(test_vals)};
}

}  // namespace lane_change

double mse_on(const std::function<double(const VectorXd&)>& predictor,
              const Eigen::Ref<const MatrixXd>& points,
              const Eigen::Ref<const VectorXd>& truth) {
    if (points.rows() == 0) {
        throw InvalidArgument("mse_on: empty test set");
    }
    if (points.rows() != truth.size()) {
        throw InvalidArgument("mse_on: |points| != |truth|");
    }
    double sum = 0.0;
    for (Index i = 0; i < points.rows(); ++i) {
        const double err = predictor(points.row(i).transpose()) - truth[i];
        sum += err * err;
    }
    return sum / static_cast<double>(points.rows());
}

}  // namespace mfkrig
