#include "mfkrig/doe.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "mfkrig/normal.hpp"

namespace mfkrig {

CostModel CostModel::per_level(std::vector<double> table) {
    for (double c : table) {
        if (!(c > 0.0)) {
            throw InvalidArgument("CostModel: every cost must be positive");
        }
    }
    return CostModel{[table = std::move(table)](const VectorXd&, int t) {
        if (t < 1 || t > static_cast<int>(table.size())) {
            throw InvalidArgument("CostModel: level " + std::to_string(t) +
                                  " has no cost entry");
        }
        return table[static_cast<std::size_t>(t) - 1];
    }};
}

CostModel CostModel::default_table(int top_level) {
    std::vector<double> table(static_cast<std::size_t>(top_level));
    double c = 1.0;
    for (auto& entry : table) {
        entry = c;
        c *= 10.0;
    }
    return per_level(std::move(table));
}

double CostModel::at(const VectorXd& x, int t) const {
    const double c = cost(x, t);
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw InvalidArgument("CostModel: cost must be positive and finite");
    }
    return c;
}

namespace detail {

namespace {

// P(y >= gamma) (or the mirror) for y ~ N(mu, var); point mass -> indicator.
inline double event_term(double mu, double var, const EventSpec& spec) {
    if (spec.direction == EventDirection::kExceed) {
        if (var <= 0.0) return mu >= spec.gamma ? 1.0 : 0.0;
        return normal_tail((spec.gamma - mu) / std::sqrt(var));
    }
    if (var <= 0.0) return mu <= spec.gamma ? 1.0 : 0.0;
    return normal_cdf((spec.gamma - mu) / std::sqrt(var));
}

}  // namespace

double ig_on_samples(const MultiFidelityModel& model, const EventSpec& spec,
                     const Eigen::Ref<const VectorXd>& x, int t, int n_y,
                     const Eigen::Ref<const MatrixXd>& samples, double p_base) {
    if (t < 1 || t > model.top_level()) {
        throw InvalidArgument("information_gain: level " + std::to_string(t) +
                              " out of range 1.." + std::to_string(model.top_level()));
    }
    if (n_y < 1) {
        throw InvalidArgument("information_gain: n_y must be >= 1");
    }
    spec.validate();

    // Distribution of the hypothetical observation y ~ y_t(x).
    const double draw_var = model.var(x, t);
    double tau2_sum = 0.0;
    for (int i = 1; i <= t; ++i) tau2_sum += model.layer(i).params().tau2;
    if (draw_var <= 1e-10 * tau2_sum) {
        // Point-mass posterior (x effectively observed at fidelity t, e.g. an
        // exactly-interpolated design point): a hypothetical run adds nothing.
        return 0.0;
    }
    const double draw_sd = std::sqrt(draw_var);

    // The draw converts to a layer-t difference observation
    //   delta_j = y_j - mean(x, t-1) = layer-t mean at x + draw_sd * z_j.
    const KrigingModel& lt = model.layer(t);
    const double layer_mean_x = lt.posterior_mean(x);
    VectorXd delta(n_y);
    for (int j = 0; j < n_y; ++j) {
        delta[j] = layer_mean_x +
                   draw_sd * normal_quantile((j + 0.5) / static_cast<double>(n_y));
    }

    // Extend layer t's Cholesky factor by the candidate row:
    //   L_aug = [[L, 0], [w', piv]],  w = L^{-1} c,  piv^2 = (1 + nugget) - |w|^2.
    const Index m = lt.training().size();
    const VectorXd xn = lt.bounds().normalize_point(x);
    const MatrixXd c =
        cross_correlation(lt.normalized_points(), xn.transpose(), lt.params().theta);
    const auto lower = lt.chol().triangularView<Eigen::Lower>();
    const VectorXd w = lower.solve(c.col(0));
    const double piv =
        std::sqrt(std::max(1.0 + lt.params().nugget - w.squaredNorm(), 1e-12));

    // Solve R_aug z = [top; last] through the extended factor.
    auto aug_solve = [&](const VectorXd& top, double last) {
        VectorXd f = lower.solve(top);
        const double f_last = (last - w.dot(f)) / piv;
        const double y_last = f_last / piv;
        VectorXd y = f - w * y_last;
        lower.transpose().solveInPlace(y);
        return std::make_pair(std::move(y), y_last);
    };
    // alpha_aug(delta) = u + delta * v:  residuals [Y_t - beta; delta - beta].
    const VectorXd residual = lt.training().observations().array() - lt.beta();
    const auto [u_top, u_last] = aug_solve(residual, -lt.beta());
    const auto [v_top, v_last] = aug_solve(VectorXd::Zero(m), 1.0);

    VectorXd sums = VectorXd::Zero(n_y);
    const Index n = samples.rows();
    constexpr Index kChunk = 4096;
    VectorXd rest_mean, rest_var, layer_m, layer_v;
    for (Index start = 0; start < n; start += kChunk) {
        const Index len = std::min(kChunk, n - start);
        const auto block = samples.middleRows(start, len);

        rest_mean.setZero(len);
        rest_var.setZero(len);
        for (int i = 1; i <= model.top_level(); ++i) {
            if (i == t) continue;
            model.layer(i).predict(block, &layer_m, &layer_v);
            rest_mean += layer_m;
            rest_var += layer_v;
        }

        const MatrixXd qn = lt.bounds().normalize(block);
        const MatrixXd rx = cross_correlation(lt.normalized_points(), qn,
                                              lt.params().theta);
        const MatrixXd kx =
            cross_correlation(xn.transpose(), qn, lt.params().theta);  // 1 x len
        const MatrixXd w1 = lower.solve(rx);
        const VectorXd w2 =
            (kx.row(0).transpose() - w1.transpose() * w).array() / piv;
        const VectorXd aug_base = (rx.transpose() * u_top).array() +
                                  kx.row(0).transpose().array() * u_last + lt.beta();
        const VectorXd aug_slope = (rx.transpose() * v_top).array() +
                                   kx.row(0).transpose().array() * v_last;
        const VectorXd aug_var =
            (lt.params().tau2 *
             (1.0 - w1.colwise().squaredNorm().transpose().array() -
              w2.array().square())
                 .max(0.0))
                .matrix();

        const VectorXd tot_var = rest_var + aug_var;
        const VectorXd base_mean = rest_mean + aug_base;
        for (int j = 0; j < n_y; ++j) {
            const double dj = delta[j];
            double acc = 0.0;
            for (Index i = 0; i < len; ++i) {
                acc += event_term(base_mean[i] + dj * aug_slope[i], tot_var[i], spec);
            }
            sums[j] += acc;
        }
    }

    double ig = 0.0;
    for (int j = 0; j < n_y; ++j) {
        const double p_new = sums[j] / static_cast<double>(n);
        ig += (p_base - p_new) * (p_base - p_new);
    }
    return ig / static_cast<double>(n_y);
}

}  // namespace detail

double information_gain(const MultiFidelityModel& model,
                        const EnvironmentDistribution& env,
                        const EventSpec& spec,
                        const Eigen::Ref<const VectorXd>& x, int t,
                        int n_y, Index n_mc, std::uint64_t seed) {
    if (n_mc < 1) {
        throw InvalidArgument("information_gain: n_mc must be >= 1");
    }
    if (!env.support().contains(x, 1e-9)) {
        throw InvalidArgument("information_gain: x outside the design-space bounds");
    }
    const MatrixXd samples = env.sample(n_mc, seed);
    const double p_base = detail::event_probability_on(model, samples, spec).value;
    return detail::ig_on_samples(model, spec, x, t, n_y, samples, p_base);
}

namespace {

// Candidate ordering for ties: lowest level first, then lexicographic point.
bool tie_before(const DesignChoice& a, const DesignChoice& b) {
    if (a.t != b.t) return a.t < b.t;
    for (Index i = 0; i < a.x.size(); ++i) {
        if (a.x[i] != b.x[i]) return a.x[i] < b.x[i];
    }
    return false;
}

}  // namespace

SelectionResult select_next(const MultiFidelityModel& model,
                            const EnvironmentDistribution& env,
                            const EventSpec& spec,
                            const CandidateSet& candidates,
                            const CostModel& cost,
                            int n_y, Index n_mc, std::uint64_t seed,
                            int n_threads) {
    if (candidates.points.rows() == 0 || candidates.levels.empty()) {
        throw InvalidArgument("select_next: empty candidate set");
    }
    if (n_mc < 1) {
        throw InvalidArgument("select_next: n_mc must be >= 1");
    }
    for (Index i = 0; i < candidates.points.rows(); ++i) {
        if (!env.support().contains(candidates.points.row(i).transpose(), 1e-9)) {
            throw InvalidArgument("select_next: candidate point " + std::to_string(i) +
                                  " outside the design-space bounds");
        }
    }
    std::vector<int> levels = candidates.levels;
    std::sort(levels.begin(), levels.end());

    // One shared sample set: every IG sees the same environment draws as the
    // baseline estimate, so scores measure the update effect, not MC noise.
    const MatrixXd samples = env.sample(n_mc, seed);
    const double p_base = detail::event_probability_on(model, samples, spec).value;

    const Index n_points = candidates.points.rows();
    std::vector<DesignChoice> table(levels.size() * static_cast<std::size_t>(n_points));
    auto score_one = [&](std::size_t flat) {
        const int t = levels[flat / static_cast<std::size_t>(n_points)];
        const Index row = static_cast<Index>(flat % static_cast<std::size_t>(n_points));
        DesignChoice entry;
        entry.x = candidates.points.row(row).transpose();
        entry.t = t;
        entry.ig = detail::ig_on_samples(model, spec, entry.x, t, n_y, samples, p_base);
        entry.cost = cost.at(entry.x, t);
        entry.score = entry.ig / entry.cost;
        table[flat] = std::move(entry);
    };

    const std::size_t total = table.size();
    const int workers = std::max(1, std::min<int>(n_threads, static_cast<int>(total)));
    if (workers == 1) {
        for (std::size_t i = 0; i < total; ++i) score_one(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < total; i += workers) score_one(i);
            });
        }
        for (auto& th : pool) th.join();
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < total; ++i) {
        if (table[i].score > table[best].score ||
            (table[i].score == table[best].score && tie_before(table[i], table[best]))) {
            best = i;
        }
    }
    return SelectionResult{table[best], std::move(table)};
}

MultiFidelityDataset augment_dataset(const MultiFidelityDataset& data,
                                     const DesignChoice& choice,
                                     const std::vector<double>& responses) {
    if (choice.t < 1 || choice.t > data.top_level()) {
        throw InvalidArgument("augment_dataset: level " + std::to_string(choice.t) +
                              " out of range");
    }
    if (choice.x.size() != data.dim()) {
        throw InvalidArgument("augment_dataset: point dimension mismatch");
    }
    if (static_cast<int>(responses.size()) != choice.t) {
        throw NestingViolation(
            "augment_dataset: a response is required for every level 1.." +
            std::to_string(choice.t) + " at the chosen point (got " +
            std::to_string(responses.size()) + ")");
    }
    std::vector<std::pair<FidelityLevel, Dataset>> levels;
    levels.reserve(static_cast<std::size_t>(data.top_level()));
    for (int t = 1; t <= data.top_level(); ++t) {
        if (t <= choice.t) {
            try {
                levels.emplace_back(data.level(t),
                                    data.dataset(t).appended(
                                        choice.x, responses[static_cast<std::size_t>(t) - 1]));
            } catch (const DuplicatePoint&) {
                throw DuplicatePoint("augment_dataset: chosen point already observed at level " +
                                     std::to_string(t));
            }
        } else {
            levels.emplace_back(data.level(t), data.dataset(t));
        }
    }
    return MultiFidelityDataset(std::move(levels));
}

}  // namespace mfkrig
