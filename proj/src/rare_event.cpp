#include "mfkrig/rare_event.hpp"

#include <cmath>

#include "mfkrig/normal.hpp"
#include "mfkrig/rng.hpp"

namespace mfkrig {

EnvironmentDistribution::EnvironmentDistribution(Bounds support, std::string description)
    : support_(std::move(support)), description_(std::move(description)) {}

EnvironmentDistribution EnvironmentDistribution::uniform(Bounds support,
                                                         std::string description) {
    return EnvironmentDistribution(std::move(support), std::move(description));
}

MatrixXd EnvironmentDistribution::sample(Index n, std::uint64_t seed) const {
    if (n < 1) {
        throw InvalidArgument("EnvironmentDistribution::sample: n must be >= 1");
    }
    Rng rng(derive_stream(seed, "mc"));
    MatrixXd out(n, support_.dim());
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < support_.dim(); ++j) {
            out(i, j) = rng.uniform(support_.lower()[j], support_.upper()[j]);
        }
    }
    return out;
}

void EventSpec::validate() const {
    if (std::isnan(gamma)) {
        throw InvalidArgument("EventSpec: gamma must not be NaN");
    }
}

std::string to_string(EventDirection d) {
    return d == EventDirection::kExceed ? "exceed" : "fall-below";
}

EventDirection direction_from_string(const std::string& s) {
    if (s == "exceed") return EventDirection::kExceed;
    if (s == "fall-below") return EventDirection::kFallBelow;
    throw InvalidArgument("unknown event direction '" + s +
                          "' (expected 'exceed' or 'fall-below')");
}

namespace detail {

// P(y >= gamma) for y ~ N(mu, var), with the point-mass indicator at var = 0
// (ties count as an event); mirrored for fall-below.
inline double event_term(double mu, double var, const EventSpec& spec) {
    if (spec.direction == EventDirection::kExceed) {
        if (var <= 0.0) return mu >= spec.gamma ? 1.0 : 0.0;
        return normal_tail((spec.gamma - mu) / std::sqrt(var));
    }
    if (var <= 0.0) return mu <= spec.gamma ? 1.0 : 0.0;
    return normal_cdf((spec.gamma - mu) / std::sqrt(var));
}

ProbabilityEstimate event_probability_on(const MultiFidelityModel& model,
                                         const Eigen::Ref<const MatrixXd>& samples,
                                         const EventSpec& spec) {
    spec.validate();
    const Index n = samples.rows();
    VectorXd mean, var;
    model.predict(samples, model.top_level(), &mean, &var);
    double sum = 0.0, sumsq = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double q = event_term(mean[i], var[i], spec);
        sum += q;
        sumsq += q * q;
    }
    ProbabilityEstimate est;
    est.value = sum / static_cast<double>(n);
    est.n_samples = n;
    if (n > 1) {
        const double variance =
            std::max(0.0, (sumsq - sum * sum / static_cast<double>(n)) /
                              static_cast<double>(n - 1));
        est.std_error = std::sqrt(variance / static_cast<double>(n));
    }
    return est;
}

}  // namespace detail

ProbabilityEstimate event_probability(const MultiFidelityModel& model,
                                      const EnvironmentDistribution& env,
                                      const EventSpec& spec,
                                      Index n_mc, std::uint64_t seed) {
    if (n_mc < 1) {
        throw InvalidArgument("event_probability: n_mc must be >= 1");
    }
    ProbabilityEstimate est =
        detail::event_probability_on(model, env.sample(n_mc, seed), spec);
    est.seed = seed;
    return est;
}

ProbabilityEstimate crude_mc_oracle(const std::function<double(const VectorXd&)>& true_fn,
                                    const EnvironmentDistribution& env,
                                    const EventSpec& spec,
                                    Index n, std::uint64_t seed) {
    if (n < 1) {
        throw InvalidArgument("crude_mc_oracle: n must be >= 1");
    }
    spec.validate();
    const MatrixXd samples = env.sample(n, seed);
    std::int64_t hits = 0;
    for (Index i = 0; i < n; ++i) {
        const double g = true_fn(samples.row(i).transpose());
        const bool event = spec.direction == EventDirection::kExceed ? g >= spec.gamma
                                                                     : g <= spec.gamma;
        hits += event ? 1 : 0;
    }
    ProbabilityEstimate est;
    est.value = static_cast<double>(hits) / static_cast<double>(n);
    est.n_samples = n;
    est.std_error = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(n));
    est.seed = seed;
    return est;
}

}  // namespace mfkrig
