#ifndef MFKRIG_RARE_EVENT_HPP
#define MFKRIG_RARE_EVENT_HPP

#include <cstdint>
#include <functional>
#include <string>

#include "mfkrig/multifidelity.hpp"

namespace mfkrig {

/// Samplable environment distribution f(x); independent uniform per
/// coordinate over the support box. Identical seed => identical samples.
class EnvironmentDistribution {
public:
    static EnvironmentDistribution uniform(Bounds support, std::string description = "");

    /// n i.i.d. draws, one per row. Deterministic in (n, seed).
    MatrixXd sample(Index n, std::uint64_t seed) const;

    const Bounds& support() const { return support_; }
    const std::string& description() const { return description_; }

private:
    EnvironmentDistribution(Bounds support, std::string description);
    Bounds support_;
    std::string description_;
};

/// Threshold and direction of the safety-critical event.
enum class EventDirection { kExceed, kFallBelow };

struct EventSpec {
    double gamma = 0.0;
    EventDirection direction = EventDirection::kExceed;

    /// gamma may be +-infinity but not NaN.
    void validate() const;
};

std::string to_string(EventDirection d);
EventDirection direction_from_string(const std::string& s);

struct ProbabilityEstimate {
    double value = 0.0;       ///< in [0, 1]
    std::int64_t n_samples = 0;
    double std_error = 0.0;   ///< Monte Carlo standard error of the outer average
    std::uint64_t seed = 0;
};

/// Probability of the safety-critical event under f(x), using the fused
/// surrogate at top fidelity: the average over n_mc draws of the Gaussian
/// tail probability P(y_T(x) >= gamma) (mirrored for fall-below). Where the
/// posterior is a point mass (sigma = 0) the indicator of the mean is used,
/// ties counting as an event.
ProbabilityEstimate event_probability(const MultiFidelityModel& model,
                                      const EnvironmentDistribution& env,
                                      const EventSpec& spec,
                                      Index n_mc, std::uint64_t seed);

/// Crude Monte Carlo over the true performance function; the validation
/// oracle for event_probability. Reports the binomial standard error.
ProbabilityEstimate crude_mc_oracle(const std::function<double(const VectorXd&)>& true_fn,
                                    const EnvironmentDistribution& env,
                                    const EventSpec& spec,
                                    Index n, std::uint64_t seed);

namespace detail {
/// Event probability given a fixed sample set (rows = draws); shared by the
/// estimator and the information-gain machinery (common random numbers).
ProbabilityEstimate event_probability_on(const MultiFidelityModel& model,
                                         const Eigen::Ref<const MatrixXd>& samples,
                                         const EventSpec& spec);
}  // namespace detail

}  // namespace mfkrig

#endif  // MFKRIG_RARE_EVENT_HPP
