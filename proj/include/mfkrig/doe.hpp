#ifndef MFKRIG_DOE_HPP
#define MFKRIG_DOE_HPP

#include <functional>
#include <vector>

#include "mfkrig/rare_event.hpp"

namespace mfkrig {

/// Cost C(x, t) of running one experiment at x with fidelity t. Must be
/// positive everywhere. The default table c_t = 10^{t-1} expresses the
/// qualitative ordering cheap-simulation vs expensive on-road and is fully
/// configurable.
struct CostModel {
    std::function<double(const VectorXd&, int)> cost;

    static CostModel per_level(std::vector<double> table);
    static CostModel default_table(int top_level);

    double at(const VectorXd& x, int t) const;
};

/// Finite search set for the next experiment: points x levels.
struct CandidateSet {
    MatrixXd points;          ///< rows are candidate points
    std::vector<int> levels;  ///< subset of 1..T
};

/// A (point, fidelity) recommendation with its score = ig / cost.
struct DesignChoice {
    VectorXd x;
    int t = 1;
    double ig = 0.0;
    double cost = 1.0;
    double score = 0.0;
};

struct SelectionResult {
    DesignChoice best;
    std::vector<DesignChoice> table;  ///< every scored candidate, for audit
};

/// Expected squared change of the event-probability estimate caused by one
/// hypothetical observation of y ~ y_t(x):
///
///   IG(x, t) = E_y [ (p_n - p_{n+1}(x, y))^2 ]
///
/// approximated with n_y quantile-stratified draws of y from the fidelity-t
/// posterior. Each draw is converted to a layer-t difference observation
/// y - mean(x, t-1), appended to layer t with hyperparameters held fixed,
/// and p_{n+1} is recomputed on the same n_mc environment samples used for
/// p_n (common random numbers).
double information_gain(const MultiFidelityModel& model,
                        const EnvironmentDistribution& env,
                        const EventSpec& spec,
                        const Eigen::Ref<const VectorXd>& x, int t,
                        int n_y, Index n_mc, std::uint64_t seed);

/// Scores every candidate (x, t) by IG/C on one shared environment sample
/// set and returns the argmax. Deterministic tie-breaking: lowest level
/// first, then lexicographic point order. Candidates may be scored in
/// parallel (n_threads); the selection is thread-count independent.
SelectionResult select_next(const MultiFidelityModel& model,
                            const EnvironmentDistribution& env,
                            const EventSpec& spec,
                            const CandidateSet& candidates,
                            const CostModel& cost,
                            int n_y, Index n_mc, std::uint64_t seed,
                            int n_threads = 1);

/// Appends choice.x to levels 1..choice.t with the supplied per-level
/// responses (the caller runs the cheaper experiments too, so the nested
/// design is preserved). responses[k] is the level-(k+1) observation.
/// Throws NestingViolation if a lower-level response is missing and
/// DuplicatePoint if x already exists at some level.
MultiFidelityDataset augment_dataset(const MultiFidelityDataset& data,
                                     const DesignChoice& choice,
                                     const std::vector<double>& responses);

namespace detail {
/// information_gain on a caller-supplied sample set with the baseline
/// p_n already computed on that set.
double ig_on_samples(const MultiFidelityModel& model, const EventSpec& spec,
                     const Eigen::Ref<const VectorXd>& x, int t, int n_y,
                     const Eigen::Ref<const MatrixXd>& samples, double p_base);
}  // namespace detail

}  // namespace mfkrig

#endif  // MFKRIG_DOE_HPP
