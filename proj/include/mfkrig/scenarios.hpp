#ifndef MFKRIG_SCENARIOS_HPP
#define MFKRIG_SCENARIOS_HPP

#include <cstdint>
#include <functional>

#include "mfkrig/multifidelity.hpp"

namespace mfkrig {

/// One-dimensional three-fidelity analytic benchmark on [-5, 5]:
///   g(x)  = exp(-(x/2)^2)          (level 3, the performance function)
///   h2(x) = exp(-(x/3)^2) - 0.1    (level 2)
///   h1(x) = 0.7 - (x/6)^2          (level 1)
namespace bench1d {

inline constexpr double kLo = -5.0, kHi = 5.0;

Bounds domain();

/// Closed-form value of the level-{1,2,3} function; throws InvalidArgument
/// for a level outside 1..3 or x outside [-5, 5].
double eval(int level, double x);

/// The benchmark design: level 3 at {-5,-2,1,4}, level 2 at
/// {-5,-3.5,-2,-0.5,1,2.5,4}, level 1 at {-5,-4.5,...,4.5,5}. Nested by
/// construction.
MultiFidelityDataset design();

/// n equally spaced points on [-5, 5], as an n x 1 matrix.
MatrixXd grid(Index n = 201);

}  // namespace bench1d

/// Lane-change scenario: a frontal vehicle cuts in ahead of the test AV.
/// The environment is x = (v, Rdot, 1/R): frontal-vehicle velocity [m/s],
/// closing speed [m/s], inverse range [1/m]. The performance function is the
/// minimum range reached, so range <= 0 means crash.
namespace lane_change {

struct VehicleParams {
    double reaction_delay = 0.5;  ///< s, before the AV starts braking
    double decel = 3.0;           ///< m/s^2, closing-speed reduction when braking
    double speed_fade = 60.0;     ///< m/s, AV speed at which braking effectiveness halves
    double resonance_amp = 0.35;  ///< controller-resonance amplitude, in (0, 1)
    double resonance_len = 6.5;   ///< m/s, resonance wavelength over v
};

/// Design-space box: v in [5, 35], Rdot in [0, 30], 1/R in [0.1, 1].
Bounds design_bounds();

/// Deterministic kinematic stand-in for the black-box vehicle model: the AV
/// (moving at v + Rdot) reacts after `reaction_delay`, then bleeds off the
/// closing speed at an effective deceleration
///   a = decel / ((1 + (v+Rdot)/speed_fade) * (1 + resonance_amp*sin(2 pi v/resonance_len)))
/// until closure stops;
///   min range = max(0, R - Rdot*t_d - Rdot^2 / (2 a)).
/// The fade and resonance factors mimic speed-dependent braking performance
/// and a narrow controller resonance over the frontal-vehicle speed band.
/// Continuous in the inputs, monotone in Rdot and R, value in [0, R].
/// `x` is a design point (v, Rdot, 1/R) inside the design bounds.
double min_range(const Eigen::Ref<const VectorXd>& x,
                 const VehicleParams& params = {});

/// Full mesh-grid design, 16 x 16 x 10 = 2560 points stored as (v, Rdot, 1/R);
/// v-major, then Rdot, then 1/R.
MatrixXd mesh_grid();

/// Split parameters: D_1 of n_low noisy observations, D_2 of n_high exact
/// observations drawn from D_1, the rest as the test set.
struct SplitSpec {
    std::uint64_t seed = 0;
    Index n_low = 1000;
    Index n_high = 500;
    double noise_amplitude = 0.5;  ///< level-1 noise is Uniform[-a, a]
    VehicleParams vehicle;
};

struct Split {
    MultiFidelityDataset data;  ///< level 1 = noisy D_1, level 2 = exact D_2
    MatrixXd test_points;       ///< D_t
    VectorXd test_values;       ///< true min ranges on D_t
};

/// Evaluates the vehicle model on the mesh grid, splits it with the seeded
/// generator and applies the one-time level-1 noise. Deterministic given the
/// seed; the noise is baked into the dataset, not re-drawn per query.
Split build_split(const SplitSpec& spec);

}  // namespace lane_change

/// Mean squared error of a predictor over a test set (rows of points paired
/// with truth). Throws InvalidArgument on an empty set.
double mse_on(const std::function<double(const VectorXd&)>& predictor,
              const Eigen::Ref<const MatrixXd>& points,
              const Eigen::Ref<const VectorXd>& truth);

}  // namespace mfkrig

#endif  // MFKRIG_SCENARIOS_HPP
