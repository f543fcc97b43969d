#include "mfkrig/kriging.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "mfkrig/rng.hpp"

namespace mfkrig {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kNuggetCap = 1e-4;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Factorization {
    MatrixXd chol;        // lower triangular
    double nugget_used;
    double rcond;         // (min diag L / max diag L)^2
};

// Cholesky of R + nugget*I with the escalation rule: on failure the nugget
// grows x10 (from 1e-12 when starting at zero) up to 1e-4, then
// NumericalFailure.
Factorization factorize(const Eigen::Ref<const MatrixXd>& points,
                        const VectorXd& theta, double nugget) {
    double current = nugget;
    while (true) {
        KernelParams p{theta, 1.0, current};
        MatrixXd r = correlation_matrix(points, p);
        Eigen::LLT<MatrixXd> llt(r);
        if (llt.info() == Eigen::Success) {
            MatrixXd l = llt.matrixL();
            const double dmin = l.diagonal().minCoeff();
            const double dmax = l.diagonal().maxCoeff();
            const double rc = (dmin / dmax) * (dmin / dmax);
            if (dmin > 0.0) {
                return {std::move(l), current, rc};
            }
        }
        if (current >= kNuggetCap) {
            throw NumericalFailure(
                "correlation matrix not positive definite at nugget " +
                std::to_string(current) + " (escalation exhausted)");
        }
        current = current == 0.0 ? 1e-12 : current * 10.0;
        if (current > kNuggetCap) current = kNuggetCap;
    }
}

// Profiled negative log likelihood at fixed theta: beta is the sample mean,
// tau2(theta) = e' (R+nugget*I)^{-1} e / n. Returns +inf for candidates whose
// correlation matrix cannot be factorized at the configured nugget, or whose
// factor is too ill-conditioned to trust interpolation in double precision
// when running without a real nugget.
struct ProfiledNll {
    const MatrixXd& norm_points;
    const VectorXd& residual;   // Y - mean(Y)
    double nugget;

    double tau2_floor() const {
        const double n = static_cast<double>(residual.size());
        return 1e-12 * std::max(1.0, residual.squaredNorm() / n);
    }

    double operator()(const VectorXd& theta, double* tau2_out = nullptr) const {
        const Index n = norm_points.rows();
        KernelParams p{theta, 1.0, nugget};
        MatrixXd r = correlation_matrix(norm_points, p);
        Eigen::LLT<MatrixXd> llt(r);
        if (llt.info() != Eigen::Success) return kInf;
        const VectorXd diag = llt.matrixLLT().diagonal();
        const double dmin = diag.minCoeff();
        const double dmax = diag.maxCoeff();
        if (dmin <= 0.0) return kInf;
        if (nugget < 1e-10 && (dmin / dmax) * (dmin / dmax) < 1e-9) return kInf;
        const VectorXd alpha = llt.solve(residual);
        const double tau2 = std::max(residual.dot(alpha) / static_cast<double>(n),
                                     tau2_floor());
        if (tau2_out) *tau2_out = tau2;
        const double logdet = 2.0 * diag.array().log().sum();
        return 0.5 * (n * kLog2Pi + n * std::log(tau2) + logdet + n);
    }
};

// Deterministic Nelder-Mead in log-theta space. Coordinates are clamped to
// [lo, hi] inside the objective with a mild pull-back penalty so the simplex
// cannot drift over the flat clamped region.
struct SimplexResult {
    VectorXd z;
    double f;
};

SimplexResult nelder_mead(const std::function<double(const VectorXd&)>& f,
                          const VectorXd& z0, double step, int max_iter) {
    const Index d = z0.size();
    std::vector<VectorXd> xs(d + 1, z0);
    std::vector<double> fs(d + 1);
    for (Index i = 0; i < d; ++i) xs[i + 1][i] += step;
    for (Index i = 0; i <= d; ++i) fs[i] = f(xs[i]);

    std::vector<Index> order(d + 1);
    for (int iter = 0; iter < max_iter; ++iter) {
        for (Index i = 0; i <= d; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](Index a, Index b) { return fs[a] < fs[b]; });
        const Index best = order[0], worst = order[d], second = order[d - 1];
        if (std::isfinite(fs[best]) &&
            fs[worst] - fs[best] < 1e-12 * (std::abs(fs[best]) + 1e-12)) {
            break;
        }
        VectorXd centroid = VectorXd::Zero(d);
        for (Index i = 0; i <= d; ++i) {
            if (i != worst) centroid += xs[i];
        }
        centroid /= static_cast<double>(d);

        const VectorXd xr = centroid + (centroid - xs[worst]);
        const double fr = f(xr);
        if (fr < fs[best]) {
            const VectorXd xe = centroid + 2.0 * (centroid - xs[worst]);
            const double fe = f(xe);
            if (fe < fr) {
                xs[worst] = xe; fs[worst] = fe;
            } else {
                xs[worst] = xr; fs[worst] = fr;
            }
        } else if (fr < fs[second]) {
            xs[worst] = xr; fs[worst] = fr;
        } else {
            const bool outside = fr < fs[worst];
            VectorXd xc;
            if (outside) {
                xc = centroid + 0.5 * (xr - centroid);
            } else {
                xc = centroid - 0.5 * (centroid - xs[worst]);
            }
            const double fc = f(xc);
            if (fc < (outside ? fr : fs[worst])) {
                xs[worst] = xc; fs[worst] = fc;
            } else {
                for (Index i = 0; i <= d; ++i) {  // shrink toward the best vertex
                    if (i == best) continue;
                    xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
                    fs[i] = f(xs[i]);
                }
            }
        }
    }
    Index best = 0;
    for (Index i = 1; i <= d; ++i) {
        if (fs[i] < fs[best]) best = i;
    }
    return {xs[best], fs[best]};
}

// Latin hypercube of n points in [lo, hi]^d: each dimension's strata are
// permuted independently; stratum midpoints keep the layout seed-stable.
std::vector<VectorXd> latin_hypercube(int n, Index d, double lo, double hi,
                                      std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<std::size_t>> perms(d);
    for (Index i = 0; i < d; ++i) {
        perms[i].resize(n);
        for (int j = 0; j < n; ++j) perms[i][j] = j;
        rng.shuffle(perms[i]);
    }
    std::vector<VectorXd> pts(n, VectorXd(d));
    for (int j = 0; j < n; ++j) {
        for (Index i = 0; i < d; ++i) {
            pts[j][i] = lo + (hi - lo) * ((perms[i][j] + 0.5) / n);
        }
    }
    return pts;
}

}  // namespace

KrigingModel::KrigingModel(Dataset training, KernelParams params, double beta,
                           Bounds bounds)
    : training_(std::move(training)),
      params_(std::move(params)),
      beta_(beta),
      bounds_(std::move(bounds)) {
    params_.validate();
    if (!std::isfinite(beta_)) {
        throw InvalidArgument("KrigingModel: beta must be finite");
    }
    if (bounds_.dim() != training_.dim() || params_.theta.size() != training_.dim()) {
        throw InvalidArgument("KrigingModel: bounds/theta dimension mismatch");
    }
    norm_points_ = bounds_.normalize(training_.points());
    Factorization fac = factorize(norm_points_, params_.theta, params_.nugget);
    params_.nugget = fac.nugget_used;
    chol_ = std::move(fac.chol);
    const VectorXd residual = training_.observations().array() - beta_;
    alpha_ = chol_.triangularView<Eigen::Lower>().solve(residual);
    chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha_);
}

double KrigingModel::posterior_mean(const Eigen::Ref<const VectorXd>& x) const {
    const VectorXd xn = bounds_.normalize_point(x);
    const MatrixXd r = cross_correlation(norm_points_, xn.transpose(), params_.theta);
    return beta_ + r.col(0).dot(alpha_);
}

double KrigingModel::posterior_var(const Eigen::Ref<const VectorXd>& x) const {
    const VectorXd xn = bounds_.normalize_point(x);
    const MatrixXd r = cross_correlation(norm_points_, xn.transpose(), params_.theta);
    const VectorXd w = chol_.triangularView<Eigen::Lower>().solve(r.col(0));
    return params_.tau2 * std::max(0.0, 1.0 - w.squaredNorm());
}

void KrigingModel::predict(const Eigen::Ref<const MatrixXd>& points,
                           VectorXd* mean, VectorXd* var) const {
    const Index m = points.rows();
    const MatrixXd norm_q = bounds_.normalize(points);
    if (mean) mean->resize(m);
    if (var) var->resize(m);
    constexpr Index kChunk = 4096;
    for (Index start = 0; start < m; start += kChunk) {
        const Index len = std::min(kChunk, m - start);
        const MatrixXd rx = cross_correlation(norm_points_, norm_q.middleRows(start, len),
                                              params_.theta);
        if (mean) {
            mean->segment(start, len) = (rx.transpose() * alpha_).array() + beta_;
        }
        if (var) {
            const MatrixXd w = chol_.triangularView<Eigen::Lower>().solve(rx);
            var->segment(start, len) =
                (params_.tau2 * (1.0 - w.colwise().squaredNorm().array()).max(0.0))
                    .matrix();
        }
    }
}

double log_likelihood(const KernelParams& params, double beta, const Dataset& data,
                      const std::optional<Bounds>& bounds) {
    params.validate();
    if (params.theta.size() != data.dim()) {
        throw InvalidArgument("log_likelihood: theta dimension mismatch");
    }
    const MatrixXd pts = bounds ? bounds->normalize(data.points()) : data.points();
    MatrixXd r = correlation_matrix(pts, KernelParams{params.theta, 1.0, params.nugget});
    Eigen::LLT<MatrixXd> llt(r);
    if (llt.info() != Eigen::Success) {
        throw NumericalFailure("log_likelihood: covariance not positive definite");
    }
    const VectorXd diag = llt.matrixLLT().diagonal();
    if (diag.minCoeff() <= 0.0) {
        throw NumericalFailure("log_likelihood: covariance not positive definite");
    }
    const Index n = data.size();
    const VectorXd e = data.observations().array() - beta;
    const double quad = e.dot(llt.solve(e)) / params.tau2;
    const double logdet = n * std::log(params.tau2) + 2.0 * diag.array().log().sum();
    return -0.5 * (n * kLog2Pi + logdet + quad);
}

KrigingModel fit_mle(const Dataset& data, const FitConfig& config,
                     FitDiagnostics* diagnostics) {
    if (config.n_starts < 1 || config.max_iter < 0) {
        throw InvalidArgument("fit_mle: n_starts must be >= 1 and max_iter >= 0");
    }
    if (!(config.theta_min > 0.0) || !(config.theta_max > config.theta_min)) {
        throw InvalidArgument("fit_mle: invalid theta search box");
    }
    const Index d = data.dim();
    const Bounds bounds = config.bounds ? *config.bounds : Bounds::of(data.points());
    const MatrixXd norm_points = bounds.normalize(data.points());
    const double beta = data.observations().mean();
    const VectorXd residual = data.observations().array() - beta;
    const ProfiledNll nll{norm_points, residual, config.nugget};

    const double zlo = std::log(config.theta_min);
    const double zhi = std::log(config.theta_max);
    auto clamp_z = [&](const VectorXd& z) {
        return z.cwiseMax(zlo).cwiseMin(zhi).eval();
    };
    auto objective = [&](const VectorXd& z) {
        const VectorXd zc = clamp_z(z);
        const double penalty = 1e2 * (z - zc).cwiseAbs().sum();
        const double base = nll(zc.array().exp().matrix());
        return std::isfinite(base) ? base + penalty : base;
    };

    const auto starts = latin_hypercube(config.n_starts, d, zlo, zhi,
                                        derive_stream(config.seed, "fit"));
    struct StartResult {
        VectorXd theta0, theta;
        double nll0 = kInf, nll_final = kInf;
    };
    std::vector<StartResult> results(starts.size());

    auto run_start = [&](std::size_t i) {
        StartResult res;
        res.theta0 = starts[i].array().exp().matrix();
        res.nll0 = nll(res.theta0);
        const SimplexResult sr = nelder_mead(objective, starts[i], 0.5, config.max_iter);
        const VectorXd zc = clamp_z(sr.z);
        res.theta = zc.array().exp().matrix();
        res.nll_final = nll(res.theta);
        // The clamped endpoint can only improve on the penalized value, but
        // never regresses past the start itself.
        if (res.nll_final > res.nll0) {
            res.theta = res.theta0;
            res.nll_final = res.nll0;
        }
        results[i] = std::move(res);
    };

    const int n_threads = std::max(1, std::min<int>(config.n_threads,
                                                    static_cast<int>(starts.size())));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < starts.size(); ++i) run_start(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int w = 0; w < n_threads; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < starts.size(); i += n_threads) run_start(i);
            });
        }
        for (auto& th : pool) th.join();
    }

    int best = -1;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (std::isfinite(results[i].nll_final) &&
            (best < 0 || results[i].nll_final < results[best].nll_final)) {
            best = static_cast<int>(i);
        }
    }
    if (diagnostics) {
        diagnostics->starts.clear();
        for (const auto& r : results) {
            diagnostics->starts.push_back({r.theta0, -r.nll0, r.theta, -r.nll_final});
        }
        diagnostics->best_index = best;
    }
    if (best < 0) {
        std::ostringstream msg;
        msg << "fit_mle: every restart failed numerically (n = " << data.size()
            << ", nugget = " << config.nugget << "); initial log-thetas tried:";
        for (const auto& s : starts) msg << " [" << s.transpose() << "]";
        throw FitFailure(msg.str());
    }

    double tau2 = 0.0;
    nll(results[best].theta, &tau2);
    KernelParams params{results[best].theta, tau2, config.nugget};
    return KrigingModel(data, std::move(params), beta, bounds);
}

}  // namespace mfkrig
