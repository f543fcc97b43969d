// mfkrig command-line interface: fit multi-fidelity surrogates from CSV
// bundles, predict, estimate safety-critical-event probabilities, recommend
// the next experiment, and reproduce the built-in benchmark studies.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mfkrig/doe.hpp"
#include "mfkrig/io.hpp"
#include "mfkrig/rng.hpp"
#include "mfkrig/scenarios.hpp"

namespace {

using namespace mfkrig;

constexpr int kExitInvalidInput = 2;
constexpr int kExitNumericalFailure = 3;

struct RunConfig {
    FitConfig fit;
    Index n_mc = 100000;
    int n_y = 64;
};

RunConfig load_run_config(const std::string& path) {
    RunConfig cfg;
    if (path.empty()) return cfg;
    const json doc = read_json_file(path);
    cfg.fit.nugget = doc.value("nugget", cfg.fit.nugget);
    cfg.fit.n_starts = doc.value("n_starts", cfg.fit.n_starts);
    cfg.fit.max_iter = doc.value("max_iter", cfg.fit.max_iter);
    cfg.fit.seed = doc.value("seed", cfg.fit.seed);
    cfg.fit.theta_min = doc.value("theta_min", cfg.fit.theta_min);
    cfg.fit.theta_max = doc.value("theta_max", cfg.fit.theta_max);
    cfg.fit.n_threads = doc.value("n_threads", cfg.fit.n_threads);
    cfg.n_mc = doc.value("n_mc", cfg.n_mc);
    cfg.n_y = doc.value("n_y", cfg.n_y);
    if (cfg.n_mc < 1 || cfg.n_y < 1 || cfg.fit.n_starts < 1) {
        throw InvalidArgument(path + ": budgets must be positive");
    }
    return cfg;
}

void print_layer_summary(const MultiFidelityModel& model) {
    for (int t = 1; t <= model.top_level(); ++t) {
        const KrigingModel& layer = model.layer(t);
        const double ll = log_likelihood(layer.params(), layer.beta(), layer.training(),
                                         layer.bounds());
        std::ostringstream theta;
        for (Index i = 0; i < layer.params().theta.size(); ++i) {
            theta << (i ? ", " : "") << layer.params().theta[i];
        }
        std::cout << "layer " << t << " (" << model.label(t)
                  << "): n = " << layer.training().size() << ", beta = " << layer.beta()
                  << ", tau2 = " << layer.params().tau2 << ", theta = [" << theta.str()
                  << "], nugget = " << layer.params().nugget
                  << ", log-likelihood = " << ll << "\n";
    }
}

int cmd_fit(const std::string& data_path, const std::string& config_path,
            std::optional<std::uint64_t> seed, const std::string& out_path) {
    RunConfig cfg = load_run_config(config_path);
    if (seed) cfg.fit.seed = *seed;
    const MultiFidelityDataset data = read_bundle(data_path);
    const MultiFidelityModel model = fit_multifidelity(data, cfg.fit);
    print_layer_summary(model);
    save_model(out_path, model);
    std::cout << "model written to " << out_path << "\n";
    return 0;
}

MatrixXd grid_points(const MultiFidelityModel& model, int per_dim) {
    if (per_dim < 2) {
        throw InvalidArgument("--grid needs at least 2 points per dimension");
    }
    const Bounds& b = model.layer(1).bounds();
    const Index d = b.dim();
    double total = 1;
    for (Index i = 0; i < d; ++i) total *= per_dim;
    if (total > 200000) {
        throw InvalidArgument("--grid would enumerate more than 200000 points");
    }
    const Index n = static_cast<Index>(total);
    MatrixXd pts(n, d);
    for (Index row = 0; row < n; ++row) {
        Index rem = row;
        for (Index i = d - 1; i >= 0; --i) {
            const Index k = rem % per_dim;
            rem /= per_dim;
            pts(row, i) = b.lower()[i] +
                          (b.upper()[i] - b.lower()[i]) * static_cast<double>(k) /
                              static_cast<double>(per_dim - 1);
        }
    }
    return pts;
}

int cmd_predict(const std::string& model_path, const std::string& points_path,
                int grid_n, int level, const std::string& out_path) {
    const MultiFidelityModel model = load_model(model_path);
    const int t = level > 0 ? level : model.top_level();
    MatrixXd points;
    if (!points_path.empty()) {
        points = read_points_csv(points_path);
    } else if (grid_n > 0) {
        points = grid_points(model, grid_n);
    } else {
        throw InvalidArgument("predict: give --points or --grid");
    }
    VectorXd mean, var;
    model.predict(points, t, &mean, &var);
    write_predictions_csv(out_path, points, mean, var);
    std::cout << "wrote " << points.rows() << " predictions (level " << t << ") to "
              << out_path << "\n";
    return 0;
}

int cmd_estimate_prob(const std::string& model_path, const std::string& env_path,
                      double gamma, const std::string& direction, Index n_mc,
                      std::uint64_t seed, const std::string& out_path) {
    const MultiFidelityModel model = load_model(model_path);
    const EnvironmentDistribution env = read_env_config(env_path);
    EventSpec spec{gamma, direction_from_string(direction)};
    const ProbabilityEstimate est = event_probability(model, env, spec, n_mc, seed);
    const json doc = to_json(est, spec);
    std::cout << doc.dump(2) << "\n";
    if (!out_path.empty()) write_json_file(out_path, doc);
    return 0;
}

int cmd_design_next(const std::string& model_path, const std::string& candidates_path,
                    const std::vector<int>& levels, const std::vector<double>& costs,
                    const std::string& env_path, double gamma,
                    const std::string& direction, int n_y, Index n_mc,
                    std::uint64_t seed, const std::string& out_path) {
    const MultiFidelityModel model = load_model(model_path);
    const EnvironmentDistribution env = read_env_config(env_path);
    EventSpec spec{gamma, direction_from_string(direction)};
    CandidateSet candidates;
    candidates.points = read_points_csv(candidates_path);
    candidates.levels = levels.empty() ? std::vector<int>{model.top_level()} : levels;
    const CostModel cost = costs.empty() ? CostModel::default_table(model.top_level())
                                         : CostModel::per_level(costs);
    const SelectionResult sel =
        select_next(model, env, spec, candidates, cost, n_y, n_mc, seed, 2);

    auto choice_json = [](const DesignChoice& c) {
        json j;
        json x = json::array();
        for (Index i = 0; i < c.x.size(); ++i) x.push_back(c.x[i]);
        j["x"] = std::move(x);
        j["t"] = c.t;
        j["ig"] = c.ig;
        j["cost"] = c.cost;
        j["score"] = c.score;
        return j;
    };
    json doc = choice_json(sel.best);
    json table = json::array();
    for (const auto& entry : sel.table) table.push_back(choice_json(entry));
    doc["table"] = std::move(table);
    std::cout << "next experiment: level " << sel.best.t << " at x = ["
              << sel.best.x.transpose() << "], IG = " << sel.best.ig
              << ", cost = " << sel.best.cost << ", score = " << sel.best.score << "\n";
    if (!out_path.empty()) write_json_file(out_path, doc);
    return 0;
}

json fit_report(const MultiFidelityModel& model) {
    json layers = json::array();
    for (int t = 1; t <= model.top_level(); ++t) {
        const KrigingModel& layer = model.layer(t);
        json j;
        j["level"] = t;
        j["label"] = model.label(t);
        j["n"] = layer.training().size();
        j["beta"] = layer.beta();
        j["tau2"] = layer.params().tau2;
        json theta = json::array();
        for (Index i = 0; i < layer.params().theta.size(); ++i) {
            theta.push_back(layer.params().theta[i]);
        }
        j["theta"] = std::move(theta);
        j["nugget"] = layer.params().nugget;
        layers.push_back(std::move(j));
    }
    return layers;
}

int cmd_reproduce(const std::string& experiment, std::uint64_t seed,
                  const std::string& config_path, const std::string& out_path) {
    json report;
    report["experiment"] = experiment;
    report["seed"] = seed;
    int status = 0;

    if (experiment == "exp1") {
        RunConfig cfg = load_run_config(config_path);
        cfg.fit.seed = seed;
        cfg.fit.bounds = bench1d::domain();
        const MultiFidelityDataset design = bench1d::design();
        const MatrixXd grid = bench1d::grid(201);
        VectorXd truth(grid.rows());
        for (Index i = 0; i < grid.rows(); ++i) truth[i] = bench1d::eval(3, grid(i, 0));

        // Baseline: plain Kriging on the 4 performance-function observations.
        const KrigingModel baseline = fit_mle(design.dataset(3), cfg.fit);
        const double mse1 = mse_on(
            [&](const VectorXd& x) { return baseline.posterior_mean(x); }, grid, truth);

        // Two-level stack: performance function + the higher-fidelity model h2.
        std::vector<std::pair<FidelityLevel, Dataset>> two;
        two.emplace_back(FidelityLevel{1, "mid"}, design.dataset(2));
        two.emplace_back(FidelityLevel{2, "high"}, design.dataset(3));
        const MultiFidelityModel model2 =
            fit_multifidelity(MultiFidelityDataset(std::move(two)), cfg.fit);
        const double mse2 = mse_on(
            [&](const VectorXd& x) { return model2.mean(x, 2); }, grid, truth);

        // Full three-level stack.
        const MultiFidelityModel model3 = fit_multifidelity(design, cfg.fit);
        const double mse3 = mse_on(
            [&](const VectorXd& x) { return model3.mean(x, 3); }, grid, truth);

        const bool ordering = mse1 > mse2 && mse2 >= mse3;
        report["mse"] = {{"kriging_only", mse1}, {"with_h2", mse2}, {"with_h1_h2", mse3}};
        report["ordering_ok"] = ordering;
        report["layers_full_model"] = fit_report(model3);
        std::cout << "exp1: MSE kriging-only = " << mse1 << ", +h2 = " << mse2
                  << ", +h1,h2 = " << mse3 << "\n"
                  << "ordering MSE1 > MSE2 >= MSE3: " << (ordering ? "holds" : "VIOLATED")
                  << "\n";
        if (!ordering) status = 1;
    } else if (experiment == "exp2") {
        RunConfig cfg;
        if (!config_path.empty()) {
            cfg = load_run_config(config_path);
        } else {
            // n = 1000 likelihood evaluations are expensive; a lighter search
            // is plenty for the 3-dimensional lane-change surface.
            cfg.fit.n_starts = 4;
            cfg.fit.max_iter = 40;
            cfg.fit.n_threads = 2;
        }
        cfg.fit.bounds = lane_change::design_bounds();

        lane_change::SplitSpec split_spec;
        split_spec.seed = seed;
        const lane_change::Split split = lane_change::build_split(split_spec);

        FitConfig single_cfg = cfg.fit;
        single_cfg.seed = derive_stream(seed, "fit-single");
        const KrigingModel single = fit_mle(split.data.dataset(2), single_cfg);

        FitConfig multi_cfg = cfg.fit;
        multi_cfg.seed = seed;
        const MultiFidelityModel multi = fit_multifidelity(split.data, multi_cfg);

        const double mse_single = mse_on(
            [&](const VectorXd& x) { return single.posterior_mean(x); },
            split.test_points, split.test_values);
        const double mse_multi = mse_on(
            [&](const VectorXd& x) { return multi.mean(x, 2); },
            split.test_points, split.test_values);

        report["mse_single_fidelity"] = mse_single;
        report["mse_multi_fidelity"] = mse_multi;
        report["relative_reduction"] = 1.0 - mse_multi / mse_single;
        std::cout << "exp2: single-fidelity MSE = " << mse_single
                  << ", multi-fidelity MSE = " << mse_multi
                  << ", reduction = " << 100.0 * (1.0 - mse_multi / mse_single) << "%\n";
    } else {
        throw InvalidArgument("unknown experiment '" + experiment +
                              "' (expected exp1 or exp2)");
    }

    if (!out_path.empty()) {
        write_json_file(out_path, report);
        std::cout << "report written to " << out_path << "\n";
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-fidelity Kriging toolkit"};
    app.require_subcommand(1);

    std::string data_path, model_path, config_path, out_path, points_path, env_path;
    std::string direction = "exceed", candidates_path, experiment;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> seed_opt;
    double gamma = 0.0;
    int level = 0, grid_n = 0, n_y = 64;
    Index n_mc = 100000;
    std::vector<int> levels;
    std::vector<double> costs;

    auto* fit = app.add_subcommand("fit", "fit a multi-fidelity model from a data bundle");
    fit->add_option("--data", data_path, "bundle manifest JSON")->required();
    fit->add_option("--config", config_path, "run-config JSON");
    fit->add_option("--seed", seed_opt, "override the config seed");
    fit->add_option("--out", out_path, "output model JSON")->required();

    auto* predict = app.add_subcommand("predict", "posterior mean/variance at points");
    predict->add_option("--model", model_path, "model JSON")->required();
    predict->add_option("--points", points_path, "points CSV (x1..xd)");
    predict->add_option("--grid", grid_n, "equally spaced points per dimension");
    predict->add_option("--level", level, "fidelity level (default: top)");
    predict->add_option("--out", out_path, "output CSV")->required();

    auto* estimate = app.add_subcommand("estimate-prob",
                                        "safety-critical event probability");
    estimate->add_option("--model", model_path, "model JSON")->required();
    estimate->add_option("--env", env_path, "environment config JSON")->required();
    estimate->add_option("--gamma", gamma, "event threshold")->required();
    estimate->add_option("--direction", direction, "exceed | fall-below");
    estimate->add_option("--n-mc", n_mc, "Monte Carlo budget");
    estimate->add_option("--seed", seed, "sampling seed");
    estimate->add_option("--out", out_path, "output JSON");

    auto* design = app.add_subcommand("design-next", "recommend the next experiment");
    design->add_option("--model", model_path, "model JSON")->required();
    design->add_option("--candidates", candidates_path, "candidate points CSV")->required();
    design->add_option("--levels", levels, "candidate fidelity levels");
    design->add_option("--cost", costs, "per-level cost table (default 1,10,100,...)");
    design->add_option("--env", env_path, "environment config JSON")->required();
    design->add_option("--gamma", gamma, "event threshold")->required();
    design->add_option("--direction", direction, "exceed | fall-below");
    design->add_option("--n-y", n_y, "stratified draws of the hypothetical response");
    design->add_option("--n-mc", n_mc, "Monte Carlo budget");
    design->add_option("--seed", seed, "sampling seed");
    design->add_option("--out", out_path, "output JSON (choice + scored table)");

    auto* reproduce = app.add_subcommand("reproduce", "rerun a built-in experiment");
    reproduce->add_option("experiment", experiment, "exp1 | exp2")->required();
    reproduce->add_option("--seed", seed, "experiment seed");
    reproduce->add_option("--config", config_path, "run-config JSON");
    reproduce->add_option("--out", out_path, "report JSON");

    try {
        app.parse(argc, argv);
        if (fit->parsed()) {
            return cmd_fit(data_path, config_path, seed_opt, out_path);
        }
        if (predict->parsed()) {
            return cmd_predict(model_path, points_path, grid_n, level, out_path);
        }
        if (estimate->parsed()) {
            return cmd_estimate_prob(model_path, env_path, gamma, direction, n_mc, seed,
                                     out_path);
        }
        if (design->parsed()) {
            return cmd_design_next(model_path, candidates_path, levels, costs, env_path,
                                   gamma, direction, n_y, n_mc, seed, out_path);
        }
        if (reproduce->parsed()) {
            return cmd_reproduce(experiment, seed, config_path, out_path);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalidInput;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalFailure;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
