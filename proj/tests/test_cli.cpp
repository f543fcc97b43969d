#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "mfkrig/io.hpp"
#include "mfkrig/scenarios.hpp"

using namespace mfkrig;

namespace {

struct CliFixture {
    std::filesystem::path dir;

    CliFixture() {
        dir = std::filesystem::temp_directory_path() /
              ("mfkrig_cli_" + std::to_string(::getpid()) + "_" +
               std::to_string(counter()++));
        std::filesystem::create_directories(dir);
    }
    ~CliFixture() { std::filesystem::remove_all(dir); }

    static int& counter() {
        static int n = 0;
        return n;
    }

    std::string file(const std::string& name) const { return (dir / name).string(); }

    // Runs the CLI with output redirected into the fixture directory;
    // returns the exit status.
    int run(const std::string& args) const {
        const std::string cmd = std::string(MFKRIG_CLI_PATH) + " " + args + " > " +
                                file("stdout.txt") + " 2> " + file("stderr.txt");
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string slurp(const std::string& name) const {
        std::ifstream in(file(name));
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write_benchmark_bundle(bool nested = true) const {
        const MultiFidelityDataset design = bench1d::design();
        write_dataset_csv(file("low.csv"), design.dataset(1));
        write_dataset_csv(file("mid.csv"), design.dataset(2));
        write_dataset_csv(file("high.csv"), design.dataset(3));
        if (!nested) {
            // Shift one top-level point off the lower-level grids.
            Dataset broken(
                (MatrixXd(4, 1) << -5.0, -2.0, 1.25, 4.0).finished(),
                design.dataset(3).observations());
            write_dataset_csv(file("high.csv"), broken);
        }
        std::ofstream out(file("bundle.json"));
        out << R"({"levels": [
            {"level": 1, "label": "low", "csv": "low.csv"},
            {"level": 2, "label": "mid", "csv": "mid.csv"},
            {"level": 3, "label": "high", "csv": "high.csv"}]})";
    }

    void write_env() const {
        std::ofstream out(file("env.json"));
        out << R"({"distribution": "uniform", "lower": [-5], "upper": [5]})";
    }
};

}  // namespace

TEST_CASE("fit builds a three-layer model from the benchmark bundle") {
    CliFixture cli;
    cli.write_benchmark_bundle();
    const int status = cli.run("fit --data " + cli.file("bundle.json") + " --seed 1 --out " +
                               cli.file("model.json"));
    REQUIRE(status == 0);
    const json doc = read_json_file(cli.file("model.json"));
    REQUIRE(doc["type"] == "multifidelity");
    REQUIRE(doc["layers"].size() == 3);
    REQUIRE(cli.slurp("stdout.txt").find("log-likelihood") != std::string::npos);
}

TEST_CASE("fit on a single-level bundle yields one layer") {
    CliFixture cli;
    const MultiFidelityDataset design = bench1d::design();
    write_dataset_csv(cli.file("only.csv"), design.dataset(1));
    {
        std::ofstream out(cli.file("bundle.json"));
        out << R"({"levels": [{"level": 1, "label": "only", "csv": "only.csv"}]})";
    }
    REQUIRE(cli.run("fit --data " + cli.file("bundle.json") + " --out " +
                    cli.file("model.json")) == 0);
    REQUIRE(read_json_file(cli.file("model.json"))["layers"].size() == 1);
}

TEST_CASE("fit rejects a non-nested bundle with exit code 2") {
    CliFixture cli;
    cli.write_benchmark_bundle(false);
    const int status = cli.run("fit --data " + cli.file("bundle.json") + " --out " +
                               cli.file("model.json"));
    REQUIRE(status == 2);
    const std::string err = cli.slurp("stderr.txt");
    REQUIRE(err.find("nesting violation") != std::string::npos);
    REQUIRE(err.find("level 3") != std::string::npos);
}

TEST_CASE("predict interpolates the recorded top-level observations") {
    CliFixture cli;
    cli.write_benchmark_bundle();
    {
        std::ofstream out(cli.file("cfg.json"));
        out << R"({"nugget": 0.0})";  // interpolation is exact without a nugget
    }
    REQUIRE(cli.run("fit --data " + cli.file("bundle.json") + " --config " +
                    cli.file("cfg.json") + " --out " + cli.file("model.json")) == 0);
    {
        std::ofstream out(cli.file("query.csv"));
        out << "x1\n-5\n-2\n1\n4\n";
    }
    REQUIRE(cli.run("predict --model " + cli.file("model.json") + " --points " +
                    cli.file("query.csv") + " --out " + cli.file("pred.csv")) == 0);
    std::ifstream in(cli.file("pred.csv"));
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "x1,mean,variance");
    const MultiFidelityDataset design = bench1d::design();
    int rows = 0;
    while (std::getline(in, line) && !line.empty()) {
        std::stringstream ss(line);
        std::string x, mean, var;
        std::getline(ss, x, ',');
        std::getline(ss, mean, ',');
        std::getline(ss, var, ',');
        const double y = design.dataset(3).observations()[rows];
        REQUIRE_THAT(std::stod(mean), Catch::Matchers::WithinAbs(y, 1e-6));
        ++rows;
    }
    REQUIRE(rows == 4);

    // Out-of-range level exits with code 2.
    REQUIRE(cli.run("predict --model " + cli.file("model.json") + " --points " +
                    cli.file("query.csv") + " --level 9 --out " +
                    cli.file("pred2.csv")) == 2);
}

TEST_CASE("estimate-prob is reproducible and saturates at extreme thresholds") {
    CliFixture cli;
    cli.write_benchmark_bundle();
    cli.write_env();
    REQUIRE(cli.run("fit --data " + cli.file("bundle.json") + " --out " +
                    cli.file("model.json")) == 0);
    const std::string base = "estimate-prob --model " + cli.file("model.json") +
                             " --env " + cli.file("env.json") +
                             " --direction exceed --n-mc 20000 --seed 9";
    REQUIRE(cli.run(base + " --gamma 0.8 --out " + cli.file("e1.json")) == 0);
    REQUIRE(cli.run(base + " --gamma 0.8 --out " + cli.file("e2.json")) == 0);
    REQUIRE(cli.slurp("e1.json") == cli.slurp("e2.json"));

    REQUIRE(cli.run(base + " --gamma -1e9 --out " + cli.file("e3.json")) == 0);
    REQUIRE(read_json_file(cli.file("e3.json"))["value"] == 1.0);
}

TEST_CASE("design-next recommends a candidate and audits every score") {
    CliFixture cli;
    cli.write_benchmark_bundle();
    cli.write_env();
    REQUIRE(cli.run("fit --data " + cli.file("bundle.json") + " --out " +
                    cli.file("model.json")) == 0);
    {
        std::ofstream out(cli.file("cands.csv"));
        out << "x1\n-4.5\n-0.5\n2.5\n4.5\n";
    }
    const std::string base = "design-next --model " + cli.file("model.json") + " --env " +
                             cli.file("env.json") +
                             " --candidates " + cli.file("cands.csv") +
                             " --gamma 0.8 --n-y 8 --n-mc 2000 --seed 3 "
                             "--levels 1 --levels 2 --levels 3";
    REQUIRE(cli.run(base + " --out " + cli.file("c1.json")) == 0);
    const json c1 = read_json_file(cli.file("c1.json"));
    REQUIRE(c1["table"].size() == 12);  // 4 points x 3 levels

    // Doubling every cost must not move the argmax.
    REQUIRE(cli.run(base + " --cost 1 --cost 10 --cost 100 --out " +
                    cli.file("c2.json")) == 0);
    REQUIRE(cli.run(base + " --cost 2 --cost 20 --cost 200 --out " +
                    cli.file("c3.json")) == 0);
    const json c2 = read_json_file(cli.file("c2.json"));
    const json c3 = read_json_file(cli.file("c3.json"));
    REQUIRE(c2["x"] == c3["x"]);
    REQUIRE(c2["t"] == c3["t"]);

    // A single candidate is returned as-is.
    {
        std::ofstream out(cli.file("one.csv"));
        out << "x1\n0.5\n";
    }
    REQUIRE(cli.run("design-next --model " + cli.file("model.json") + " --env " +
                    cli.file("env.json") + " --candidates " + cli.file("one.csv") +
                    " --gamma 0.8 --n-y 8 --n-mc 2000 --seed 3 --levels 2 --out " +
                    cli.file("c4.json")) == 0);
    const json c4 = read_json_file(cli.file("c4.json"));
    REQUIRE(c4["x"][0] == 0.5);
    REQUIRE(c4["t"] == 2);
}

TEST_CASE("reproduce exp1 reports three MSE values deterministically") {
    CliFixture cli;
    // Exit code 0 when the MSE ordering holds, 1 when the assertion trips;
    // either way the run must complete and the report must be reproducible.
    const int status1 = cli.run("reproduce exp1 --seed 7 --out " + cli.file("r1.json"));
    REQUIRE((status1 == 0 || status1 == 1));
    const std::string first_stdout = cli.slurp("stdout.txt");
    const int status2 = cli.run("reproduce exp1 --seed 7 --out " + cli.file("r2.json"));
    REQUIRE(status2 == status1);
    REQUIRE(cli.slurp("r1.json") == cli.slurp("r2.json"));
    REQUIRE(cli.slurp("stdout.txt") == first_stdout);

    const json report = read_json_file(cli.file("r1.json"));
    const double mse1 = report["mse"]["kriging_only"].get<double>();
    const double mse2 = report["mse"]["with_h2"].get<double>();
    const double mse3 = report["mse"]["with_h1_h2"].get<double>();
    REQUIRE(mse1 > mse2);  // the multi-fidelity model beats the 4-point baseline
    const bool ordering = mse1 > mse2 && mse2 >= mse3;
    REQUIRE(report["ordering_ok"] == ordering);
    REQUIRE(status1 == (ordering ? 0 : 1));
}

TEST_CASE("unknown experiments and missing flags exit with code 2") {
    CliFixture cli;
    REQUIRE(cli.run("reproduce exp9") == 2);
    REQUIRE(cli.run("fit") == 2);
    REQUIRE(cli.run("estimate-prob --model nowhere.json --env nowhere.json --gamma 1") ==
            2);
}
