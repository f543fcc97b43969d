#include "mfkrig/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace mfkrig {

namespace {

constexpr int kModelFormatVersion = 1;

std::string trimmed(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trimmed(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

// Locale-independent double parsing ('.' decimal separator).
double parse_double(const std::string& s, const std::string& context) {
    double value = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw InvalidArgument(context + ": cannot parse number '" + s + "'");
    }
    return value;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidArgument("cannot open file: " + path);
    }
    return in;
}

// Reads a CSV with headers x1..xd plus, when with_y, a trailing y column.
std::pair<MatrixXd, VectorXd> read_csv(const std::string& path, bool with_y) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw InvalidArgument(path + ": empty file");
    }
    const auto header = split_csv_line(line);
    const std::size_t d = header.size() - (with_y ? 1 : 0);
    if (d < 1) {
        throw InvalidArgument(path + ": header must list x1..xd" +
                              std::string(with_y ? " and y" : ""));
    }
    for (std::size_t i = 0; i < d; ++i) {
        if (header[i] != "x" + std::to_string(i + 1)) {
            throw InvalidArgument(path + ": expected header column 'x" +
                                  std::to_string(i + 1) + "', got '" + header[i] + "'");
        }
    }
    if (with_y && header.back() != "y") {
        throw InvalidArgument(path + ": last header column must be 'y'");
    }

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw InvalidArgument(path + ":" + std::to_string(line_no) +
                                  ": expected " + std::to_string(header.size()) +
                                  " fields, got " + std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            row.push_back(parse_double(f, path + ":" + std::to_string(line_no)));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw InvalidArgument(path + ": no data rows");
    }
    MatrixXd points(static_cast<Index>(rows.size()), static_cast<Index>(d));
    VectorXd y(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            points(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
        if (with_y) y[static_cast<Index>(i)] = rows[i][d];
    }
    return {std::move(points), std::move(y)};
}

VectorXd vector_from_json(const json& arr) {
    VectorXd v(static_cast<Index>(arr.size()));
    for (Index i = 0; i < v.size(); ++i) v[i] = arr[static_cast<std::size_t>(i)].get<double>();
    return v;
}

json vector_to_json(const VectorXd& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

}  // namespace

Dataset read_dataset_csv(const std::string& path) {
    auto [points, y] = read_csv(path, true);
    return Dataset(std::move(points), std::move(y));
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidArgument("cannot write file: " + path);
    }
    for (Index j = 0; j < data.dim(); ++j) out << "x" << j + 1 << ",";
    out << "y\n";
    for (Index i = 0; i < data.size(); ++i) {
        for (Index j = 0; j < data.dim(); ++j) {
            out << format_double(data.points()(i, j)) << ",";
        }
        out << format_double(data.observations()[i]) << "\n";
    }
}

MatrixXd read_points_csv(const std::string& path) {
    return read_csv(path, false).first;
}

void write_predictions_csv(const std::string& path,
                           const Eigen::Ref<const MatrixXd>& points,
                           const VectorXd& mean, const VectorXd& var) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidArgument("cannot write file: " + path);
    }
    for (Index j = 0; j < points.cols(); ++j) out << "x" << j + 1 << ",";
    out << "mean,variance\n";
    for (Index i = 0; i < points.rows(); ++i) {
        for (Index j = 0; j < points.cols(); ++j) {
            out << format_double(points(i, j)) << ",";
        }
        out << format_double(mean[i]) << "," << format_double(var[i]) << "\n";
    }
}

json to_json(const KrigingModel& model) {
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["type"] = "kriging";
    doc["beta"] = model.beta();
    doc["theta"] = vector_to_json(model.params().theta);
    doc["tau2"] = model.params().tau2;
    doc["nugget"] = model.params().nugget;
    doc["bounds"] = {{"lower", vector_to_json(model.bounds().lower())},
                     {"upper", vector_to_json(model.bounds().upper())}};
    json x = json::array();
    for (Index i = 0; i < model.training().size(); ++i) {
        x.push_back(vector_to_json(model.training().points().row(i).transpose()));
    }
    doc["X"] = std::move(x);
    doc["Y"] = vector_to_json(model.training().observations());
    return doc;
}

KrigingModel kriging_from_json(const json& doc) {
    if (doc.value("format_version", -1) != kModelFormatVersion) {
        throw InvalidArgument("model document: unsupported format_version");
    }
    const auto& x = doc.at("X");
    if (x.empty()) {
        throw InvalidArgument("model document: empty training set");
    }
    MatrixXd points(static_cast<Index>(x.size()),
                    static_cast<Index>(x.front().size()));
    for (Index i = 0; i < points.rows(); ++i) {
        points.row(i) = vector_from_json(x[static_cast<std::size_t>(i)]).transpose();
    }
    KernelParams params{vector_from_json(doc.at("theta")), doc.at("tau2").get<double>(),
                        doc.at("nugget").get<double>()};
    Bounds bounds(vector_from_json(doc.at("bounds").at("lower")),
                  vector_from_json(doc.at("bounds").at("upper")));
    return KrigingModel(Dataset(std::move(points), vector_from_json(doc.at("Y"))),
                        std::move(params), doc.at("beta").get<double>(),
                        std::move(bounds));
}

json to_json(const MultiFidelityModel& model) {
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["type"] = "multifidelity";
    doc["top_level"] = model.top_level();
    json layers = json::array();
    for (int t = 1; t <= model.top_level(); ++t) {
        json layer;
        layer["level"] = t;
        layer["label"] = model.label(t);
        layer["model"] = to_json(model.layer(t));
        layers.push_back(std::move(layer));
    }
    doc["layers"] = std::move(layers);
    return doc;
}

MultiFidelityModel multifidelity_from_json(const json& doc) {
    if (doc.value("type", "") != "multifidelity") {
        throw InvalidArgument("model document: expected type 'multifidelity'");
    }
    std::vector<KrigingModel> layers;
    std::vector<std::string> labels;
    for (const auto& layer : doc.at("layers")) {
        layers.push_back(kriging_from_json(layer.at("model")));
        labels.push_back(layer.value("label", ""));
    }
    return MultiFidelityModel(std::move(layers), std::move(labels));
}

void save_model(const std::string& path, const MultiFidelityModel& model) {
    write_json_file(path, to_json(model));
}

MultiFidelityModel load_model(const std::string& path) {
    return multifidelity_from_json(read_json_file(path));
}

MultiFidelityDataset read_bundle(const std::string& manifest_path) {
    const json doc = read_json_file(manifest_path);
    if (!doc.contains("levels") || !doc.at("levels").is_array() ||
        doc.at("levels").empty()) {
        throw InvalidArgument(manifest_path + ": manifest needs a nonempty 'levels' array");
    }
    const auto base = std::filesystem::path(manifest_path).parent_path();
    std::vector<std::pair<FidelityLevel, Dataset>> levels;
    for (const auto& entry : doc.at("levels")) {
        FidelityLevel level;
        level.t = entry.at("level").get<int>();
        level.label = entry.value("label", "level-" + std::to_string(level.t));
        const auto csv = std::filesystem::path(entry.at("csv").get<std::string>());
        const auto resolved = csv.is_absolute() ? csv : base / csv;
        levels.emplace_back(std::move(level), read_dataset_csv(resolved.string()));
    }
    return MultiFidelityDataset(std::move(levels));
}

EnvironmentDistribution env_from_json(const json& doc) {
    if (doc.value("distribution", "") != "uniform") {
        throw InvalidArgument("environment config: only 'uniform' is supported");
    }
    Bounds support(vector_from_json(doc.at("lower")), vector_from_json(doc.at("upper")));
    return EnvironmentDistribution::uniform(std::move(support),
                                            doc.value("description", ""));
}

json to_json(const EnvironmentDistribution& env) {
    json doc;
    doc["distribution"] = "uniform";
    doc["lower"] = vector_to_json(env.support().lower());
    doc["upper"] = vector_to_json(env.support().upper());
    doc["description"] = env.description();
    return doc;
}

EnvironmentDistribution read_env_config(const std::string& path) {
    return env_from_json(read_json_file(path));
}

json to_json(const ProbabilityEstimate& est, const EventSpec& spec) {
    json doc;
    doc["value"] = est.value;
    doc["n_samples"] = est.n_samples;
    doc["std_error"] = est.std_error;
    doc["seed"] = est.seed;
    if (std::isfinite(spec.gamma)) {
        doc["gamma"] = spec.gamma;
    } else {
        doc["gamma"] = spec.gamma > 0 ? "inf" : "-inf";
    }
    doc["direction"] = to_string(spec.direction);
    return doc;
}

json read_json_file(const std::string& path) {
    std::ifstream in = open_input(path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& err) {
        throw InvalidArgument(path + ": " + err.what());
    }
}

void write_json_file(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidArgument("cannot write file: " + path);
    }
    out << doc.dump(2) << "\n";
}

}  // namespace mfkrig
