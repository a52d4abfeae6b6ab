#pragma once

/// @file bench.hpp
/// Fitness functions: CSV-backed classification and regression, a synthetic
/// polynomial regression task, and cart-pole balancing. All are maximised.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pcgp/decode.hpp"
#include "pcgp/error.hpp"
#include "pcgp/execute.hpp"
#include "pcgp/functions.hpp"
#include "pcgp/genome.hpp"
#include "pcgp/rng.hpp"

namespace pcgp {

enum class Task { classification, regression };

inline std::string_view to_string(Task t) { return t == Task::classification ? "classification" : "regression"; }

/// Rows of features min-max scaled to [0,1] per column, plus targets. For
/// classification `labels` holds class indices and `class_names` their
/// original spelling in first-appearance order; for regression `values`
/// holds the real targets.
struct Dataset {
    Task task = Task::regression;
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> features;
    std::vector<std::size_t> labels;
    std::vector<std::string> class_names;
    std::vector<double> values;
    std::vector<double> column_min;
    std::vector<double> column_max;
    bool scaled = true; // false: features are used as given

    std::size_t rows() const { return features.size(); }
    std::size_t n_features() const { return column_min.size(); }
    std::size_t n_outputs() const { return task == Task::classification ? class_names.size() : 1; }

    /// Applies this dataset's scaling to a raw feature row.
    std::vector<double> scale(std::span<const double> raw) const {
        if (!scaled) return {raw.begin(), raw.end()};
        std::vector<double> out(raw.size());
        for (std::size_t j = 0; j < raw.size(); ++j) {
            const double span = column_max[j] - column_min[j];
            out[j] = span > 0.0 ? std::clamp((raw[j] - column_min[j]) / span, 0.0, 1.0) : 0.5;
        }
        return out;
    }
};

namespace detail {

inline void fit_scaling(Dataset& d, const std::vector<std::vector<double>>& raw, std::size_t n_features) {
    d.column_min.assign(n_features, 0.0);
    d.column_max.assign(n_features, 0.0);
    for (std::size_t j = 0; j < n_features; ++j) {
        double lo = raw.empty() ? 0.0 : raw[0][j], hi = lo;
        for (const auto& row : raw) {
            lo = std::min(lo, row[j]);
            hi = std::max(hi, row[j]);
        }
        d.column_min[j] = lo;
        d.column_max[j] = hi;
    }
    d.features.clear();
    for (const auto& row : raw) d.features.push_back(d.scale(row));
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    try {
        std::size_t used = 0;
        out = std::stod(s, &used);
        return used == s.size() && std::isfinite(out);
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace detail

/// Regression dataset from raw feature rows and targets (features get scaled).
inline Dataset make_regression_dataset(const std::vector<std::vector<double>>& raw, std::vector<double> targets) {
    if (raw.size() != targets.size()) throw DatasetError("feature and target row counts differ");
    const std::size_t n = raw.empty() ? 0 : raw[0].size();
    for (const auto& r : raw)
        if (r.size() != n) throw DatasetError("feature rows differ in length");
    Dataset d;
    d.task = Task::regression;
    for (std::size_t j = 0; j < n; ++j) d.feature_names.push_back("x" + std::to_string(j));
    detail::fit_scaling(d, raw, n);
    d.values = std::move(targets);
    return d;
}

/// Classification dataset from raw rows and string labels.
inline Dataset make_classification_dataset(const std::vector<std::vector<double>>& raw,
                                           const std::vector<std::string>& labels) {
    if (raw.size() != labels.size()) throw DatasetError("feature and label row counts differ");
    const std::size_t n = raw.empty() ? 0 : raw[0].size();
    Dataset d;
    d.task = Task::classification;
    for (std::size_t j = 0; j < n; ++j) d.feature_names.push_back("x" + std::to_string(j));
    detail::fit_scaling(d, raw, n);
    for (const auto& l : labels) {
        auto it = std::find(d.class_names.begin(), d.class_names.end(), l);
        d.labels.push_back(static_cast<std::size_t>(it - d.class_names.begin()));
        if (it == d.class_names.end()) d.class_names.push_back(l);
    }
    return d;
}

/// Reads a CSV with a header row; the last column is the target.
inline Dataset load_csv(std::istream& in, Task task, std::string_view source = "<stream>") {
    const std::string where(source);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) header = detail::split_csv_line(line);
    }
    if (header.empty()) throw DatasetError(where + ": empty file");
    if (header.size() < 2) throw DatasetError(where + ": need at least one feature column and a target column");

    const std::size_t n_features = header.size() - 1;
    std::vector<std::vector<double>> raw;
    std::vector<std::string> labels;
    std::vector<double> targets;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw DatasetError(where + ": row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                               " columns, header has " + std::to_string(header.size()));
        std::vector<double> row(n_features);
        for (std::size_t j = 0; j < n_features; ++j)
            if (!detail::parse_double(cells[j], row[j]))
                throw DatasetError(where + ": row " + std::to_string(line_no) + ", column '" + header[j] +
                                   "': non-numeric or missing value '" + cells[j] + "'");
        if (task == Task::classification) {
            if (cells.back().empty())
                throw DatasetError(where + ": row " + std::to_string(line_no) + " has an empty label");
            labels.push_back(cells.back());
        } else {
            double t = 0.0;
            if (!detail::parse_double(cells.back(), t))
                throw DatasetError(where + ": row " + std::to_string(line_no) + ": non-numeric target '" +
                                   cells.back() + "'");
            targets.push_back(t);
        }
        raw.push_back(std::move(row));
    }
    if (raw.empty()) throw DatasetError(where + ": no data rows");

    Dataset d = task == Task::classification ? make_classification_dataset(raw, labels)
                                             : make_regression_dataset(raw, std::move(targets));
    d.feature_names.assign(header.begin(), header.end() - 1);
    return d;
}

inline Dataset load_csv(const std::string& path, Task task) {
    std::ifstream in(path);
    if (!in) throw DatasetError("cannot open dataset '" + path + "'");
    return load_csv(in, task, path);
}

/// f(x) = x^2 + 2x on `points` evenly spaced x in [-1, 1]. x is fed unscaled.
inline Dataset polynomial_dataset(std::size_t points = 50) {
    std::vector<std::vector<double>> raw;
    std::vector<double> y;
    for (std::size_t i = 0; i < points; ++i) {
        const double x = points == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(points - 1);
        raw.push_back({x});
        y.push_back(x * x + 2.0 * x);
    }
    auto d = make_regression_dataset(raw, std::move(y));
    d.scaled = false; // the target is defined on x itself
    d.features = std::move(raw);
    return d;
}

namespace detail {

inline void require_shape(const Genome& g, std::size_t n_in, std::size_t n_out, std::string_view what) {
    if (g.n_in() != n_in || g.n_out() != n_out)
        throw ConfigError(std::string(what) + " needs a genome with " + std::to_string(n_in) + " inputs and " +
                          std::to_string(n_out) + " outputs, got " + std::to_string(g.n_in()) + "/" +
                          std::to_string(g.n_out()));
}

} // namespace detail

/// Accuracy in [0,1]: predicted class is the argmax output (ties to the lowest
/// index). State is reset once, then rows run in file order.
inline double classification_fitness(const Genome& g, const Dataset& d, const DecodeSettings& s,
                                     const FunctionSet& fset) {
    if (d.task != Task::classification) throw ConfigError("dataset is not a classification dataset");
    if (d.rows() == 0) throw DatasetError("empty dataset");
    detail::require_shape(g, d.n_features(), d.n_outputs(), "classification");
    Program prog(g, s, fset);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        const auto out = prog.step(d.features[i]);
        const auto pred = static_cast<std::size_t>(std::max_element(out.begin(), out.end()) - out.begin());
        if (pred == d.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(d.rows());
}

inline double mean_squared_error(const Genome& g, const Dataset& d, const DecodeSettings& s, const FunctionSet& fset) {
    if (d.task != Task::regression) throw ConfigError("dataset is not a regression dataset");
    if (d.rows() == 0) throw DatasetError("empty dataset");
    detail::require_shape(g, d.n_features(), 1, "regression");
    Program prog(g, s, fset);
    double sum = 0.0;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        const double err = prog.step(d.features[i])[0] - d.values[i];
        sum += err * err;
    }
    return sum / static_cast<double>(d.rows());
}

/// -MSE; 0 is a perfect fit.
inline double regression_fitness(const Genome& g, const Dataset& d, const DecodeSettings& s, const FunctionSet& fset) {
    return -mean_squared_error(g, d, s, fset);
}

// ---------------------------------------------------------------------------
// Cart-pole

struct CartPoleState {
    double x = 0.0;
    double x_dot = 0.0;
    double theta = 0.0;
    double theta_dot = 0.0;
};

/// Classic cart-pole with explicit Euler integration.
struct CartPole {
    static constexpr double gravity = 9.8;
    static constexpr double cart_mass = 1.0;
    static constexpr double pole_mass = 0.1;
    static constexpr double half_length = 0.5;
    static constexpr double force_mag = 10.0;
    static constexpr double tau = 0.02;
    static constexpr double theta_limit = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
    static constexpr double x_limit = 2.4;

    CartPoleState state;

    /// Pushes right for action > 0, left otherwise.
    void step(double action) {
        const double force = action > 0.0 ? force_mag : -force_mag;
        const double total_mass = cart_mass + pole_mass;
        const double pm_length = pole_mass * half_length;
        const double cos_t = std::cos(state.theta);
        const double sin_t = std::sin(state.theta);
        const double temp = (force + pm_length * state.theta_dot * state.theta_dot * sin_t) / total_mass;
        const double theta_acc = (gravity * sin_t - cos_t * temp) /
                                 (half_length * (4.0 / 3.0 - pole_mass * cos_t * cos_t / total_mass));
        const double x_acc = temp - pm_length * theta_acc * cos_t / total_mass;
        state.x += tau * state.x_dot;
        state.x_dot += tau * x_acc;
        state.theta += tau * state.theta_dot;
        state.theta_dot += tau * theta_acc;
    }

    bool failed() const { return std::abs(state.theta) > theta_limit || std::abs(state.x) > x_limit; }
};

struct CartPoleTask {
    std::size_t episode_len = 500;
    std::uint64_t seed = 0; // initial state: each variable uniform in [-0.05, 0.05)
};

inline CartPoleState cartpole_initial_state(std::uint64_t seed) {
    Rng rng(derive_seed(seed, {0xca27}));
    CartPoleState s;
    s.x = rng.uniform(-0.05, 0.05);
    s.x_dot = rng.uniform(-0.05, 0.05);
    s.theta = rng.uniform(-0.05, 0.05);
    s.theta_dot = rng.uniform(-0.05, 0.05);
    return s;
}

/// Survived steps / episode_len. The program sees the raw state
/// (x, x_dot, theta, theta_dot) and its single output picks the push direction.
inline double cartpole_fitness(const Genome& g, const DecodeSettings& s, const FunctionSet& fset,
                               const CartPoleTask& task = {}) {
    detail::require_shape(g, 4, 1, "cart-pole");
    if (task.episode_len == 0) throw ConfigError("cart-pole episode length must be positive");
    Program prog(g, s, fset);
    CartPole env{cartpole_initial_state(task.seed)};
    std::size_t survived = 0;
    for (; survived < task.episode_len; ++survived) {
        const std::array<double, 4> obs = {env.state.x, env.state.x_dot, env.state.theta, env.state.theta_dot};
        env.step(prog.step(obs)[0]);
        if (env.failed()) break;
    }
    return static_cast<double>(survived) / static_cast<double>(task.episode_len);
}

} // namespace pcgp
