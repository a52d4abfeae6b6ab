// Command-line experiment runner.
//
//   pcgp run CONFIG [--set key=value]... [--seed N] [--budget N] [--log-dir DIR]
//   pcgp sweep CONFIG --trials N [--seed N] [--out FILE]
//   pcgp export-dot GENOME CONFIG [-o FILE]
//   pcgp validate CONFIG...
//
// CONFIG is a path or the name of a shipped preset (e.g. e4, e1_classification).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcgp.hpp"

namespace fs = std::filesystem;

namespace {

std::string resolve_config(const std::string& arg) {
    if (fs::exists(arg)) return arg;
    const auto preset = pcgp::preset_dir() / (arg + ".json");
    if (fs::exists(preset)) return preset.string();
    throw pcgp::ConfigError("no config file or preset named '" + arg + "'");
}

struct RunOptions {
    std::string config;
    std::vector<std::string> overrides;
    std::string problem;
    std::string data;
    std::string log_dir;
    long long seed = -1;
    long long budget = -1;
    long long threads = -1;
};

std::vector<std::string> collect_overrides(const RunOptions& o) {
    auto out = o.overrides;
    if (o.seed >= 0) out.push_back("seed=" + std::to_string(o.seed));
    if (o.budget >= 0) out.push_back("budget=" + std::to_string(o.budget));
    if (o.threads >= 0) out.push_back("threads=" + std::to_string(o.threads));
    return out;
}

pcgp::RunConfig load(const RunOptions& o) {
    const auto path = resolve_config(o.config);
    auto doc = pcgp::read_json_file(path);
    for (const auto& ov : collect_overrides(o)) pcgp::apply_override(doc, ov);
    if (!o.problem.empty()) doc["problem"]["type"] = o.problem;
    if (!o.data.empty())
        doc["problem"]["path"] = o.data;
    else
        pcgp::resolve_data_path(doc, path);
    return pcgp::parse_config(doc);
}

int cmd_run(const RunOptions& o) {
    const auto cfg = load(o);
    const auto exp = pcgp::prepare(cfg);
    std::string dir = o.log_dir;
    if (dir.empty())
        if (const char* env = std::getenv("PCGP_LOG_DIR")) dir = env;
    if (dir.empty()) dir = ".";
    fs::create_directories(dir);
    const std::string stem = cfg.name + "_s" + std::to_string(cfg.params.seed);
    const auto log_path = fs::path(dir) / (stem + ".csv");
    const auto best_path = fs::path(dir) / (stem + "_best.json");

    std::ofstream log(log_path, std::ios::binary);
    if (!log) throw pcgp::ConfigError("cannot write log '" + log_path.string() + "'");
    const auto result = pcgp::run_experiment(exp, &log);
    std::ofstream best(best_path, std::ios::binary);
    best << pcgp::serialize(result.best);

    std::cout << "log " << log_path.string() << "\n"
              << "best_genome " << best_path.string() << "\n"
              << "evaluations " << (result.log.empty() ? 0 : result.log.back().evaluations) << "\n"
              << "best_fitness " << pcgp::format_real(result.best_fitness) << "\n";
    return 0;
}

int cmd_sweep(const RunOptions& o, std::size_t trials, std::uint64_t sweep_seed, const std::string& out,
              std::size_t workers) {
    const auto cfg = load(o);
    const auto results = pcgp::sweep(cfg, trials, sweep_seed, workers);
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!out.empty()) {
        file.open(out, std::ios::binary);
        if (!file) throw pcgp::ConfigError("cannot write '" + out + "'");
        os = &file;
    }
    pcgp::write_sweep_csv(*os, results);
    if (!results.empty()) std::cerr << "best trial " << results.front().trial << " fitness "
                                    << pcgp::format_real(results.front().fitness) << "\n";
    return 0;
}

int cmd_export_dot(const std::string& genome_path, const RunOptions& o, const std::string& out) {
    std::ifstream in(genome_path);
    if (!in) throw pcgp::ParseError("cannot open genome '" + genome_path + "'");
    std::stringstream text;
    text << in.rdbuf();
    const auto genome = pcgp::deserialize(text.str());
    const auto cfg = load(o);
    const auto fset = pcgp::FunctionSet::from_names(cfg.functions);
    pcgp::check(cfg.params.decode, genome.mode());
    const auto graph = pcgp::decode(genome, cfg.params.decode, fset);
    const auto dot = pcgp::to_dot(genome, graph, fset, cfg.params.decode);
    if (out.empty() || out == "-") {
        std::cout << dot;
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw pcgp::ConfigError("cannot write '" + out + "'");
        f << dot;
    }
    return 0;
}

int cmd_validate(const std::vector<std::string>& configs) {
    int failures = 0;
    for (const auto& c : configs) {
        try {
            RunOptions o;
            o.config = c;
            load(o);
            std::cout << "ok " << c << "\n";
        } catch (const std::exception& e) {
            std::cout << "invalid " << c << ": " << e.what() << "\n";
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cartesian and positional Cartesian genetic programming experiments"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "run one evolution and write its log and best genome");
    run->add_option("config", run_opts.config, "config file or preset name")->required();
    run->add_option("--set", run_opts.overrides, "override a top-level config key (key=value)");
    run->add_option("--seed", run_opts.seed, "random seed");
    run->add_option("--budget", run_opts.budget, "fitness evaluation budget");
    run->add_option("--threads", run_opts.threads, "evaluation threads");
    run->add_option("--problem", run_opts.problem, "polynomial, classification, regression or cartpole");
    run->add_option("--data", run_opts.data, "dataset CSV for classification/regression");
    run->add_option("--log-dir", run_opts.log_dir, "output directory (default $PCGP_LOG_DIR or .)");

    RunOptions sweep_opts;
    std::size_t trials = 0;
    std::uint64_t sweep_seed = 0;
    std::size_t sweep_workers = 1;
    std::string sweep_out;
    auto* sw = app.add_subcommand("sweep", "random search over the parameter ranges");
    sw->add_option("config", sweep_opts.config, "base config file or preset name")->required();
    sw->add_option("--trials", trials, "number of sampled parameter sets")->required();
    sw->add_option("--sweep-seed", sweep_seed, "seed for parameter sampling");
    sw->add_option("--set", sweep_opts.overrides, "override a top-level config key (key=value)");
    sw->add_option("--seed", sweep_opts.seed, "inner evolution seed shared by all trials");
    sw->add_option("--budget", sweep_opts.budget, "evaluation budget per trial");
    sw->add_option("--problem", sweep_opts.problem, "problem type");
    sw->add_option("--data", sweep_opts.data, "dataset CSV");
    sw->add_option("--workers", sweep_workers, "trials run concurrently");
    sw->add_option("-o,--out", sweep_out, "ranked results CSV (default stdout)");

    RunOptions dot_opts;
    std::string genome_path, dot_out;
    auto* dot = app.add_subcommand("export-dot", "render a genome as a Graphviz digraph");
    dot->add_option("genome", genome_path, "genome JSON")->required();
    dot->add_option("config", dot_opts.config, "config file or preset giving decode settings")->required();
    dot->add_option("-o,--out", dot_out, "output file (default stdout)");

    std::vector<std::string> to_validate;
    auto* val = app.add_subcommand("validate", "check config files against the schema and ranges");
    val->add_option("configs", to_validate, "config files or preset names")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_opts);
        if (*sw) return cmd_sweep(sweep_opts, trials, sweep_seed, sweep_out, sweep_workers);
        if (*dot) return cmd_export_dot(genome_path, dot_opts, dot_out);
        if (*val) return cmd_validate(to_validate);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
