#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hsbnet/experiments.hpp"
#include "hsbnet/format.hpp"
#include "hsbnet/thresholds.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitInfeasible = 2;

hsbnet::ScenarioConfig load_or_default(const std::string& path) {
    if (path.empty()) return {};
    return hsbnet::load_config_file(path);
}

void write_file(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

std::vector<hsbnet::Scheme> parse_schemes_arg(const std::string& arg) {
    if (arg == "all") return hsbnet::all_schemes();
    std::vector<hsbnet::Scheme> schemes;
    std::string token;
    std::istringstream is(arg);
    while (std::getline(is, token, ',')) {
        const auto s = hsbnet::parse_scheme(token);
        if (!s) throw hsbnet::ConfigError("unknown scheme '" + token + "'");
        schemes.push_back(*s);
    }
    if (schemes.empty()) throw hsbnet::ConfigError("no schemes given");
    return schemes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HSB-Net analytic queueing and resource-management toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, scheme_arg = "proposed", axis_arg = "num_bs";
    std::string schemes_arg = "all";
    std::uint64_t seed = 1;
    double from = 8, to = 13, step = 1;
    int n_seeds = 5;
    std::uint64_t seed_base = 1;
    long packets = 1000000, slots = 1000000;
    bool emit_thresholds = false;

    std::string trace_path;
    auto* run_cmd = app.add_subcommand("run", "Run one scheme on one scenario");
    run_cmd->add_option("--config", config_path, "Scenario config JSON (defaults when absent)");
    run_cmd->add_option("--scheme", scheme_arg, "proposed | maxsinr+ms{1,2}+ba{1,2}");
    run_cmd->add_option("--seed", seed, "Scenario seed");
    run_cmd->add_option("--out", out_path, "Per-MU CSV output path ('-' for stdout)");
    run_cmd->add_flag("--thresholds", emit_thresholds, "Also emit the threshold table CSV next to --out");
    run_cmd->add_option("--trace", trace_path, "Write the multiplier convergence trace CSV (proposed only)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Throughput sweep along one axis");
    sweep_cmd->add_option("--config", config_path, "Base config JSON");
    sweep_cmd->add_option("--axis", axis_arg, "num_bs | num_mus | tau_mean");
    sweep_cmd->add_option("--from", from, "First axis value")->required();
    sweep_cmd->add_option("--to", to, "Last axis value")->required();
    sweep_cmd->add_option("--step", step, "Axis increment");
    sweep_cmd->add_option("--schemes", schemes_arg, "'all' or comma-separated scheme ids");
    sweep_cmd->add_option("--seeds", n_seeds, "Number of seeds per axis value");
    sweep_cmd->add_option("--seed-base", seed_base, "First seed");
    sweep_cmd->add_option("--out", out_path, "CSV output path ('-' for stdout)");

    auto* validate_cmd = app.add_subcommand("validate-queue", "Analytic vs Monte Carlo tables");
    validate_cmd->add_option("--packets", packets, "M/G/1 simulation length");
    validate_cmd->add_option("--slots", slots, "Buffered-queue simulation length");
    validate_cmd->add_option("--seed", seed, "Simulation seed");

    auto* cdf_cmd = app.add_subcommand("cdf", "Per-link message-rate CDF of one run");
    cdf_cmd->add_option("--config", config_path, "Scenario config JSON");
    cdf_cmd->add_option("--scheme", scheme_arg, "Scheme id");
    cdf_cmd->add_option("--seed", seed, "Scenario seed");
    cdf_cmd->add_option("--out", out_path, "CSV output path ('-' for stdout)");

    auto* defaults_cmd = app.add_subcommand("default-config", "Print the built-in config JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (defaults_cmd->parsed()) {
            std::cout << hsbnet::config_to_json(hsbnet::ScenarioConfig{}).dump(2) << "\n";
            return kExitOk;
        }

        const hsbnet::ScenarioConfig cfg = load_or_default(config_path);

        if (run_cmd->parsed()) {
            const auto scheme = hsbnet::parse_scheme(scheme_arg);
            if (!scheme) throw hsbnet::ConfigError("unknown scheme '" + scheme_arg + "'");
            const hsbnet::NetworkScenario sc = hsbnet::generate_scenario(cfg, seed);
            const hsbnet::ThresholdTable tt = hsbnet::all_thresholds(sc);
            hsbnet::RunResult result = hsbnet::run_scheme(*scheme, sc, &tt);
            result.seed = seed;
            write_file(out_path, hsbnet::run_to_csv(result));
            if (emit_thresholds && !out_path.empty() && out_path != "-")
                write_file(out_path + ".thresholds.csv", hsbnet::thresholds_to_csv(tt));
            if (!trace_path.empty()) write_file(trace_path, hsbnet::dual_trace_to_csv(result.dual));
            std::cerr << "scheme=" << hsbnet::scheme_id(*scheme) << " seed=" << seed
                      << " throughput_msg_s=" << hsbnet::fmt9(result.total_throughput_msg_s)
                      << " audit=" << (result.audit.all_ok() ? "ok" : "violated")
                      << " wall_ms=" << hsbnet::fmt9(result.wall_ms) << "\n";
            if (!result.dropped_mus.empty()) {
                std::cerr << "infeasible: " << result.dropped_mus.size()
                          << " MU(s) could not be placed\n";
                return kExitInfeasible;
            }
            return kExitOk;
        }

        if (sweep_cmd->parsed()) {
            const auto axis = hsbnet::parse_axis(axis_arg);
            if (!axis) throw hsbnet::ConfigError("unknown axis '" + axis_arg + "'");
            if (step <= 0) throw hsbnet::ConfigError("--step must be positive");
            std::vector<double> values;
            for (double v = from; v <= to + 1e-12; v += step) values.push_back(v);
            std::vector<std::uint64_t> seeds;
            for (int k = 0; k < n_seeds; ++k) seeds.push_back(seed_base + static_cast<std::uint64_t>(k));
            const auto rows = hsbnet::sweep(*axis, values, parse_schemes_arg(schemes_arg), seeds, cfg);
            write_file(out_path, hsbnet::sweep_to_csv(rows));
            return kExitOk;
        }

        if (validate_cmd->parsed()) {
            const auto rows = hsbnet::validate_queue(packets, slots, seed);
            std::cout << hsbnet::validation_to_text(rows);
            for (const auto& r : rows)
                if (!r.ok) return kExitInfeasible;
            return kExitOk;
        }

        if (cdf_cmd->parsed()) {
            const auto scheme = hsbnet::parse_scheme(scheme_arg);
            if (!scheme) throw hsbnet::ConfigError("unknown scheme '" + scheme_arg + "'");
            const hsbnet::RunResult result = hsbnet::run(*scheme, cfg, seed);
            write_file(out_path, hsbnet::cdf_to_csv(hsbnet::rate_cdf(result)));
            return kExitOk;
        }
    } catch (const hsbnet::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const hsbnet::NoFeasibleLink& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const hsbnet::InfeasibleBudget& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const hsbnet::StabilityViolation& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitOk;
}
