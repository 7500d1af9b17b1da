#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hsbnet/b2m.hpp"
#include "hsbnet/common.hpp"

namespace hsbnet {

struct PathLossConfig {
    double pl0_db = 38.0;      // reference loss at d0
    double exponent = 3.5;     // log-distance exponent
    double d0_m = 1.0;         // reference distance; distances are floored here
    double noise_dbm = -104.0;
    // Aggregate interference seen on the uplink; a function of the MU count
    // only, never of the BS count.
    double interference_base_db = 0.0;
    double interference_per_mu_db = 0.0;
};

struct B2MConfig {
    double beta_min_msg_s = 50.0;
    double beta_max_msg_s = 150.0;
    double knee_min_bit_s = 5e5;
    double knee_max_bit_s = 2e6;
};

struct SolverConfig {
    int max_iters = 500;
    double stepsize0 = 1e-6;          // epsilon(l) = stepsize0 / l
    bool stepsize_normalized = false; // epsilon(l) = stepsize0 / (l * max_j Z_j)
    double convergence_tol = 1e-6;    // on the relative multiplier change
    double eta0 = 0.0;                // initial multiplier value
};

struct ScenarioConfig {
    int num_mus = 200;
    int num_bss = 10;
    double deployment_radius_m = 300.0;
    std::string bs_placement = "uniform";  // "uniform" | "ring"
    double bandwidth_budget_hz = 15e6;
    double slot_length_s = 1e-3;
    int packet_bits = 800;
    int buffer_size = 20;
    double arrival_rate_pps = 1000.0;
    double service_rate_match_pps = 1250.0;    // 1 / (8e-4 s/packet)
    double service_rate_mismatch_pps = 1000.0; // 1 / (1e-3 s/packet)
    double tau_min = 0.6;
    double tau_max = 1.0;
    double rate_min_low_msg_s = 50.0;
    double rate_min_high_msg_s = 100.0;
    double rho_min = 2e-5;
    double rho_max = 2e-4;
    double latency_cap_s = 0.02;
    double loss_cap = 0.01;
    double tx_power_dbm = 20.0;
    double sinr_std_db = 4.0;
    PathLossConfig pathloss;
    B2MConfig b2m;
    SolverConfig solver;
};

/// Immutable description of one network instance: topology, channel
/// statistics, queue parameters and QoS targets.
struct NetworkScenario {
    int num_mus = 0;
    int num_bss = 0;
    Eigen::Matrix2Xd mu_pos_m;  // 2 x U
    Eigen::Matrix2Xd bs_pos_m;  // 2 x J
    Eigen::VectorXd bandwidth_hz;       // J
    Eigen::MatrixXd mean_sinr_db;       // U x J
    double sinr_std_db = 4.0;
    double slot_s = 1e-3;
    int packet_bits = 800;
    int buffer_size = 20;
    Eigen::VectorXd arrival_pps;        // U
    Eigen::VectorXd tau;                // U
    Eigen::VectorXd mu_match_pps;       // U
    Eigen::VectorXd mu_mismatch_pps;    // U
    Eigen::VectorXd rate_min_msg_s;     // U
    Eigen::MatrixXd rho;                // U x J
    Eigen::MatrixXd b2m_beta_msg_s;     // U x J
    Eigen::MatrixXd b2m_knee_bit_s;     // U x J
    double latency_cap_s = 0.02;
    double loss_cap = 0.01;
    ScenarioConfig config;  // retained for the solver and sweeps

    bool operator==(const NetworkScenario& other) const;
};

/// Everything the queueing engine needs about one (MU, BS) pair.
struct LinkParams {
    double arrival_pps;
    double tau;
    double mu_match_pps;
    double mu_mismatch_pps;
    double mean_sinr_db;
    double sinr_std_db;
    double slot_s;
    int packet_bits;
    int buffer_size;
    double rho;
    B2MSurrogateParams b2m;
};

LinkParams link_params(const NetworkScenario& sc, int mu, int bs);

/// Mean semantic-coding time E[I] = tau/mu_match + (1-tau)/mu_mismatch.
inline double mean_service_time(double tau, double mu_match, double mu_mismatch) {
    return tau / mu_match + (1.0 - tau) / mu_mismatch;
}

/// Collects every schema violation ("path: problem"); empty means valid.
std::vector<std::string> config_diagnostics(const nlohmann::json& raw);

/// Parses and range-checks a raw JSON config, filling defaults for absent
/// fields. Throws ConfigError listing every offending field.
ScenarioConfig validate_config(const nlohmann::json& raw);

ScenarioConfig load_config_file(const std::string& path);

nlohmann::json config_to_json(const ScenarioConfig& cfg);

/// Mean uplink SINR in dB from the log-distance path-loss law. Distance is
/// floored at d0. The interference term grows with the MU count only.
double mean_sinr(int mu, int bs, const NetworkScenario& sc);

/// Deterministic scenario construction from (config, seed).
/// Throws StabilityViolation if a MU cannot be sampled inside the M/G/1
/// stability region within the retry cap.
NetworkScenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

nlohmann::json scenario_to_json(const NetworkScenario& sc);
NetworkScenario scenario_from_json(const nlohmann::json& j);

}  // namespace hsbnet
