#include "hsbnet/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hsbnet/rng.hpp"

namespace hsbnet {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config validation

struct Checker {
    const json& obj;
    std::string prefix;
    std::vector<std::string>& errors;
    std::vector<std::string> known;

    bool has(const std::string& key) {
        known.push_back(key);
        return obj.contains(key);
    }

    void number(const std::string& key, double& target, double lo, double hi,
                bool lo_open = false, bool hi_open = false) {
        if (!has(key)) return;
        const json& v = obj.at(key);
        if (!v.is_number()) {
            errors.push_back(prefix + key + ": expected a number");
            return;
        }
        const double x = v.get<double>();
        const bool below = lo_open ? x <= lo : x < lo;
        const bool above = hi_open ? x >= hi : x > hi;
        if (below || above) {
            std::ostringstream os;
            os << prefix << key << ": " << x << " outside " << (lo_open ? "(" : "[") << lo
               << ", " << hi << (hi_open ? ")" : "]");
            errors.push_back(os.str());
            return;
        }
        target = x;
    }

    void integer(const std::string& key, int& target, int lo, int hi) {
        if (!has(key)) return;
        const json& v = obj.at(key);
        if (!v.is_number_integer()) {
            errors.push_back(prefix + key + ": expected an integer");
            return;
        }
        const auto x = v.get<long long>();
        if (x < lo || x > hi) {
            std::ostringstream os;
            os << prefix << key << ": " << x << " outside [" << lo << ", " << hi << "]";
            errors.push_back(os.str());
            return;
        }
        target = static_cast<int>(x);
    }

    void boolean(const std::string& key, bool& target) {
        if (!has(key)) return;
        const json& v = obj.at(key);
        if (!v.is_boolean()) {
            errors.push_back(prefix + key + ": expected a boolean");
            return;
        }
        target = v.get<bool>();
    }

    void choice(const std::string& key, std::string& target, std::initializer_list<const char*> allowed) {
        if (!has(key)) return;
        const json& v = obj.at(key);
        if (!v.is_string()) {
            errors.push_back(prefix + key + ": expected a string");
            return;
        }
        const auto s = v.get<std::string>();
        for (const char* a : allowed) {
            if (s == a) {
                target = s;
                return;
            }
        }
        errors.push_back(prefix + key + ": '" + s + "' is not an allowed value");
    }

    void flag_unknown() {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (std::find(known.begin(), known.end(), it.key()) == known.end())
                errors.push_back(prefix + it.key() + ": unknown field");
        }
    }
};

void check_pathloss(const json& j, const std::string& prefix, PathLossConfig& pl,
                    std::vector<std::string>& errors) {
    Checker c{j, prefix, errors, {}};
    c.number("pl0_db", pl.pl0_db, 0.0, 300.0);
    c.number("exponent", pl.exponent, 1.0, 8.0);
    c.number("d0_m", pl.d0_m, 0.0, 100.0, /*lo_open=*/true);
    c.number("noise_dbm", pl.noise_dbm, -200.0, 0.0);
    c.number("interference_base_db", pl.interference_base_db, -50.0, 100.0);
    c.number("interference_per_mu_db", pl.interference_per_mu_db, 0.0, 10.0);
    c.flag_unknown();
}

void check_b2m(const json& j, const std::string& prefix, B2MConfig& b, std::vector<std::string>& errors) {
    Checker c{j, prefix, errors, {}};
    c.number("beta_min_msg_s", b.beta_min_msg_s, 0.0, 1e6, true);
    c.number("beta_max_msg_s", b.beta_max_msg_s, 0.0, 1e6, true);
    c.number("knee_min_bit_s", b.knee_min_bit_s, 0.0, 1e12, true);
    c.number("knee_max_bit_s", b.knee_max_bit_s, 0.0, 1e12, true);
    c.flag_unknown();
    if (b.beta_min_msg_s > b.beta_max_msg_s)
        errors.push_back(prefix + "beta_min_msg_s: exceeds beta_max_msg_s");
    if (b.knee_min_bit_s > b.knee_max_bit_s)
        errors.push_back(prefix + "knee_min_bit_s: exceeds knee_max_bit_s");
}

void check_solver(const json& j, const std::string& prefix, SolverConfig& s, std::vector<std::string>& errors) {
    Checker c{j, prefix, errors, {}};
    c.integer("max_iters", s.max_iters, 1, 1000000);
    c.number("stepsize0", s.stepsize0, 0.0, 1e9, true);
    c.boolean("stepsize_normalized", s.stepsize_normalized);
    c.number("convergence_tol", s.convergence_tol, 0.0, 1.0, true);
    c.number("eta0", s.eta0, 0.0, 1e12);
    c.flag_unknown();
}

// ---------------------------------------------------------------------------
// JSON <-> Eigen helpers

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return {};
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
    return v;
}

std::vector<std::string> parse_config(const json& raw, ScenarioConfig& cfg) {
    std::vector<std::string> errors;
    if (!raw.is_object()) {
        errors.push_back("config: expected a JSON object with the scenario fields");
        return errors;
    }
    Checker c{raw, "config.", errors, {}};
    c.integer("num_mus", cfg.num_mus, 0, 100000);
    c.integer("num_bss", cfg.num_bss, 1, 10000);
    c.number("deployment_radius_m", cfg.deployment_radius_m, 0.0, 1e6, true);
    c.choice("bs_placement", cfg.bs_placement, {"uniform", "ring"});
    c.number("bandwidth_budget_hz", cfg.bandwidth_budget_hz, 0.0, 1e12, true);
    c.number("slot_length_s", cfg.slot_length_s, 0.0, 10.0, true);
    c.integer("packet_bits", cfg.packet_bits, 1, 100000000);
    c.integer("buffer_size", cfg.buffer_size, 1, 100000);
    c.number("arrival_rate_pps", cfg.arrival_rate_pps, 0.0, 1e9, true);
    c.number("service_rate_match_pps", cfg.service_rate_match_pps, 0.0, 1e9, true);
    c.number("service_rate_mismatch_pps", cfg.service_rate_mismatch_pps, 0.0, 1e9, true);
    c.number("tau_min", cfg.tau_min, 0.0, 1.0, true);
    c.number("tau_max", cfg.tau_max, 0.0, 1.0, true);
    c.number("rate_min_low_msg_s", cfg.rate_min_low_msg_s, 0.0, 1e9);
    c.number("rate_min_high_msg_s", cfg.rate_min_high_msg_s, 0.0, 1e9);
    c.number("rho_min", cfg.rho_min, 0.0, 1.0, true, true);
    c.number("rho_max", cfg.rho_max, 0.0, 1.0, true, true);
    c.number("latency_cap_s", cfg.latency_cap_s, 0.0, 1e6, true);
    c.number("loss_cap", cfg.loss_cap, 0.0, 1.0, true, true);
    c.number("tx_power_dbm", cfg.tx_power_dbm, -100.0, 100.0);
    c.number("sinr_std_db", cfg.sinr_std_db, 0.0, 50.0);
    if (c.has("pathloss")) {
        if (raw.at("pathloss").is_object())
            check_pathloss(raw.at("pathloss"), "config.pathloss.", cfg.pathloss, errors);
        else
            errors.push_back("config.pathloss: expected an object");
    }
    if (c.has("b2m")) {
        if (raw.at("b2m").is_object())
            check_b2m(raw.at("b2m"), "config.b2m.", cfg.b2m, errors);
        else
            errors.push_back("config.b2m: expected an object");
    }
    if (c.has("solver")) {
        if (raw.at("solver").is_object())
            check_solver(raw.at("solver"), "config.solver.", cfg.solver, errors);
        else
            errors.push_back("config.solver: expected an object");
    }
    c.flag_unknown();
    if (cfg.tau_min > cfg.tau_max) errors.push_back("config.tau_min: exceeds tau_max");
    if (cfg.rho_min > cfg.rho_max) errors.push_back("config.rho_min: exceeds rho_max");
    if (cfg.rate_min_low_msg_s > cfg.rate_min_high_msg_s)
        errors.push_back("config.rate_min_low_msg_s: exceeds rate_min_high_msg_s");
    if (cfg.service_rate_match_pps <= cfg.service_rate_mismatch_pps)
        errors.push_back("config.service_rate_match_pps: must exceed service_rate_mismatch_pps");
    return errors;
}

}  // namespace

std::vector<std::string> config_diagnostics(const json& raw) {
    ScenarioConfig cfg;
    return parse_config(raw, cfg);
}

ScenarioConfig validate_config(const json& raw) {
    ScenarioConfig cfg;
    const auto errors = parse_config(raw, cfg);
    if (!errors.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json raw;
    try {
        in >> raw;
    } catch (const json::parse_error& e) {
        throw ConfigError("config: '" + path + "' is not valid JSON (" + e.what() +
                          "); required: a JSON object with the scenario fields");
    }
    return validate_config(raw);
}

json config_to_json(const ScenarioConfig& cfg) {
    return json{
        {"num_mus", cfg.num_mus},
        {"num_bss", cfg.num_bss},
        {"deployment_radius_m", cfg.deployment_radius_m},
        {"bs_placement", cfg.bs_placement},
        {"bandwidth_budget_hz", cfg.bandwidth_budget_hz},
        {"slot_length_s", cfg.slot_length_s},
        {"packet_bits", cfg.packet_bits},
        {"buffer_size", cfg.buffer_size},
        {"arrival_rate_pps", cfg.arrival_rate_pps},
        {"service_rate_match_pps", cfg.service_rate_match_pps},
        {"service_rate_mismatch_pps", cfg.service_rate_mismatch_pps},
        {"tau_min", cfg.tau_min},
        {"tau_max", cfg.tau_max},
        {"rate_min_low_msg_s", cfg.rate_min_low_msg_s},
        {"rate_min_high_msg_s", cfg.rate_min_high_msg_s},
        {"rho_min", cfg.rho_min},
        {"rho_max", cfg.rho_max},
        {"latency_cap_s", cfg.latency_cap_s},
        {"loss_cap", cfg.loss_cap},
        {"tx_power_dbm", cfg.tx_power_dbm},
        {"sinr_std_db", cfg.sinr_std_db},
        {"pathloss",
         {{"pl0_db", cfg.pathloss.pl0_db},
          {"exponent", cfg.pathloss.exponent},
          {"d0_m", cfg.pathloss.d0_m},
          {"noise_dbm", cfg.pathloss.noise_dbm},
          {"interference_base_db", cfg.pathloss.interference_base_db},
          {"interference_per_mu_db", cfg.pathloss.interference_per_mu_db}}},
        {"b2m",
         {{"beta_min_msg_s", cfg.b2m.beta_min_msg_s},
          {"beta_max_msg_s", cfg.b2m.beta_max_msg_s},
          {"knee_min_bit_s", cfg.b2m.knee_min_bit_s},
          {"knee_max_bit_s", cfg.b2m.knee_max_bit_s}}},
        {"solver",
         {{"max_iters", cfg.solver.max_iters},
          {"stepsize0", cfg.solver.stepsize0},
          {"stepsize_normalized", cfg.solver.stepsize_normalized},
          {"convergence_tol", cfg.solver.convergence_tol},
          {"eta0", cfg.solver.eta0}}},
    };
}

// ---------------------------------------------------------------------------
// SINR model

namespace {

double interference_db(const ScenarioConfig& cfg) {
    return cfg.pathloss.interference_base_db +
           cfg.pathloss.interference_per_mu_db * static_cast<double>(cfg.num_mus);
}

double sinr_from_distance(double dist_m, const ScenarioConfig& cfg) {
    const PathLossConfig& pl = cfg.pathloss;
    const double d = std::max(dist_m, pl.d0_m);
    const double path_loss = pl.pl0_db + 10.0 * pl.exponent * std::log10(d / pl.d0_m);
    return cfg.tx_power_dbm - path_loss - pl.noise_dbm - interference_db(cfg);
}

}  // namespace

double mean_sinr(int mu, int bs, const NetworkScenario& sc) {
    if (mu < 0 || mu >= sc.num_mus || bs < 0 || bs >= sc.num_bss)
        throw std::out_of_range("mean_sinr: index out of range");
    const double dist = (sc.mu_pos_m.col(mu) - sc.bs_pos_m.col(bs)).norm();
    return sinr_from_distance(dist, sc.config);
}

// ---------------------------------------------------------------------------
// Generation

NetworkScenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    const int U = cfg.num_mus;
    const int J = cfg.num_bss;
    const double R = cfg.deployment_radius_m;

    NetworkScenario sc;
    sc.num_mus = U;
    sc.num_bss = J;
    sc.config = cfg;
    sc.sinr_std_db = cfg.sinr_std_db;
    sc.slot_s = cfg.slot_length_s;
    sc.packet_bits = cfg.packet_bits;
    sc.buffer_size = cfg.buffer_size;
    sc.latency_cap_s = cfg.latency_cap_s;
    sc.loss_cap = cfg.loss_cap;

    auto disc_point = [&](double radius) {
        const double r = radius * std::sqrt(rng::uniform01(gen));
        const double phi = 2.0 * M_PI * rng::uniform01(gen);
        return Eigen::Vector2d(r * std::cos(phi), r * std::sin(phi));
    };

    sc.mu_pos_m.resize(2, U);
    for (int i = 0; i < U; ++i) sc.mu_pos_m.col(i) = disc_point(R);

    sc.bs_pos_m.resize(2, J);
    if (cfg.bs_placement == "ring") {
        // Jittered ring keeps BSs spread for coverage while staying random.
        for (int j = 0; j < J; ++j) {
            const double phi = 2.0 * M_PI * (static_cast<double>(j) + 0.3 * rng::uniform(gen, -1.0, 1.0)) /
                               static_cast<double>(J);
            const double r = 0.55 * R * (1.0 + 0.15 * rng::uniform(gen, -1.0, 1.0));
            sc.bs_pos_m.col(j) = Eigen::Vector2d(r * std::cos(phi), r * std::sin(phi));
        }
    } else {
        for (int j = 0; j < J; ++j) sc.bs_pos_m.col(j) = disc_point(R);
    }

    sc.bandwidth_hz = Eigen::VectorXd::Constant(J, cfg.bandwidth_budget_hz);
    sc.arrival_pps = Eigen::VectorXd::Constant(U, cfg.arrival_rate_pps);
    sc.mu_match_pps = Eigen::VectorXd::Constant(U, cfg.service_rate_match_pps);
    sc.mu_mismatch_pps = Eigen::VectorXd::Constant(U, cfg.service_rate_mismatch_pps);

    // Knowledge-matching degree, resampled per MU under the M/G/1 stability
    // precondition lambda * E[I] < 1.
    constexpr int kStabilityRetries = 100;
    sc.tau.resize(U);
    for (int i = 0; i < U; ++i) {
        bool ok = false;
        for (int attempt = 0; attempt < kStabilityRetries; ++attempt) {
            const double t = rng::uniform(gen, cfg.tau_min, cfg.tau_max);
            const double load = cfg.arrival_rate_pps *
                                mean_service_time(t, cfg.service_rate_match_pps, cfg.service_rate_mismatch_pps);
            if (load < 1.0) {
                sc.tau(i) = t;
                ok = true;
                break;
            }
        }
        if (!ok) {
            std::ostringstream os;
            os << "generate_scenario: MU " << i << " cannot satisfy lambda*E[I] < 1 within "
               << kStabilityRetries << " attempts (check arrival and service rates)";
            throw StabilityViolation(os.str());
        }
    }

    sc.rate_min_msg_s.resize(U);
    for (int i = 0; i < U; ++i)
        sc.rate_min_msg_s(i) = rng::uniform(gen, cfg.rate_min_low_msg_s, cfg.rate_min_high_msg_s);

    sc.rho.resize(U, J);
    for (int i = 0; i < U; ++i)
        for (int j = 0; j < J; ++j) sc.rho(i, j) = rng::uniform(gen, cfg.rho_min, cfg.rho_max);

    sc.b2m_beta_msg_s.resize(U, J);
    sc.b2m_knee_bit_s.resize(U, J);
    for (int i = 0; i < U; ++i) {
        for (int j = 0; j < J; ++j) {
            sc.b2m_beta_msg_s(i, j) = rng::uniform(gen, cfg.b2m.beta_min_msg_s, cfg.b2m.beta_max_msg_s);
            sc.b2m_knee_bit_s(i, j) = rng::uniform(gen, cfg.b2m.knee_min_bit_s, cfg.b2m.knee_max_bit_s);
        }
    }

    sc.mean_sinr_db.resize(U, J);
    for (int i = 0; i < U; ++i)
        for (int j = 0; j < J; ++j)
            sc.mean_sinr_db(i, j) =
                sinr_from_distance((sc.mu_pos_m.col(i) - sc.bs_pos_m.col(j)).norm(), cfg);

    return sc;
}

LinkParams link_params(const NetworkScenario& sc, int mu, int bs) {
    return LinkParams{
        .arrival_pps = sc.arrival_pps(mu),
        .tau = sc.tau(mu),
        .mu_match_pps = sc.mu_match_pps(mu),
        .mu_mismatch_pps = sc.mu_mismatch_pps(mu),
        .mean_sinr_db = sc.mean_sinr_db(mu, bs),
        .sinr_std_db = sc.sinr_std_db,
        .slot_s = sc.slot_s,
        .packet_bits = sc.packet_bits,
        .buffer_size = sc.buffer_size,
        .rho = sc.rho(mu, bs),
        .b2m = B2MSurrogateParams{sc.b2m_beta_msg_s(mu, bs), sc.b2m_knee_bit_s(mu, bs)},
    };
}

// ---------------------------------------------------------------------------
// Scenario JSON round trip

bool NetworkScenario::operator==(const NetworkScenario& other) const {
    return num_mus == other.num_mus && num_bss == other.num_bss && mu_pos_m == other.mu_pos_m &&
           bs_pos_m == other.bs_pos_m && bandwidth_hz == other.bandwidth_hz &&
           mean_sinr_db == other.mean_sinr_db && sinr_std_db == other.sinr_std_db &&
           slot_s == other.slot_s && packet_bits == other.packet_bits &&
           buffer_size == other.buffer_size && arrival_pps == other.arrival_pps &&
           tau == other.tau && mu_match_pps == other.mu_match_pps &&
           mu_mismatch_pps == other.mu_mismatch_pps && rate_min_msg_s == other.rate_min_msg_s &&
           rho == other.rho && b2m_beta_msg_s == other.b2m_beta_msg_s &&
           b2m_knee_bit_s == other.b2m_knee_bit_s && latency_cap_s == other.latency_cap_s &&
           loss_cap == other.loss_cap;
}

json scenario_to_json(const NetworkScenario& sc) {
    return json{
        {"num_mus", sc.num_mus},
        {"num_bss", sc.num_bss},
        {"mu_pos_m", matrix_to_json(sc.mu_pos_m)},
        {"bs_pos_m", matrix_to_json(sc.bs_pos_m)},
        {"bandwidth_hz", vector_to_json(sc.bandwidth_hz)},
        {"mean_sinr_db", matrix_to_json(sc.mean_sinr_db)},
        {"sinr_std_db", sc.sinr_std_db},
        {"slot_s", sc.slot_s},
        {"packet_bits", sc.packet_bits},
        {"buffer_size", sc.buffer_size},
        {"arrival_pps", vector_to_json(sc.arrival_pps)},
        {"tau", vector_to_json(sc.tau)},
        {"mu_match_pps", vector_to_json(sc.mu_match_pps)},
        {"mu_mismatch_pps", vector_to_json(sc.mu_mismatch_pps)},
        {"rate_min_msg_s", vector_to_json(sc.rate_min_msg_s)},
        {"rho", matrix_to_json(sc.rho)},
        {"b2m_beta_msg_s", matrix_to_json(sc.b2m_beta_msg_s)},
        {"b2m_knee_bit_s", matrix_to_json(sc.b2m_knee_bit_s)},
        {"latency_cap_s", sc.latency_cap_s},
        {"loss_cap", sc.loss_cap},
        {"config", config_to_json(sc.config)},
    };
}

NetworkScenario scenario_from_json(const json& j) {
    NetworkScenario sc;
    sc.num_mus = j.at("num_mus").get<int>();
    sc.num_bss = j.at("num_bss").get<int>();
    sc.mu_pos_m = matrix_from_json(j.at("mu_pos_m"));
    sc.bs_pos_m = matrix_from_json(j.at("bs_pos_m"));
    sc.bandwidth_hz = vector_from_json(j.at("bandwidth_hz"));
    sc.mean_sinr_db = matrix_from_json(j.at("mean_sinr_db"));
    sc.sinr_std_db = j.at("sinr_std_db").get<double>();
    sc.slot_s = j.at("slot_s").get<double>();
    sc.packet_bits = j.at("packet_bits").get<int>();
    sc.buffer_size = j.at("buffer_size").get<int>();
    sc.arrival_pps = vector_from_json(j.at("arrival_pps"));
    sc.tau = vector_from_json(j.at("tau"));
    sc.mu_match_pps = vector_from_json(j.at("mu_match_pps"));
    sc.mu_mismatch_pps = vector_from_json(j.at("mu_mismatch_pps"));
    sc.rate_min_msg_s = vector_from_json(j.at("rate_min_msg_s"));
    sc.rho = matrix_from_json(j.at("rho"));
    sc.b2m_beta_msg_s = matrix_from_json(j.at("b2m_beta_msg_s"));
    sc.b2m_knee_bit_s = matrix_from_json(j.at("b2m_knee_bit_s"));
    sc.latency_cap_s = j.at("latency_cap_s").get<double>();
    sc.loss_cap = j.at("loss_cap").get<double>();
    sc.config = validate_config(j.at("config"));
    return sc;
}

}  // namespace hsbnet
