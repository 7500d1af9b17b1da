#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hsbnet/dual_solver.hpp"
#include "hsbnet/scenario.hpp"
#include "hsbnet/thresholds.hpp"

namespace hsbnet {

enum class Scheme {
    Proposed,        // dual UA/MS + KKT BA
    MaxSinrMs1Ba1,   // max-SINR UA, matching-degree MS, water-filling BA
    MaxSinrMs1Ba2,   // max-SINR UA, matching-degree MS, even BA
    MaxSinrMs2Ba1,   // max-SINR UA, SINR MS, water-filling BA
    MaxSinrMs2Ba2,   // max-SINR UA, SINR MS, even BA
};

std::string scheme_id(Scheme s);
std::optional<Scheme> parse_scheme(const std::string& id);
std::vector<Scheme> all_schemes();

struct MuOutcome {
    int mu = -1;
    int bs = -1;          // -1 when dropped
    Mode mode = Mode::Sem;
    double z_hz = 0.0;
    double rate_msg_s = 0.0;
    double delay_s = 0.0;
    double loss_ratio = 0.0;
    bool meets_qos = false;
};

/// Per-run audit of the joint problem's constraints, evaluated on the final
/// allocation with the analytic queueing engine.
struct ConstraintAudit {
    bool single_bs = true;   // one serving BS per MU
    bool budgets = true;     // per-BS bandwidth sums within Z_j
    bool latency = true;     // delay <= latency cap on every served link
    bool loss = true;        // loss ratio <= loss cap
    bool rate_min = true;    // message rate >= per-MU minimum
    bool binary = true;      // association/mode indicators are 0/1 by construction
    double max_budget_excess_hz = 0.0;
    double worst_delay_s = 0.0;
    double worst_loss = 0.0;
    double worst_rate_margin_msg_s = 0.0;  // min(rate - rate_min) over MUs

    bool all_ok() const { return single_bs && budgets && latency && loss && rate_min && binary; }
};

struct RunResult {
    Scheme scheme = Scheme::Proposed;
    std::uint64_t seed = 0;
    double total_throughput_msg_s = 0.0;  // QoS-satisfying MUs only
    std::vector<MuOutcome> per_mu;
    ConstraintAudit audit;
    std::vector<int> dropped_mus;
    DualState dual;  // populated by the proposed pipeline
    double wall_ms = 0.0;
};

/// Full pipeline on a prebuilt scenario; thresholds may be shared across
/// schemes of the same scenario.
RunResult run_scheme(Scheme scheme, const NetworkScenario& sc,
                     const ThresholdTable* thresholds = nullptr);

/// Generates the scenario from (config, seed) and runs the scheme.
RunResult run(Scheme scheme, const ScenarioConfig& cfg, std::uint64_t seed);

/// Per-MU outcome table; floats carry 9 significant digits.
std::string run_to_csv(const RunResult& result);

enum class SweepAxis { NumBs, NumMus, TauMean };

std::string axis_id(SweepAxis axis);
std::optional<SweepAxis> parse_axis(const std::string& id);

struct SweepRow {
    double axis_value = 0.0;
    Scheme scheme = Scheme::Proposed;
    std::uint64_t seed = 0;
    double throughput_msg_s = 0.0;
};

/// One row per (axis value, scheme, seed); rows come back in deterministic
/// (value, scheme, seed) order regardless of worker scheduling.
std::vector<SweepRow> sweep(SweepAxis axis, const std::vector<double>& values,
                            const std::vector<Scheme>& schemes,
                            const std::vector<std::uint64_t>& seeds, const ScenarioConfig& base,
                            int workers = 0);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

/// Empirical CDF of the served links' message rates.
std::vector<std::pair<double, double>> rate_cdf(const RunResult& result);
std::string cdf_to_csv(const std::vector<std::pair<double, double>>& cdf);

struct ValidationRow {
    std::string quantity;
    double analytic = 0.0;
    double simulated = 0.0;
    double rel_err = 0.0;
    double tolerance = 0.0;
    bool ok = false;
};

/// Analytic-vs-Monte-Carlo comparison across the queueing stack: the M/M/1
/// reduction, the mixed-service coding queue, a loaded transmission-queue
/// fixture, and the zero-arrival degenerate case.
std::vector<ValidationRow> validate_queue(long n_packets, long n_slots, std::uint64_t seed);

std::string validation_to_text(const std::vector<ValidationRow>& rows);

/// Applies one sweep-axis value to a base config (MU/BS counts or the
/// knowledge-matching window).
ScenarioConfig apply_axis(const ScenarioConfig& base, SweepAxis axis, double value);

}  // namespace hsbnet
