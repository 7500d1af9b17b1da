#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hsbnet/common.hpp"
#include "hsbnet/scenario.hpp"
#include "hsbnet/thresholds.hpp"

namespace hsbnet {

/// Joint user-association / mode-selection / bandwidth-allocation solution.
/// During the association stage z_hz carries the per-mode threshold demand;
/// the allocation stage overwrites it with the final bandwidths.
struct Assignment {
    std::vector<int> bs;      // serving BS per MU; -1 once dropped
    std::vector<Mode> mode;
    Eigen::VectorXd z_hz;
    std::vector<int> dropped;  // MUs no repair could place anywhere

    int num_mus() const { return static_cast<int>(bs.size()); }
    bool active(int i) const { return bs[i] >= 0; }
};

struct StepsizeSchedule {
    double eps0 = 1e-6;
    bool normalized = false;  // divide by the largest BS budget
    double z_max_hz = 1.0;

    double operator()(int iter) const {
        return eps0 / (static_cast<double>(iter) * (normalized ? z_max_hz : 1.0));
    }
};

struct DualTraceRow {
    int iter = 0;
    double dual_value = 0.0;
    double primal_value = 0.0;        // threshold-rate objective of the repaired iterate
    double max_violation_hz = 0.0;    // worst budget excess before repair
};

struct DualState {
    Eigen::VectorXd eta;  // one multiplier per BS, always >= 0
    int iters_run = 0;
    bool converged = false;
    std::vector<DualTraceRow> trace;
};

/// Score of every extended option (BS j in SemCom for columns 0..J-1, BS j in
/// BitCom for columns J..2J-1): rate at threshold minus eta_j * threshold.
/// Infeasible options score -inf.
Eigen::MatrixXd xi_coefficients(const Eigen::VectorXd& eta, const ThresholdTable& thresholds);

/// Per-MU argmax over the extended options; ties take the smallest extended
/// index (which prefers SemCom at equal score). Throws NoFeasibleLink when a
/// row is all -inf.
Assignment assign(const Eigen::MatrixXd& xi, const ThresholdTable& thresholds);

/// Threshold bandwidth demanded by MU i under assignment a.
double assignment_demand(const Assignment& a, int i, const ThresholdTable& thresholds);

/// Per-BS bandwidth loads of an assignment at threshold demands.
Eigen::VectorXd bs_loads(const Assignment& a, const ThresholdTable& thresholds, int num_bss);

/// Projected subgradient update: eta_j <- max(eta_j - eps * (Z_j - load_j), 0).
Eigen::VectorXd subgradient_step(const Eigen::VectorXd& eta, const Assignment& a,
                                 const ThresholdTable& thresholds, const Eigen::VectorXd& budgets,
                                 int iter, const StepsizeSchedule& schedule);

struct RepairReport {
    int moves = 0;
    std::vector<int> dropped;
};

/// Preference-list repair: while a BS exceeds its budget, move its
/// highest-demand MU to the best-scored other option with room. MUs that fit
/// nowhere are dropped and reported.
RepairReport repair(Assignment& a, const Eigen::MatrixXd& xi, const ThresholdTable& thresholds,
                    const Eigen::VectorXd& budgets);

/// Threshold-rate objective of an assignment (the association-stage primal).
double threshold_objective(const Assignment& a, const ThresholdTable& thresholds);

struct UaMsResult {
    Assignment assignment;
    DualState dual;
};

/// Full association/mode-selection loop: score, assign, repair a feasible
/// candidate, then update the multipliers along the pre-repair subgradient.
/// Returns the best feasible candidate seen across iterations.
UaMsResult solve_ua_ms(const NetworkScenario& sc, const ThresholdTable& thresholds);

std::string dual_trace_to_csv(const DualState& state);

}  // namespace hsbnet
