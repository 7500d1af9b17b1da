#pragma once

#include <Eigen/Dense>
#include <string>

#include "hsbnet/common.hpp"
#include "hsbnet/queueing.hpp"
#include "hsbnet/scenario.hpp"

namespace hsbnet {

enum class QosMetric { Latency, Loss, Rate };

struct ThresholdSearch {
    double rel_tol = 1e-4;
    double z_floor_hz = 1e3;  // keeps the departure PMF away from degeneracy
};

/// Per-link minimum bandwidths; kInf marks a metric unreachable within
/// (z_floor, budget]. *_th columns are the per-mode maxima.
struct ThresholdTable {
    Eigen::MatrixXd sem_delay, sem_loss, sem_rate, sem_th;  // U x J, Hz
    Eigen::MatrixXd bit_delay, bit_loss, bit_rate, bit_th;
    // Message rates evaluated at the threshold bandwidth (the constants the
    // association stage treats as fixed); 0 where the mode is infeasible.
    Eigen::MatrixXd sem_rate_at_th, bit_rate_at_th;

    bool sem_feasible(int i, int j) const { return sem_th(i, j) < kInf; }
    bool bit_feasible(int i, int j) const { return bit_th(i, j) < kInf; }
};

/// Smallest z in (z_floor, budget] meeting the metric target, by bisection on
/// the monotone metric; kInf when even the full budget fails. The returned
/// bandwidth itself satisfies the target.
double min_bandwidth_for(QosMetric metric, Mode mode, const LinkParams& p, double budget_hz,
                         double latency_cap_s, double loss_cap, double rate_min_msg_s,
                         const ThresholdSearch& search = {});

ThresholdTable all_thresholds(const NetworkScenario& sc, const ThresholdSearch& search = {});

/// CSV dump: mu,bs,mode,z_delta_hz,z_theta_hz,z_M_hz,z_th_hz,feasible.
std::string thresholds_to_csv(const ThresholdTable& table);

}  // namespace hsbnet
