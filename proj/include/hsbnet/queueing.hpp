#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "hsbnet/b2m.hpp"
#include "hsbnet/common.hpp"
#include "hsbnet/pmf.hpp"
#include "hsbnet/scenario.hpp"

namespace hsbnet {

enum class PkForm {
    Textbook,  // lambda * E[I^2] / (2 (1 - lambda E[I])) + E[I]
    Expanded,  // alternative expanded form, kept for side-by-side comparison
};

/// Mean M/G/1 sojourn time of the semantic-coding queue. Service is the
/// knowledge-matching mixture: Exp(mu_match) w.p. tau, Exp(mu_mismatch)
/// otherwise. Throws InstabilityError when lambda * E[I] >= 1.
double scq_delay(double lambda_pps, double tau, double mu_match_pps, double mu_mismatch_pps,
                 PkForm form = PkForm::Textbook);

/// Packet arrival rate of a SemCom transmission queue: the SCQ drains
/// matching packets at mu_match and mismatching ones at mu_mismatch, so the
/// downstream Poisson rate is tau*mu_match + (1-tau)*mu_mismatch.
inline double sem_ptq_arrival_pps(double tau, double mu_match_pps, double mu_mismatch_pps) {
    return tau * mu_match_pps + (1.0 - tau) * mu_mismatch_pps;
}

/// Per-slot departure PMF: Pr{ floor(T z log2(1+gamma)/L) = k } with gamma
/// Gaussian in dB around mean_sinr_db. Pr{D=k} = Phi((g_{k+1}-mean)/sigma) -
/// Phi((g_k-mean)/sigma), g_k = 10 log10(2^{kL/(Tz)} - 1), g_0 = -inf.
/// z = 0 yields a point mass at 0; sigma = 0 yields the deterministic floor.
Pmf departure_pmf(double z_hz, double mean_sinr_db, double sinr_std_db, double slot_s,
                  int packet_bits);

/// Per-slot Poisson arrival PMF with mean rate * T.
Pmf arrival_pmf(double rate_pps, double slot_s);

/// One-step transition matrix of the buffered transmission queue:
/// Q(t+1) = min(max(Q(t) - D, 0) + A, F). Rows sum to 1.
Eigen::MatrixXd transition_matrix(const Pmf& arrival, const Pmf& departure, int buffer_size);

/// Stationary distribution: solves transition^T alpha = alpha, sum alpha = 1
/// via a direct linear solve; falls back to lazy power iteration from the
/// empty-queue state when the chain is reducible and the system degenerate.
Eigen::VectorXd steady_state(const Eigen::MatrixXd& transition);

/// Lazy power iteration (I + Omega)/2 from the empty-queue state; used as an
/// independent cross-check of the direct solve.
Eigen::VectorXd steady_state_power(const Eigen::MatrixXd& transition, double tol = 1e-14,
                                   int max_iters = 1000000);

/// Exact steady-state expectation of packets dropped per slot:
/// E[ max(0, max(a-d,0) + f - F) ] under alpha, departure and arrival PMFs.
double expected_drops(const Eigen::VectorXd& alpha, const Pmf& arrival, const Pmf& departure,
                      int buffer_size);

/// Drop count from the two-sum decomposition over arrival sizes, reading
/// W^(m) as the steady-state queue-length CDF. Kept for side-by-side
/// reporting only; the exact expectation above is authoritative.
double expected_drops_cdf_form(const Eigen::VectorXd& alpha, const Pmf& arrival,
                               const Pmf& departure, int buffer_size);

/// Loss ratio theta = G / (arrival_rate * T), clamped to [0, 1].
double loss_ratio(double drops_per_slot, double arrival_pps, double slot_s);

/// Little's-law queue delay E[Q] / ((1 - theta) * arrival_rate).
/// Throws DegenerateLink when the effective arrival rate vanishes.
double ptq_delay(const Eigen::VectorXd& alpha, double arrival_pps, double theta);

struct PtqMetrics {
    double loss_ratio = 0.0;
    double mean_queue = 0.0;     // packets
    double delay_s = 0.0;
    double drops_per_slot = 0.0;
};

/// Full transmission-queue pipeline for one (arrival, departure) pair.
PtqMetrics ptq_metrics(const Pmf& arrival, const Pmf& departure, int buffer_size,
                       double arrival_pps, double slot_s);

struct LinkMetrics {
    double delay_s = 0.0;       // total: SCQ + PTQ for SemCom, PTQ for BitCom
    double loss_ratio = 0.0;
    double rate_msg_s = 0.0;
    double scq_delay_s = 0.0;   // 0 for BitCom
    double ptq_delay_s = 0.0;
    double mean_queue = 0.0;
    double drops_per_slot = 0.0;
};

/// Mode-combined link evaluation at bandwidth z.
LinkMetrics link_metrics(Mode mode, double z_hz, const LinkParams& p);

/// All analytic queue artifacts of one link, kept for inspection dumps.
struct LinkQueueModel {
    Mode mode = Mode::Sem;
    double z_hz = 0.0;
    Pmf departure;
    Pmf arrival;
    Eigen::MatrixXd transition;
    Eigen::VectorXd steady;
    LinkMetrics metrics;
};

LinkQueueModel build_link_queue_model(Mode mode, double z_hz, const LinkParams& p);

nlohmann::json link_queue_model_to_json(const LinkQueueModel& model);

}  // namespace hsbnet
