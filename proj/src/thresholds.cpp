#include "hsbnet/thresholds.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "hsbnet/format.hpp"

namespace hsbnet {

namespace {

// Bisection on a monotone satisfaction predicate over (floor, budget].
// Expects sat(budget) == true and sat(floor) == false.
double bisect_min_bandwidth(const std::function<bool(double)>& sat, double floor_hz,
                            double budget_hz, double rel_tol) {
    double lo = floor_hz;   // violates
    double hi = budget_hz;  // satisfies
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        (sat(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace

double min_bandwidth_for(QosMetric metric, Mode mode, const LinkParams& p, double budget_hz,
                         double latency_cap_s, double loss_cap, double rate_min_msg_s,
                         const ThresholdSearch& search) {
    const double floor_hz = std::min(search.z_floor_hz, 0.5 * budget_hz);

    // The SCQ term does not depend on z; if it alone breaks the latency cap
    // no bandwidth can help.
    if (metric == QosMetric::Latency && mode == Mode::Sem) {
        if (scq_delay(p.arrival_pps, p.tau, p.mu_match_pps, p.mu_mismatch_pps) > latency_cap_s)
            return kInf;
    }

    // Queue metrics share the arrival PMF across all bisection probes.
    const double ptq_pps = mode == Mode::Sem
                               ? sem_ptq_arrival_pps(p.tau, p.mu_match_pps, p.mu_mismatch_pps)
                               : p.arrival_pps;
    const Pmf arr = arrival_pmf(ptq_pps, p.slot_s);
    const double scq_s = (mode == Mode::Sem && metric == QosMetric::Latency)
                             ? scq_delay(p.arrival_pps, p.tau, p.mu_match_pps, p.mu_mismatch_pps)
                             : 0.0;

    const auto satisfied = [&](double z) {
        switch (metric) {
            case QosMetric::Rate:
                return link_rate(mode, z, p.mean_sinr_db, p.tau, p.rho, p.b2m) >= rate_min_msg_s;
            case QosMetric::Loss: {
                const Pmf dep = departure_pmf(z, p.mean_sinr_db, p.sinr_std_db, p.slot_s, p.packet_bits);
                return ptq_metrics(arr, dep, p.buffer_size, ptq_pps, p.slot_s).loss_ratio <= loss_cap;
            }
            case QosMetric::Latency: {
                const Pmf dep = departure_pmf(z, p.mean_sinr_db, p.sinr_std_db, p.slot_s, p.packet_bits);
                const double delay =
                    scq_s + ptq_metrics(arr, dep, p.buffer_size, ptq_pps, p.slot_s).delay_s;
                return delay <= latency_cap_s;
            }
        }
        return false;
    };

    if (satisfied(floor_hz)) return floor_hz;
    if (!satisfied(budget_hz)) return kInf;
    return bisect_min_bandwidth(satisfied, floor_hz, budget_hz, search.rel_tol);
}

ThresholdTable all_thresholds(const NetworkScenario& sc, const ThresholdSearch& search) {
    const int U = sc.num_mus;
    const int J = sc.num_bss;
    ThresholdTable t;
    for (Eigen::MatrixXd* m : {&t.sem_delay, &t.sem_loss, &t.sem_rate, &t.sem_th, &t.bit_delay,
                               &t.bit_loss, &t.bit_rate, &t.bit_th, &t.sem_rate_at_th,
                               &t.bit_rate_at_th})
        m->setZero(U, J);

    for (int i = 0; i < U; ++i) {
        for (int j = 0; j < J; ++j) {
            const LinkParams p = link_params(sc, i, j);
            const double budget = sc.bandwidth_hz(j);

            const auto one = [&](QosMetric metric, Mode mode) {
                return min_bandwidth_for(metric, mode, p, budget, sc.latency_cap_s, sc.loss_cap,
                                         sc.rate_min_msg_s(i), search);
            };
            t.sem_delay(i, j) = one(QosMetric::Latency, Mode::Sem);
            t.sem_loss(i, j) = one(QosMetric::Loss, Mode::Sem);
            t.sem_rate(i, j) = one(QosMetric::Rate, Mode::Sem);
            t.bit_delay(i, j) = one(QosMetric::Latency, Mode::Bit);
            t.bit_loss(i, j) = one(QosMetric::Loss, Mode::Bit);
            t.bit_rate(i, j) = one(QosMetric::Rate, Mode::Bit);

            t.sem_th(i, j) = std::max({t.sem_delay(i, j), t.sem_loss(i, j), t.sem_rate(i, j)});
            t.bit_th(i, j) = std::max({t.bit_delay(i, j), t.bit_loss(i, j), t.bit_rate(i, j)});

            t.sem_rate_at_th(i, j) =
                t.sem_th(i, j) < kInf ? semantic_rate(t.sem_th(i, j), p.mean_sinr_db, p.tau, p.b2m)
                                      : 0.0;
            t.bit_rate_at_th(i, j) =
                t.bit_th(i, j) < kInf ? bitcom_rate(t.bit_th(i, j), p.mean_sinr_db, p.rho) : 0.0;
        }
    }
    return t;
}

std::string thresholds_to_csv(const ThresholdTable& table) {
    std::ostringstream os;
    os << "mu,bs,mode,z_delta_hz,z_theta_hz,z_M_hz,z_th_hz,feasible\n";
    const auto row = [&](int i, int j, const char* mode, double zd, double zt, double zm,
                         double zth) {
        os << i << ',' << j << ',' << mode << ',' << fmt9(zd) << ',' << fmt9(zt) << ','
           << fmt9(zm) << ',' << fmt9(zth) << ',' << (zth < kInf ? 1 : 0) << '\n';
    };
    for (Eigen::Index i = 0; i < table.sem_th.rows(); ++i) {
        for (Eigen::Index j = 0; j < table.sem_th.cols(); ++j) {
            const auto ii = static_cast<int>(i);
            const auto jj = static_cast<int>(j);
            row(ii, jj, "sem", table.sem_delay(i, j), table.sem_loss(i, j), table.sem_rate(i, j),
                table.sem_th(i, j));
            row(ii, jj, "bit", table.bit_delay(i, j), table.bit_loss(i, j), table.bit_rate(i, j),
                table.bit_th(i, j));
        }
    }
    return os.str();
}

}  // namespace hsbnet
