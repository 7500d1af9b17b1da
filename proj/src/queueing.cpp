#include "hsbnet/queueing.hpp"

#include <cmath>
#include <iostream>

#include <nlohmann/json.hpp>

namespace hsbnet {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

}  // namespace

double scq_delay(double lambda_pps, double tau, double mu_match_pps, double mu_mismatch_pps,
                 PkForm form) {
    if (tau <= 0.0 || tau > 1.0) throw std::invalid_argument("scq_delay: tau outside (0, 1]");
    if (mu_match_pps <= 0.0 || mu_mismatch_pps <= 0.0)
        throw std::invalid_argument("scq_delay: non-positive service rate");

    const double mean_service = mean_service_time(tau, mu_match_pps, mu_mismatch_pps);
    const double load = lambda_pps * mean_service;
    if (load >= 1.0) {
        throw InstabilityError("scq_delay: lambda*E[I] = " + std::to_string(load) + " >= 1");
    }

    if (form == PkForm::Expanded) {
        // Alternative expansion kept for comparison; not algebraically equal
        // to the moment form below (differing numerator, no factor 2).
        const double num = lambda_pps * (tau * (1.0 - tau) / (mu_match_pps * mu_mismatch_pps) +
                                         std::pow(tau / mu_match_pps, 2) +
                                         std::pow((1.0 - tau) / mu_mismatch_pps, 2));
        return num / (1.0 - load) + mean_service;
    }

    // Second service moment of the exponential mixture.
    const double second_moment = 2.0 * tau / (mu_match_pps * mu_match_pps) +
                                 2.0 * (1.0 - tau) / (mu_mismatch_pps * mu_mismatch_pps);
    return lambda_pps * second_moment / (2.0 * (1.0 - load)) + mean_service;
}

Pmf departure_pmf(double z_hz, double mean_sinr_db, double sinr_std_db, double slot_s,
                  int packet_bits) {
    if (z_hz < 0.0) throw std::invalid_argument("departure_pmf: negative bandwidth");
    if (slot_s <= 0.0 || packet_bits <= 0)
        throw std::invalid_argument("departure_pmf: non-positive slot or packet size");
    if (z_hz == 0.0) return Pmf::point_mass(0);

    // Packets per slot at bit rate r: k = floor(T r / L); x_k below is the
    // bit-rate multiple k L / (T z) a departure count k requires.
    const double per_packet = static_cast<double>(packet_bits) / (slot_s * z_hz);

    if (sinr_std_db <= 0.0) {
        const double rate = std::log2(1.0 + db_to_linear(mean_sinr_db)) / per_packet;
        return Pmf::point_mass(static_cast<Eigen::Index>(std::floor(rate)));
    }

    // Threshold SINR in dB for k departures: g_k = 10 log10(2^{x_k} - 1).
    const auto threshold_db = [&](double k) {
        const double exponent = k * per_packet * M_LN2;
        if (exponent > 500.0) return 10.0 * k * per_packet * std::log10(2.0);
        return 10.0 * std::log10(std::expm1(exponent));
    };

    // Support bound: beyond mean + 7.2 sigma the tail is under the truncation
    // threshold. Cap defensively; per-slot counts stay small in practice.
    const double sinr_hi_db = mean_sinr_db + 7.2 * sinr_std_db;
    double kmax_d = slot_s * z_hz / packet_bits * std::log2(1.0 + db_to_linear(sinr_hi_db));
    kmax_d = std::min(std::max(kmax_d, 0.0), 1e6);
    const auto kmax = static_cast<Eigen::Index>(std::ceil(kmax_d));
    if (kmax == 0) return Pmf::point_mass(0);

    // Pr{D >= k} = 1 - Phi((g_k - mean)/sigma); differences give the PMF.
    Eigen::VectorXd weights(kmax + 1);
    double upper_tail_prev = 1.0;  // Pr{D >= 0}
    for (Eigen::Index k = 0; k < kmax; ++k) {
        const double gk1 = threshold_db(static_cast<double>(k + 1));
        const double upper_tail = 1.0 - normal_cdf((gk1 - mean_sinr_db) / sinr_std_db);
        weights(k) = std::max(upper_tail_prev - upper_tail, 0.0);
        upper_tail_prev = upper_tail;
    }
    weights(kmax) = std::max(upper_tail_prev, 0.0);
    return Pmf(weights);
}

Pmf arrival_pmf(double rate_pps, double slot_s) {
    if (rate_pps < 0.0) throw std::invalid_argument("arrival_pmf: negative rate");
    return poisson_pmf(rate_pps * slot_s);
}

Eigen::MatrixXd transition_matrix(const Pmf& arrival, const Pmf& departure, int buffer_size) {
    if (buffer_size < 1) throw std::invalid_argument("transition_matrix: buffer_size < 1");
    const Eigen::Index n = buffer_size + 1;
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);

    const Eigen::VectorXd& dep = departure.probs();
    const Eigen::VectorXd& arr = arrival.probs();

    Eigen::VectorXd after_service(n);  // distribution of max(a - d, 0)
    for (Eigen::Index a = 0; a < n; ++a) {
        after_service.setZero();
        for (Eigen::Index d = 0; d < dep.size(); ++d)
            after_service(std::max<Eigen::Index>(a - d, 0)) += dep(d);
        for (Eigen::Index q = 0; q <= a; ++q) {
            const double pq = after_service(q);
            if (pq == 0.0) continue;
            for (Eigen::Index f = 0; f < arr.size(); ++f)
                omega(a, std::min<Eigen::Index>(q + f, buffer_size)) += pq * arr(f);
        }
    }
    return omega;
}

Eigen::VectorXd steady_state_power(const Eigen::MatrixXd& transition, double tol, int max_iters) {
    const Eigen::Index n = transition.rows();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(0) = 1.0;  // queues start empty
    const Eigen::MatrixXd t = transition.transpose();
    for (int it = 0; it < max_iters; ++it) {
        // Lazy chain (I + Omega)/2 shares the stationary vector and is
        // aperiodic, so plain iteration converges.
        Eigen::VectorXd next = 0.5 * (v + t * v);
        const double delta = (next - v).lpNorm<Eigen::Infinity>();
        v = std::move(next);
        if (delta < tol) break;
    }
    return v / v.sum();
}

Eigen::VectorXd steady_state(const Eigen::MatrixXd& transition) {
    const Eigen::Index n = transition.rows();
    if (transition.cols() != n) throw std::invalid_argument("steady_state: non-square matrix");
    for (Eigen::Index r = 0; r < n; ++r) {
        if (std::abs(transition.row(r).sum() - 1.0) > 1e-8)
            throw std::invalid_argument("steady_state: matrix is not row-stochastic");
    }

    // (Omega^T - I) alpha = 0 with the last balance row swapped for sum = 1.
    Eigen::MatrixXd a = transition.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;

    Eigen::VectorXd alpha = a.partialPivLu().solve(b);

    const auto acceptable = [&](const Eigen::VectorXd& x) {
        if (!x.allFinite()) return false;
        if (x.minCoeff() < -1e-9) return false;
        const Eigen::VectorXd clamped = x.cwiseMax(0.0) / x.cwiseMax(0.0).sum();
        return (transition.transpose() * clamped - clamped).lpNorm<Eigen::Infinity>() < kProbTol;
    };

    if (!acceptable(alpha)) {
        // Reducible chain or degenerate system: take the distribution reached
        // from the empty queue.
        alpha = steady_state_power(transition);
    }
    alpha = alpha.cwiseMax(0.0);
    return alpha / alpha.sum();
}

double expected_drops(const Eigen::VectorXd& alpha, const Pmf& arrival, const Pmf& departure,
                      int buffer_size) {
    const Eigen::Index n = buffer_size + 1;
    if (alpha.size() != n) throw std::invalid_argument("expected_drops: alpha size mismatch");
    const Eigen::VectorXd& dep = departure.probs();
    const Eigen::VectorXd& arr = arrival.probs();

    // overflow(q) = E[ max(0, q + f - F) ] over the arrival PMF.
    Eigen::VectorXd overflow = Eigen::VectorXd::Zero(n);
    for (Eigen::Index q = 0; q < n; ++q)
        for (Eigen::Index f = 0; f < arr.size(); ++f)
            if (q + f > buffer_size) overflow(q) += arr(f) * static_cast<double>(q + f - buffer_size);

    double drops = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
        if (alpha(a) == 0.0) continue;
        double per_state = 0.0;
        for (Eigen::Index d = 0; d < dep.size(); ++d)
            per_state += dep(d) * overflow(std::max<Eigen::Index>(a - d, 0));
        drops += alpha(a) * per_state;
    }
    return drops;
}

double expected_drops_cdf_form(const Eigen::VectorXd& alpha, const Pmf& arrival,
                               const Pmf& departure, int buffer_size) {
    const int F = buffer_size;
    // W^(m): steady-state queue-length CDF, zero below the support.
    const auto w = [&](Eigen::Index m) {
        if (m < 0) return 0.0;
        if (m >= alpha.size()) return 1.0;
        return alpha.head(m + 1).sum();
    };

    double drops = 0.0;
    const Eigen::VectorXd& arr = arrival.probs();
    for (Eigen::Index f = 1; f < arr.size(); ++f) {
        if (f <= F) {
            double inner = 0.0;
            for (Eigen::Index k = 0; k < f; ++k) inner += departure.cdf(k) * (1.0 - w(F - f + k));
            drops += arr(f) * inner;
        } else {
            double inner = static_cast<double>(f - F);
            for (Eigen::Index k = 0; k < F; ++k) inner += departure.cdf(k) * (1.0 - w(k));
            drops += arr(f) * inner;
        }
    }
    return drops;
}

double loss_ratio(double drops_per_slot, double arrival_pps, double slot_s) {
    if (arrival_pps <= 0.0) throw std::invalid_argument("loss_ratio: non-positive arrival rate");
    const double theta = drops_per_slot / (arrival_pps * slot_s);
    if (theta < -1e-9 || theta > 1.0 + 1e-9)
        std::cerr << "loss_ratio: clamping out-of-range value " << theta << "\n";
    return std::min(std::max(theta, 0.0), 1.0);
}

double ptq_delay(const Eigen::VectorXd& alpha, double arrival_pps, double theta) {
    const double effective_pps = (1.0 - theta) * arrival_pps;
    if (effective_pps <= 0.0)
        throw DegenerateLink("ptq_delay: effective arrival rate is zero");
    double mean_queue = 0.0;
    for (Eigen::Index k = 1; k < alpha.size(); ++k) mean_queue += static_cast<double>(k) * alpha(k);
    return mean_queue / effective_pps;
}

PtqMetrics ptq_metrics(const Pmf& arrival, const Pmf& departure, int buffer_size,
                       double arrival_pps, double slot_s) {
    const Eigen::MatrixXd omega = transition_matrix(arrival, departure, buffer_size);
    const Eigen::VectorXd alpha = steady_state(omega);

    PtqMetrics m;
    m.drops_per_slot = expected_drops(alpha, arrival, departure, buffer_size);
    m.loss_ratio = loss_ratio(m.drops_per_slot, arrival_pps, slot_s);
    for (Eigen::Index k = 1; k < alpha.size(); ++k) m.mean_queue += static_cast<double>(k) * alpha(k);
    m.delay_s = ptq_delay(alpha, arrival_pps, m.loss_ratio);
    return m;
}

LinkMetrics link_metrics(Mode mode, double z_hz, const LinkParams& p) {
    LinkMetrics out;
    const Pmf dep = departure_pmf(z_hz, p.mean_sinr_db, p.sinr_std_db, p.slot_s, p.packet_bits);

    if (mode == Mode::Sem) {
        out.scq_delay_s = scq_delay(p.arrival_pps, p.tau, p.mu_match_pps, p.mu_mismatch_pps);
        const double ptq_pps = sem_ptq_arrival_pps(p.tau, p.mu_match_pps, p.mu_mismatch_pps);
        const PtqMetrics ptq =
            ptq_metrics(arrival_pmf(ptq_pps, p.slot_s), dep, p.buffer_size, ptq_pps, p.slot_s);
        out.loss_ratio = ptq.loss_ratio;
        out.ptq_delay_s = ptq.delay_s;
        out.mean_queue = ptq.mean_queue;
        out.drops_per_slot = ptq.drops_per_slot;
        out.delay_s = out.scq_delay_s + out.ptq_delay_s;
        out.rate_msg_s = semantic_rate(z_hz, p.mean_sinr_db, p.tau, p.b2m);
    } else {
        const PtqMetrics ptq = ptq_metrics(arrival_pmf(p.arrival_pps, p.slot_s), dep,
                                           p.buffer_size, p.arrival_pps, p.slot_s);
        out.loss_ratio = ptq.loss_ratio;
        out.ptq_delay_s = ptq.delay_s;
        out.mean_queue = ptq.mean_queue;
        out.drops_per_slot = ptq.drops_per_slot;
        out.delay_s = out.ptq_delay_s;
        out.rate_msg_s = bitcom_rate(z_hz, p.mean_sinr_db, p.rho);
    }
    return out;
}

LinkQueueModel build_link_queue_model(Mode mode, double z_hz, const LinkParams& p) {
    LinkQueueModel model;
    model.mode = mode;
    model.z_hz = z_hz;
    model.departure = departure_pmf(z_hz, p.mean_sinr_db, p.sinr_std_db, p.slot_s, p.packet_bits);
    const double ptq_pps = mode == Mode::Sem
                               ? sem_ptq_arrival_pps(p.tau, p.mu_match_pps, p.mu_mismatch_pps)
                               : p.arrival_pps;
    model.arrival = arrival_pmf(ptq_pps, p.slot_s);
    model.transition = transition_matrix(model.arrival, model.departure, p.buffer_size);
    model.steady = steady_state(model.transition);
    model.metrics = link_metrics(mode, z_hz, p);
    return model;
}

nlohmann::json link_queue_model_to_json(const LinkQueueModel& model) {
    using nlohmann::json;
    json transition = json::array();
    for (Eigen::Index r = 0; r < model.transition.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < model.transition.cols(); ++c) row.push_back(model.transition(r, c));
        transition.push_back(std::move(row));
    }
    json steady = json::array();
    for (Eigen::Index k = 0; k < model.steady.size(); ++k) steady.push_back(model.steady(k));
    json dep = json::array();
    for (Eigen::Index k = 0; k < model.departure.size(); ++k) dep.push_back(model.departure(k));
    json arr = json::array();
    for (Eigen::Index k = 0; k < model.arrival.size(); ++k) arr.push_back(model.arrival(k));

    return json{{"mode", model.mode == Mode::Sem ? "sem" : "bit"},
                {"z_hz", model.z_hz},
                {"departure_pmf", dep},
                {"arrival_pmf", arr},
                {"transition", transition},
                {"steady_state", steady},
                {"delay_s", model.metrics.delay_s},
                {"scq_delay_s", model.metrics.scq_delay_s},
                {"ptq_delay_s", model.metrics.ptq_delay_s},
                {"loss_ratio", model.metrics.loss_ratio},
                {"mean_queue", model.metrics.mean_queue},
                {"drops_per_slot", model.metrics.drops_per_slot},
                {"rate_msg_s", model.metrics.rate_msg_s}};
}

}  // namespace hsbnet
