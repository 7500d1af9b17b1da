#include "hsbnet/mc_oracle.hpp"

#include <cmath>
#include <deque>
#include <vector>

#include "hsbnet/b2m.hpp"
#include "hsbnet/rng.hpp"

namespace hsbnet {

namespace {

// Standard error of a mean from batch means; tolerates serial correlation
// that a naive per-sample estimate would hide.
double batch_stderr(const std::vector<double>& batch_means) {
    const auto n = static_cast<double>(batch_means.size());
    if (batch_means.size() < 2) return 0.0;
    double mean = 0.0;
    for (double b : batch_means) mean += b;
    mean /= n;
    double var = 0.0;
    for (double b : batch_means) var += (b - mean) * (b - mean);
    var /= (n - 1.0);
    return std::sqrt(var / n);
}

constexpr int kBatches = 100;

}  // namespace

ScqSimResult simulate_scq(double lambda_pps, double tau, double mu_match_pps,
                          double mu_mismatch_pps, long n_packets, std::uint64_t seed) {
    if (n_packets < 1000) throw std::invalid_argument("simulate_scq: too few packets");
    const double load = lambda_pps * mean_service_time(tau, mu_match_pps, mu_mismatch_pps);
    if (load >= 1.0) throw InstabilityError("simulate_scq: unstable configuration");

    std::mt19937_64 gen(seed);
    const long warmup = n_packets / 100;

    double arrival_t = 0.0;
    double last_departure_t = 0.0;
    double sum = 0.0;
    long counted = 0;

    const long per_batch = std::max<long>(1, (n_packets - warmup) / kBatches);
    std::vector<double> batches;
    double batch_sum = 0.0;
    long batch_count = 0;

    for (long k = 0; k < n_packets; ++k) {
        arrival_t += rng::exponential(gen, lambda_pps);
        const double service = rng::uniform01(gen) < tau
                                   ? rng::exponential(gen, mu_match_pps)
                                   : rng::exponential(gen, mu_mismatch_pps);
        const double begin_t = std::max(arrival_t, last_departure_t);
        last_departure_t = begin_t + service;
        if (k < warmup) continue;
        const double sojourn = last_departure_t - arrival_t;
        sum += sojourn;
        ++counted;
        batch_sum += sojourn;
        if (++batch_count == per_batch) {
            batches.push_back(batch_sum / static_cast<double>(batch_count));
            batch_sum = 0.0;
            batch_count = 0;
        }
    }

    ScqSimResult res;
    res.packets = counted;
    res.mean_sojourn_s = sum / static_cast<double>(counted);
    res.stderr_s = batch_stderr(batches);
    return res;
}

PtqSimResult simulate_ptq(const SlotSampler& arrival, const SlotSampler& departure,
                          int buffer_size, long n_slots, std::uint64_t seed, double slot_s) {
    if (buffer_size < 1) throw std::invalid_argument("simulate_ptq: buffer_size < 1");
    if (n_slots < 1000) throw std::invalid_argument("simulate_ptq: too few slots");

    std::mt19937_64 gen(seed);
    const long warmup = n_slots / 100;

    std::deque<long> admitted_slot;  // FIFO of admission slot indices
    long arrivals = 0;
    long drops = 0;
    long departures = 0;
    double delay_sum = 0.0;   // in slots
    double queue_sum = 0.0;
    long counted_slots = 0;

    const long per_batch = std::max<long>(1, (n_slots - warmup) / kBatches);
    std::vector<double> loss_batches, queue_batches, delay_batches;
    double b_arr = 0.0, b_drop = 0.0, b_queue = 0.0, b_delay = 0.0, b_dep = 0.0;
    long b_slots = 0;

    for (long t = 0; t < n_slots; ++t) {
        const bool measured = t >= warmup;

        // Departures leave first.
        const int capacity = departure(gen);
        const int leaving = std::min<long>(capacity, static_cast<long>(admitted_slot.size()));
        for (int k = 0; k < leaving; ++k) {
            const long wait_slots = t - admitted_slot.front();
            admitted_slot.pop_front();
            if (measured) {
                delay_sum += static_cast<double>(wait_slots);
                ++departures;
                b_delay += static_cast<double>(wait_slots);
                b_dep += 1.0;
            }
        }

        // Then arrivals are admitted up to the buffer.
        const int offered = arrival(gen);
        const int room = buffer_size - static_cast<int>(admitted_slot.size());
        const int accepted = std::min(offered, room);
        for (int k = 0; k < accepted; ++k) admitted_slot.push_back(t);
        if (measured) {
            arrivals += offered;
            drops += offered - accepted;
            queue_sum += static_cast<double>(admitted_slot.size());
            ++counted_slots;
            b_arr += offered;
            b_drop += offered - accepted;
            b_queue += static_cast<double>(admitted_slot.size());
            if (++b_slots == per_batch) {
                loss_batches.push_back(b_arr > 0.0 ? b_drop / b_arr : 0.0);
                queue_batches.push_back(b_queue / static_cast<double>(b_slots));
                delay_batches.push_back(b_dep > 0.0 ? b_delay / b_dep : 0.0);
                b_arr = b_drop = b_queue = b_delay = b_dep = 0.0;
                b_slots = 0;
            }
        }
    }

    PtqSimResult res;
    res.slots = counted_slots;
    res.arrivals = arrivals;
    res.drops = drops;
    res.loss_ratio = arrivals > 0 ? static_cast<double>(drops) / static_cast<double>(arrivals) : 0.0;
    res.mean_queue = queue_sum / static_cast<double>(counted_slots);
    res.mean_delay_s = departures > 0 ? delay_sum / static_cast<double>(departures) * slot_s : 0.0;
    res.loss_stderr = batch_stderr(loss_batches);
    res.queue_stderr = batch_stderr(queue_batches);
    res.delay_stderr = batch_stderr(delay_batches) * slot_s;
    return res;
}

SlotSampler poisson_sampler(double mean_per_slot) {
    return [mean_per_slot](std::mt19937_64& gen) { return rng::poisson(gen, mean_per_slot); };
}

SlotSampler sinr_departure_sampler(double z_hz, double mean_sinr_db, double sinr_std_db,
                                   double slot_s, int packet_bits) {
    return [=](std::mt19937_64& gen) {
        const double sinr_db = rng::normal(gen, mean_sinr_db, sinr_std_db);
        const double bits = slot_s * z_hz * std::log2(1.0 + db_to_linear(sinr_db));
        return static_cast<int>(std::floor(bits / static_cast<double>(packet_bits)));
    };
}

SlotSampler pmf_sampler(Pmf pmf) {
    return [pmf = std::move(pmf)](std::mt19937_64& gen) {
        const double u = rng::uniform01(gen);
        double acc = 0.0;
        for (Eigen::Index k = 0; k < pmf.size(); ++k) {
            acc += pmf(k);
            if (u < acc) return static_cast<int>(k);
        }
        return static_cast<int>(pmf.max_support());
    };
}

}  // namespace hsbnet
