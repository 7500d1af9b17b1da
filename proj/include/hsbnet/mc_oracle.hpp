#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "hsbnet/pmf.hpp"
#include "hsbnet/scenario.hpp"

namespace hsbnet {

// Independent slot/event simulators used to validate the analytic queueing
// quantities. They never touch the analytic PMF or chain machinery.

using SlotSampler = std::function<int(std::mt19937_64&)>;

struct ScqSimResult {
    double mean_sojourn_s = 0.0;
    double stderr_s = 0.0;  // batch-means standard error
    long packets = 0;
};

/// Event-driven M/G/1 with the knowledge-matching service mixture.
/// Deterministic for a fixed seed. Discards the first 1% of packets as warmup.
ScqSimResult simulate_scq(double lambda_pps, double tau, double mu_match_pps,
                          double mu_mismatch_pps, long n_packets, std::uint64_t seed);

struct PtqSimResult {
    double loss_ratio = 0.0;
    double mean_queue = 0.0;    // post-arrival queue average, packets
    double mean_delay_s = 0.0;  // admission-to-departure, slot-granular
    double loss_stderr = 0.0;
    double queue_stderr = 0.0;
    double delay_stderr = 0.0;
    long slots = 0;
    long arrivals = 0;
    long drops = 0;
};

/// Slotted finite-buffer queue following the departure-then-arrival order:
/// packets leave first, then arrivals are admitted up to the buffer, the rest
/// are dropped. A packet departing k slots after its admission slot has
/// waited k * slot_s seconds.
PtqSimResult simulate_ptq(const SlotSampler& arrival, const SlotSampler& departure,
                          int buffer_size, long n_slots, std::uint64_t seed,
                          double slot_s = 1.0);

/// Poisson per-slot arrival sampler.
SlotSampler poisson_sampler(double mean_per_slot);

/// Physical departure sampler: draws the slot SINR in dB and floors the
/// Shannon rate, without going through the analytic PMF.
SlotSampler sinr_departure_sampler(double z_hz, double mean_sinr_db, double sinr_std_db,
                                   double slot_s, int packet_bits);

/// Inverse-CDF sampler over an explicit PMF.
SlotSampler pmf_sampler(Pmf pmf);

}  // namespace hsbnet
