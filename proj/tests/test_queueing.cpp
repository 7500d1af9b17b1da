#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "hsbnet/queueing.hpp"
#include "hsbnet/rng.hpp"

using namespace hsbnet;

namespace {

// F=1 chain with Bernoulli(p) arrivals and Bernoulli(q) departures has the
// hand-enumerated stationary solution used across these tests:
//   omega = [[1-p, p], [q(1-p), qp + 1-q]],  alpha = (q(1-p), p) / normalizer.
struct BernoulliChain {
    double p = 0.3;
    double q = 0.5;
    Pmf arr, dep;
    double alpha0, alpha1, drops, theta;

    BernoulliChain() {
        Eigen::VectorXd wa(2), wd(2);
        wa << 1.0 - p, p;
        wd << 1.0 - q, q;
        arr = Pmf(wa);
        dep = Pmf(wd);
        const double norm = q * (1.0 - p) + p;
        alpha0 = q * (1.0 - p) / norm;
        alpha1 = p / norm;
        drops = alpha1 * (1.0 - q) * p;  // full queue, no departure, one arrival
        theta = drops / p;
    }
};

LinkParams default_link(double gamma_db) {
    LinkParams p;
    p.arrival_pps = 1000.0;
    p.tau = 0.7;
    p.mu_match_pps = 1250.0;
    p.mu_mismatch_pps = 1000.0;
    p.mean_sinr_db = gamma_db;
    p.sinr_std_db = 4.0;
    p.slot_s = 1e-3;
    p.packet_bits = 800;
    p.buffer_size = 20;
    p.rho = 1e-4;
    p.b2m = B2MSurrogateParams{100.0, 1e6};
    return p;
}

}  // namespace

TEST_SUITE_BEGIN("queueing");

TEST_CASE("scq_delay reduces to M/M/1") {
    // 1/(mu - lambda) = 1/250 s.
    const double d = scq_delay(1000.0, 1.0, 1250.0, 999.0);
    CHECK(std::abs(d - 0.004) / 0.004 < 1e-12);
}

TEST_CASE("scq_delay mixed service, both forms") {
    CHECK(scq_delay(1000.0, 0.7, 1250.0, 1000.0) ==
          doctest::Approx(0.006202857142857143).epsilon(1e-12));
    CHECK(scq_delay(1000.0, 0.7, 1250.0, 1000.0, PkForm::Expanded) ==
          doctest::Approx(0.004942857142857145).epsilon(1e-12));
}

TEST_CASE("scq_delay instability boundary") {
    // lambda * E[I] = 1 exactly.
    CHECK_THROWS_AS(scq_delay(1250.0, 1.0, 1250.0, 1250.0 - 1e-9), InstabilityError);
    CHECK_THROWS_AS(scq_delay(2000.0, 0.5, 1250.0, 1000.0), InstabilityError);
}

TEST_CASE("departure_pmf degenerate cases") {
    CHECK(departure_pmf(0.0, 10.0, 4.0, 1e-3, 800).size() == 1);

    // Deterministic SINR: T z log2(1+gamma)/L = 2.5 floors to 2.
    const Pmf det = departure_pmf(2e6, 0.0, 0.0, 1e-3, 800);
    CHECK(det(2) == 1.0);
}

TEST_CASE("departure_pmf matches a sampled histogram") {
    const double z = 1e6, gamma = 8.0, sigma = 4.0, slot = 1e-3;
    const int bits = 800;
    const Pmf analytic = departure_pmf(z, gamma, sigma, slot, bits);

    std::mt19937_64 gen(2024);
    const long n = 1000000;
    std::vector<long> counts(analytic.size() + 64, 0);
    for (long s = 0; s < n; ++s) {
        const double db = rng::normal(gen, gamma, sigma);
        const auto k = static_cast<long>(std::floor(slot * z * std::log2(1.0 + db_to_linear(db)) / bits));
        if (k >= 0 && k < static_cast<long>(counts.size())) ++counts[k];
    }
    double tv = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double emp = static_cast<double>(counts[k]) / static_cast<double>(n);
        tv += std::abs(emp - analytic(static_cast<Eigen::Index>(k)));
    }
    CHECK(tv / 2.0 < 0.005);
}

TEST_CASE("arrival_pmf") {
    const Pmf unit = arrival_pmf(1000.0, 1e-3);  // mean 1
    CHECK(unit(0) == doctest::Approx(0.36787944117144233).epsilon(1e-10));

    CHECK(arrival_pmf(0.0, 1e-3).size() == 1);

    // Downstream coding-queue rate tau*mu_match + (1-tau)*mu_mismatch.
    CHECK(sem_ptq_arrival_pps(0.7, 1250.0, 1000.0) * 1e-3 == doctest::Approx(1.175).epsilon(1e-12));
    CHECK(sem_ptq_arrival_pps(0.3, 1250.0, 1000.0) * 1e-3 == doctest::Approx(1.075).epsilon(1e-12));
}

TEST_CASE("transition_matrix deterministic dynamics") {
    const int F = 4;
    SUBCASE("no arrivals, unit departures: queue drains one per slot") {
        const Eigen::MatrixXd omega = transition_matrix(Pmf::point_mass(0), Pmf::point_mass(1), F);
        CHECK(omega(0, 0) == 1.0);
        for (int a = 1; a <= F; ++a) CHECK(omega(a, a - 1) == 1.0);
    }
    SUBCASE("no departures, unit arrivals: queue fills and saturates") {
        const Eigen::MatrixXd omega = transition_matrix(Pmf::point_mass(1), Pmf::point_mass(0), F);
        for (int a = 0; a < F; ++a) CHECK(omega(a, a + 1) == 1.0);
        CHECK(omega(F, F) == 1.0);
    }
}

TEST_CASE("transition_matrix F=1 Bernoulli enumeration") {
    const BernoulliChain chain;
    const Eigen::MatrixXd omega = transition_matrix(chain.arr, chain.dep, 1);
    CHECK(omega(0, 0) == doctest::Approx(1.0 - chain.p).epsilon(1e-12));
    CHECK(omega(0, 1) == doctest::Approx(chain.p).epsilon(1e-12));
    CHECK(omega(1, 0) == doctest::Approx(chain.q * (1.0 - chain.p)).epsilon(1e-12));
    CHECK(omega(1, 1) == doctest::Approx(chain.q * chain.p + 1.0 - chain.q).epsilon(1e-12));
}

TEST_CASE("steady_state degenerate chains") {
    const int F = 5;
    SUBCASE("queue drains to empty") {
        const Eigen::VectorXd alpha =
            steady_state(transition_matrix(Pmf::point_mass(0), Pmf::point_mass(1), F));
        CHECK(alpha(0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("no departures absorb at the full buffer") {
        const Eigen::VectorXd alpha =
            steady_state(transition_matrix(Pmf::point_mass(1), Pmf::point_mass(0), F));
        CHECK(alpha(F) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("identity chain resolves to the empty-queue class") {
        const Eigen::VectorXd alpha =
            steady_state(transition_matrix(Pmf::point_mass(0), Pmf::point_mass(0), F));
        CHECK(alpha(0) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("steady_state F=1 closed form and power-iteration agreement") {
    const BernoulliChain chain;
    const Eigen::MatrixXd omega = transition_matrix(chain.arr, chain.dep, 1);
    const Eigen::VectorXd alpha = steady_state(omega);
    CHECK(alpha(0) == doctest::Approx(chain.alpha0).epsilon(1e-12));
    CHECK(alpha(1) == doctest::Approx(chain.alpha1).epsilon(1e-12));

    const Eigen::VectorXd power = steady_state_power(omega);
    CHECK((alpha - power).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("expected_drops") {
    const BernoulliChain chain;
    SUBCASE("a queue the dynamics cannot fill never drops") {
        // Unit departures against at-most-unit arrivals keep the state at or
        // below 1, so a buffer of 10 is unreachable.
        const Pmf dep = Pmf::point_mass(1);
        const Eigen::MatrixXd omega = transition_matrix(chain.arr, dep, 10);
        const Eigen::VectorXd alpha = steady_state(omega);
        CHECK(expected_drops(alpha, chain.arr, dep, 10) == 0.0);
    }
    SUBCASE("F=1 hand-computed expectation, exact and literal forms") {
        const Eigen::MatrixXd omega = transition_matrix(chain.arr, chain.dep, 1);
        const Eigen::VectorXd alpha = steady_state(omega);
        const double g = expected_drops(alpha, chain.arr, chain.dep, 1);
        CHECK(g == doctest::Approx(chain.drops).epsilon(1e-12));
        // On this chain the two-sum CDF form coincides with the exact one.
        CHECK(expected_drops_cdf_form(alpha, chain.arr, chain.dep, 1) ==
              doctest::Approx(chain.drops).epsilon(1e-12));
        CHECK(loss_ratio(g, chain.p * 1000.0, 1e-3) == doctest::Approx(chain.theta).epsilon(1e-12));
    }
}

TEST_CASE("loss_ratio endpoints") {
    CHECK(loss_ratio(0.0, 1175.0, 1e-3) == 0.0);
    CHECK(loss_ratio(1.175, 1175.0, 1e-3) == 1.0);
}

TEST_CASE("ptq_delay") {
    Eigen::VectorXd empty = Eigen::VectorXd::Zero(5);
    empty(0) = 1.0;
    CHECK(ptq_delay(empty, 1000.0, 0.0) == 0.0);

    Eigen::VectorXd two = Eigen::VectorXd::Zero(5);
    two(2) = 1.0;  // E[Q] = 2 packets
    CHECK(ptq_delay(two, 1000.0, 0.0) == doctest::Approx(0.002).epsilon(1e-12));

    CHECK_THROWS_AS(ptq_delay(two, 1000.0, 1.0), DegenerateLink);
}

TEST_CASE("chain invariants on random links") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 10; ++trial) {
        const double z = rng::uniform(gen, 2e5, 3e6);
        const double gamma = rng::uniform(gen, 0.0, 20.0);
        const LinkParams p = default_link(gamma);
        const double pps = sem_ptq_arrival_pps(p.tau, p.mu_match_pps, p.mu_mismatch_pps);
        const Pmf arr = arrival_pmf(pps, p.slot_s);
        const Pmf dep = departure_pmf(z, gamma, p.sinr_std_db, p.slot_s, p.packet_bits);

        const Eigen::MatrixXd omega = transition_matrix(arr, dep, p.buffer_size);
        for (Eigen::Index r = 0; r < omega.rows(); ++r)
            CHECK(std::abs(omega.row(r).sum() - 1.0) < 1e-10);

        const Eigen::VectorXd alpha = steady_state(omega);
        CHECK(std::abs(alpha.sum() - 1.0) < 1e-10);
        CHECK((omega.transpose() * alpha - alpha).lpNorm<Eigen::Infinity>() < 1e-10);
        CHECK((alpha - steady_state_power(omega)).lpNorm<Eigen::Infinity>() < 1e-8);

        const double drops = expected_drops(alpha, arr, dep, p.buffer_size);
        CHECK(drops >= 0.0);
        CHECK(drops <= arr.mean() + 1e-12);

        double mean_queue = 0.0;
        for (Eigen::Index k = 1; k < alpha.size(); ++k) mean_queue += static_cast<double>(k) * alpha(k);
        CHECK(mean_queue <= p.buffer_size);

        const double theta = loss_ratio(drops, pps, p.slot_s);
        CHECK(theta >= 0.0);
        CHECK(theta <= 1.0);
    }
}

TEST_CASE("link_metrics composition") {
    const LinkParams p = default_link(10.0);

    SUBCASE("BitCom has no coding-queue term") {
        const LinkMetrics m = link_metrics(Mode::Bit, 1e6, p);
        CHECK(m.scq_delay_s == 0.0);
        CHECK(m.delay_s == m.ptq_delay_s);
    }
    SUBCASE("SemCom at full budget floors at the coding-queue delay") {
        const LinkMetrics m = link_metrics(Mode::Sem, 15e6, p);
        CHECK(m.loss_ratio < 1e-9);
        const double scq = scq_delay(p.arrival_pps, p.tau, p.mu_match_pps, p.mu_mismatch_pps);
        const double pps = sem_ptq_arrival_pps(p.tau, p.mu_match_pps, p.mu_mismatch_pps);
        CHECK(m.delay_s == doctest::Approx(scq + m.mean_queue / pps).epsilon(1e-9));
    }
    SUBCASE("monotone in bandwidth over a 50-point grid") {
        double prev_delay = kInf, prev_loss = kInf, prev_rate = -kInf;
        for (int k = 0; k < 50; ++k) {
            const double z = 2e5 + (15e6 - 2e5) * static_cast<double>(k) / 49.0;
            const LinkMetrics m = link_metrics(Mode::Sem, z, p);
            CHECK(m.delay_s <= prev_delay * (1.0 + 1e-9));
            CHECK(m.loss_ratio <= prev_loss + 1e-12);
            CHECK(m.rate_msg_s > prev_rate);
            prev_delay = m.delay_s;
            prev_loss = m.loss_ratio;
            prev_rate = m.rate_msg_s;
        }
    }
}

TEST_CASE("queue model debug dump round numbers") {
    const LinkParams p = default_link(10.0);
    const LinkQueueModel model = build_link_queue_model(Mode::Sem, 1e6, p);
    const auto j = link_queue_model_to_json(model);
    CHECK(j.at("mode") == "sem");
    CHECK(j.at("z_hz") == 1e6);
    CHECK(j.at("steady_state").size() == static_cast<std::size_t>(p.buffer_size + 1));
}

TEST_SUITE_END();
