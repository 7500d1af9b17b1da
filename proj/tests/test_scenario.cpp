#include <doctest.h>

#include <nlohmann/json.hpp>

#include "hsbnet/scenario.hpp"

using namespace hsbnet;
using nlohmann::json;

// Frozen after the first verified run of the generator (seed 42, defaults).
#define HSBNET_SINR_FIXTURE 29.218368515851409

TEST_SUITE_BEGIN("scenario");

TEST_CASE("generation is deterministic in (config, seed)") {
    const ScenarioConfig cfg;
    const NetworkScenario a = generate_scenario(cfg, 42);
    const NetworkScenario b = generate_scenario(cfg, 42);
    CHECK(a == b);
    const NetworkScenario c = generate_scenario(cfg, 43);
    CHECK_FALSE(a == c);
}

TEST_CASE("default scenario carries the built-in parameter set") {
    const NetworkScenario sc = generate_scenario(ScenarioConfig{}, 42);
    CHECK(sc.num_mus == 200);
    CHECK(sc.num_bss == 10);
    CHECK(sc.bandwidth_hz(0) == 15e6);
    CHECK(sc.slot_s == 1e-3);
    CHECK(sc.packet_bits == 800);
    CHECK(sc.buffer_size == 20);
    CHECK(sc.arrival_pps(7) == 1000.0);
    CHECK(sc.mu_match_pps(7) == doctest::Approx(1.0 / 8e-4));
    CHECK(sc.mu_mismatch_pps(7) == doctest::Approx(1.0 / 1e-3));
    CHECK(sc.latency_cap_s == 0.02);
    CHECK(sc.loss_cap == 0.01);
}

TEST_CASE("sampled fields respect their ranges over many seeds") {
    const ScenarioConfig cfg = [] {
        ScenarioConfig c;
        c.num_mus = 20;
        c.num_bss = 3;
        return c;
    }();
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const NetworkScenario sc = generate_scenario(cfg, seed);
        for (int i = 0; i < sc.num_mus; ++i) {
            CHECK(sc.tau(i) > 0.0);
            CHECK(sc.tau(i) <= 1.0);
            CHECK(sc.tau(i) >= cfg.tau_min);
            CHECK(sc.rate_min_msg_s(i) >= cfg.rate_min_low_msg_s);
            CHECK(sc.rate_min_msg_s(i) <= cfg.rate_min_high_msg_s);
            CHECK(sc.mu_pos_m.col(i).norm() <= cfg.deployment_radius_m + 1e-9);
            const double load = sc.arrival_pps(i) *
                                mean_service_time(sc.tau(i), sc.mu_match_pps(i), sc.mu_mismatch_pps(i));
            CHECK(load < 1.0);
            for (int j = 0; j < sc.num_bss; ++j) {
                CHECK(sc.rho(i, j) > 0.0);
                CHECK(sc.rho(i, j) < 1.0);
                CHECK(sc.b2m_beta_msg_s(i, j) > 0.0);
                CHECK(sc.b2m_knee_bit_s(i, j) > 0.0);
            }
        }
    }
}

TEST_CASE("stability violation surfaces after the retry cap") {
    ScenarioConfig cfg;
    cfg.num_mus = 2;
    cfg.arrival_rate_pps = 2000.0;  // lambda E[I] >= 1.6 for every tau
    CHECK_THROWS_AS(generate_scenario(cfg, 1), StabilityViolation);
}

TEST_CASE("mean_sinr closed-form anchors") {
    ScenarioConfig cfg;
    cfg.num_mus = 1;
    cfg.num_bss = 1;
    NetworkScenario sc = generate_scenario(cfg, 7);

    // At the reference distance the log term vanishes.
    sc.mu_pos_m.col(0) << 0.0, 0.0;
    sc.bs_pos_m.col(0) << cfg.pathloss.d0_m, 0.0;
    const double at_d0 = mean_sinr(0, 0, sc);
    CHECK(at_d0 == doctest::Approx(cfg.tx_power_dbm - cfg.pathloss.pl0_db - cfg.pathloss.noise_dbm)
                       .epsilon(1e-12));

    // Doubling the distance with n = 3.5 costs 10 * 3.5 * log10(2) dB.
    sc.bs_pos_m.col(0) << 50.0, 0.0;
    const double near = mean_sinr(0, 0, sc);
    sc.bs_pos_m.col(0) << 100.0, 0.0;
    const double far = mean_sinr(0, 0, sc);
    CHECK(near - far == doctest::Approx(10.536049848239342).epsilon(1e-9));
}

TEST_CASE("mean_sinr is non-increasing in distance") {
    ScenarioConfig cfg;
    cfg.num_mus = 1;
    cfg.num_bss = 1;
    NetworkScenario sc = generate_scenario(cfg, 7);
    sc.mu_pos_m.col(0) << 0.0, 0.0;
    double prev = kInf;
    for (double d = 0.5; d < 400.0; d *= 1.3) {
        sc.bs_pos_m.col(0) << d, 0.0;
        const double s = mean_sinr(0, 0, sc);
        CHECK(s <= prev + 1e-12);
        prev = s;
    }
}

TEST_CASE("mean_sinr default-config regression fixture") {
    const NetworkScenario sc = generate_scenario(ScenarioConfig{}, 42);
    // Frozen from the first verified evaluation of the path-loss formula.
    CHECK(sc.mean_sinr_db(0, 0) == doctest::Approx(HSBNET_SINR_FIXTURE).epsilon(1e-12));
    CHECK(sc.mean_sinr_db(0, 0) == mean_sinr(0, 0, sc));
}

TEST_CASE("aggregate interference grows with the MU count only") {
    ScenarioConfig cfg;
    cfg.num_mus = 10;
    cfg.num_bss = 2;
    cfg.pathloss.interference_per_mu_db = 0.1;
    const NetworkScenario small = generate_scenario(cfg, 3);

    cfg.num_mus = 40;
    const NetworkScenario crowded = generate_scenario(cfg, 3);

    // Same MU/BS geometry prefix is not guaranteed across counts, so compare
    // through the closed form at a pinned distance instead.
    NetworkScenario probe = small;
    probe.mu_pos_m.col(0) << 0.0, 0.0;
    probe.bs_pos_m.col(0) << 100.0, 0.0;
    const double sinr_small = mean_sinr(0, 0, probe);

    NetworkScenario probe2 = crowded;
    probe2.mu_pos_m.col(0) << 0.0, 0.0;
    probe2.bs_pos_m.col(0) << 100.0, 0.0;
    const double sinr_crowded = mean_sinr(0, 0, probe2);

    CHECK(sinr_small - sinr_crowded == doctest::Approx(0.1 * 30.0).epsilon(1e-9));

    // More BSs leave the interference untouched.
    cfg.num_bss = 6;
    NetworkScenario probe3 = generate_scenario(cfg, 3);
    probe3.mu_pos_m.col(0) << 0.0, 0.0;
    probe3.bs_pos_m.col(0) << 100.0, 0.0;
    CHECK(mean_sinr(0, 0, probe3) == doctest::Approx(sinr_crowded).epsilon(1e-12));
}

TEST_CASE("config validation diagnostics") {
    SUBCASE("missing document") {
        const auto errors = config_diagnostics(json());
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].find("expected a JSON object") != std::string::npos);
    }
    SUBCASE("empty object falls back to defaults") {
        const ScenarioConfig cfg = validate_config(json::object());
        CHECK(cfg.num_mus == 200);
        CHECK(cfg.loss_cap == 0.01);
    }
    SUBCASE("out-of-range loss cap") {
        const auto errors = config_diagnostics(json{{"loss_cap", 1.5}});
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].find("loss_cap") != std::string::npos);
        CHECK_THROWS_AS(validate_config(json{{"loss_cap", 1.5}}), ConfigError);
    }
    SUBCASE("type errors and unknown fields carry paths") {
        const json bad{{"num_mus", "many"}, {"mystery", 1}};
        const auto errors = config_diagnostics(bad);
        CHECK(errors.size() == 2);
    }
    SUBCASE("full default file reproduces the defaults") {
        const ScenarioConfig cfg = validate_config(config_to_json(ScenarioConfig{}));
        CHECK(cfg.num_mus == 200);
        CHECK(cfg.num_bss == 10);
        CHECK(cfg.bandwidth_budget_hz == 15e6);
        CHECK(cfg.slot_length_s == 1e-3);
        CHECK(cfg.solver.stepsize0 == 1e-6);
    }
}

TEST_CASE("scenario JSON round trip is exact") {
    ScenarioConfig cfg;
    cfg.num_mus = 12;
    cfg.num_bss = 3;
    const NetworkScenario sc = generate_scenario(cfg, 99);
    const NetworkScenario back = scenario_from_json(scenario_to_json(sc));
    CHECK(sc == back);
}

TEST_SUITE_END();
