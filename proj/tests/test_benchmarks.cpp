#include <doctest.h>

#include "hsbnet/benchmarks.hpp"
#include "test_oracles.hpp"

using namespace hsbnet;

TEST_SUITE_BEGIN("benchmarks");

TEST_CASE("max-SINR association") {
    NetworkScenario sc = generate_scenario(testing::small_config(3, 2, 15e6), 5);
    sc.mean_sinr_db << 10.0, 12.0,  // MU0 -> BS1
                        8.0,  8.0,  // tie -> BS0
                        9.0,  3.0;  // MU2 -> BS0
    const std::vector<int> serving = ua_max_sinr(sc);
    CHECK(serving == std::vector<int>{1, 0, 0});

    NetworkScenario one_bs = generate_scenario(testing::small_config(3, 1, 15e6), 5);
    CHECK(ua_max_sinr(one_bs) == std::vector<int>{0, 0, 0});
}

TEST_CASE("knowledge-matching mode selection is strict") {
    NetworkScenario sc = generate_scenario(testing::small_config(3, 1, 15e6), 5);
    sc.tau << 0.9, 0.8, 0.6;
    const std::vector<Mode> mode = ms_knowledge_threshold(sc);
    CHECK(mode[0] == Mode::Sem);
    CHECK(mode[1] == Mode::Bit);
    CHECK(mode[2] == Mode::Bit);
}

TEST_CASE("SINR mode selection is strict") {
    NetworkScenario sc = generate_scenario(testing::small_config(3, 1, 15e6), 5);
    sc.mean_sinr_db.col(0) << 10.0, 6.0, 0.0;
    const std::vector<Mode> mode = ms_sinr_threshold(sc, {0, 0, 0});
    CHECK(mode[0] == Mode::Bit);
    CHECK(mode[1] == Mode::Sem);
    CHECK(mode[2] == Mode::Sem);
}

TEST_CASE("water-filling") {
    SUBCASE("equal gains split evenly") {
        Eigen::VectorXd gains = Eigen::VectorXd::Constant(3, 5.0);
        Eigen::VectorXd floors = Eigen::VectorXd::Constant(3, 1e5);
        const Eigen::VectorXd z = ba_water_filling(gains, floors, 9e6);
        for (int k = 0; k < 3; ++k) CHECK(z(k) == doctest::Approx(3e6).epsilon(1e-9));
    }
    SUBCASE("single user takes the budget") {
        const Eigen::VectorXd z = ba_water_filling(Eigen::VectorXd::Constant(1, 2.0),
                                                   Eigen::VectorXd::Zero(1), 7e6);
        CHECK(z(0) == doctest::Approx(7e6).epsilon(1e-9));
    }
    SUBCASE("two unequal gains match the textbook closed form") {
        Eigen::VectorXd gains(2);
        gains << 2.0, 0.5;  // 1/g = 0.5, 2.0
        const double budget = 10.0;
        const Eigen::VectorXd z = ba_water_filling(gains, Eigen::VectorXd::Zero(2), budget);
        // level = (Z + 1/g1 + 1/g2)/2; z_k = level - 1/g_k.
        CHECK(z(0) == doctest::Approx((budget + 2.0 - 0.5) / 2.0).epsilon(1e-9));
        CHECK(z(1) == doctest::Approx((budget + 0.5 - 2.0) / 2.0).epsilon(1e-9));
    }
    SUBCASE("floors hold and the budget is exhausted") {
        Eigen::VectorXd gains(3), floors(3);
        gains << 10.0, 1.0, 0.01;
        floors << 2.0, 1.0, 50.0;  // the weak user is pinned high
        const Eigen::VectorXd z = ba_water_filling(gains, floors, 60.0);
        CHECK(z.sum() == doctest::Approx(60.0).epsilon(1e-9));
        for (int k = 0; k < 3; ++k) CHECK(z(k) >= floors(k) - 1e-12);
    }
    SUBCASE("floors beyond the budget are rejected") {
        CHECK_THROWS_AS(ba_water_filling(Eigen::VectorXd::Constant(2, 1.0),
                                         Eigen::VectorXd::Constant(2, 6.0), 10.0),
                        InfeasibleBudget);
    }
}

TEST_CASE("even split") {
    const Eigen::VectorXd z = ba_even(3, 15e6);
    for (int k = 0; k < 3; ++k) CHECK(z(k) == doctest::Approx(5e6).epsilon(1e-12));
    CHECK(ba_even(1, 15e6)(0) == 15e6);
}

TEST_SUITE_END();
