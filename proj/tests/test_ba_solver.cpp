#include <doctest.h>

#include <cmath>

#include "hsbnet/ba_solver.hpp"

using namespace hsbnet;

namespace {

BaProblem make_problem(const std::vector<Mode>& modes, const std::vector<double>& lower,
                       double budget) {
    BaProblem p;
    const int n = static_cast<int>(modes.size());
    p.mode = modes;
    p.budget_hz = budget;
    p.lower_hz = Eigen::Map<const Eigen::VectorXd>(lower.data(), n);
    p.spectral = Eigen::VectorXd::Constant(n, std::log2(1.0 + 10.0));  // 10 dB links
    p.tau = Eigen::VectorXd::Constant(n, 0.8);
    p.rho = Eigen::VectorXd::Constant(n, 1e-4);
    p.b2m.assign(n, B2MSurrogateParams{100.0, 1e6});
    for (int k = 0; k < n; ++k) p.mu_ids.push_back(k);
    return p;
}

void check_kkt(const BaProblem& p, const BaSolution& sol) {
    CHECK(std::abs(sol.z_hz.sum() - p.budget_hz) <= 1e-8 * p.budget_hz);
    for (int k = 0; k < p.size(); ++k) CHECK(sol.z_hz(k) >= p.lower_hz(k));

    // Unsaturated users share one marginal; saturated ones sit below it.
    for (int k = 0; k < p.size(); ++k) {
        const double marginal = ba_marginal_rate(p, k, sol.z_hz(k));
        if (sol.z_hz(k) > p.lower_hz(k) * (1.0 + 1e-9) + 1.0)
            CHECK(std::abs(marginal - sol.multiplier) <= 1e-6 * sol.multiplier);
        else
            CHECK(marginal <= sol.multiplier * (1.0 + 1e-6));
    }
}

}  // namespace

TEST_SUITE_BEGIN("ba_solver");

TEST_CASE("two identical SemCom users split the budget evenly") {
    const BaProblem p = make_problem({Mode::Sem, Mode::Sem}, {2e5, 2e5}, 15e6);
    const BaSolution sol = solve_ba_for_bs(p);
    CHECK(sol.z_hz(0) == doctest::Approx(7.5e6).epsilon(1e-9));
    CHECK(sol.z_hz(1) == doctest::Approx(7.5e6).epsilon(1e-9));
    check_kkt(p, sol);
}

TEST_CASE("a lone BitCom user takes the whole budget") {
    const BaProblem p = make_problem({Mode::Bit}, {3e5}, 15e6);
    const BaSolution sol = solve_ba_for_bs(p);
    CHECK(sol.z_hz(0) == doctest::Approx(15e6).epsilon(1e-12));
}

TEST_CASE("surplus goes to the strongest BitCom marginal when SemCom saturates") {
    // Tiny beta: SemCom marginals collapse below the linear BitCom slope.
    BaProblem p = make_problem({Mode::Sem, Mode::Bit, Mode::Bit}, {3e5, 3e5, 3e5}, 10e6);
    p.b2m[0] = B2MSurrogateParams{1.0, 1e5};
    p.rho(1) = 2e-4;  // strictly better than user 2
    p.rho(2) = 1e-4;
    const BaSolution sol = solve_ba_for_bs(p);
    CHECK(sol.z_hz(1) == doctest::Approx(10e6 - 2.0 * 3e5).epsilon(1e-9));
    CHECK(sol.z_hz(2) == doctest::Approx(3e5).epsilon(1e-12));
}

TEST_CASE("tied BitCom marginals split the surplus evenly") {
    const BaProblem p = make_problem({Mode::Bit, Mode::Bit}, {1e5, 1e5}, 4e6);
    const BaSolution sol = solve_ba_for_bs(p);
    CHECK(sol.z_hz(0) == doctest::Approx(2e6).epsilon(1e-9));
    CHECK(sol.z_hz(1) == doctest::Approx(2e6).epsilon(1e-9));
}

TEST_CASE("mixed two-user fixture beats the grid oracle") {
    BaProblem p = make_problem({Mode::Sem, Mode::Bit}, {4e5, 2e5}, 6e6);
    p.rho(1) = 1.5e-4;
    const BaSolution sol = solve_ba_for_bs(p);
    const BaSolution grid = brute_force_ba(p, 10000);
    CHECK(sol.objective >= grid.objective * (1.0 - 1e-3));
    check_kkt(p, sol);
}

TEST_CASE("mixed three-user fixture beats the grid oracle") {
    BaProblem p = make_problem({Mode::Sem, Mode::Sem, Mode::Bit}, {4e5, 3e5, 2e5}, 9e6);
    p.b2m[1] = B2MSurrogateParams{140.0, 1.6e6};
    p.rho(2) = 1.2e-4;
    const BaSolution sol = solve_ba_for_bs(p);
    const BaSolution grid = brute_force_ba(p, 600);
    CHECK(sol.objective >= grid.objective * (1.0 - 1e-3));
    CHECK(sol.objective >= grid.objective - 1e-6 * grid.objective);
    check_kkt(p, sol);
}

TEST_CASE("brute force oracle basics") {
    SUBCASE("single user gets the budget at any grid") {
        const BaProblem p = make_problem({Mode::Sem}, {1e5}, 5e6);
        CHECK(brute_force_ba(p, 3).z_hz(0) == 5e6);
    }
    SUBCASE("symmetric pair lands within one grid step of even") {
        const BaProblem p = make_problem({Mode::Sem, Mode::Sem}, {1e5, 1e5}, 5e6);
        const BaSolution grid = brute_force_ba(p, 1000);
        CHECK(std::abs(grid.z_hz(0) - 2.5e6) <= (5e6 - 2e5) / 1000.0 + 1e-9);
    }
}

TEST_CASE("lower bounds above the budget are rejected") {
    const BaProblem p = make_problem({Mode::Sem, Mode::Bit}, {9e6, 8e6}, 15e6);
    CHECK_THROWS_AS(solve_ba_for_bs(p), InfeasibleBudget);
}

TEST_SUITE_END();
