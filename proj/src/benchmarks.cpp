#include "hsbnet/benchmarks.hpp"

#include <cmath>

#include "hsbnet/b2m.hpp"

namespace hsbnet {

std::vector<int> ua_max_sinr(const NetworkScenario& sc) {
    std::vector<int> serving(sc.num_mus, 0);
    for (int i = 0; i < sc.num_mus; ++i) {
        int best = 0;
        for (int j = 1; j < sc.num_bss; ++j)
            if (sc.mean_sinr_db(i, j) > sc.mean_sinr_db(i, best)) best = j;
        serving[i] = best;
    }
    return serving;
}

std::vector<Mode> ms_knowledge_threshold(const NetworkScenario& sc, double tau_cut) {
    std::vector<Mode> mode(sc.num_mus);
    for (int i = 0; i < sc.num_mus; ++i) mode[i] = sc.tau(i) > tau_cut ? Mode::Sem : Mode::Bit;
    return mode;
}

std::vector<Mode> ms_sinr_threshold(const NetworkScenario& sc, const std::vector<int>& serving,
                                    double sinr_cut_db) {
    std::vector<Mode> mode(sc.num_mus);
    for (int i = 0; i < sc.num_mus; ++i)
        mode[i] = sc.mean_sinr_db(i, serving[i]) > sinr_cut_db ? Mode::Bit : Mode::Sem;
    return mode;
}

Eigen::VectorXd ba_water_filling(const Eigen::VectorXd& gains_linear,
                                 const Eigen::VectorXd& floors_hz, double budget_hz) {
    const Eigen::Index n = gains_linear.size();
    if (n == 0) return {};
    if (floors_hz.size() != n)
        throw std::invalid_argument("ba_water_filling: floors size mismatch");
    if (floors_hz.sum() > budget_hz * (1.0 + 1e-9))
        throw InfeasibleBudget("ba_water_filling: floors exceed the budget");

    const Eigen::VectorXd inv_gain = gains_linear.cwiseInverse();
    const auto allocated = [&](double level) {
        return (level - inv_gain.array()).cwiseMax(floors_hz.array()).sum();
    };

    double lo = 0.0;  // allocated(0) = sum of floors <= budget
    double hi = budget_hz + inv_gain.maxCoeff();
    while (allocated(hi) < budget_hz) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (allocated(mid) < budget_hz ? lo : hi) = mid;
    }
    const double level = 0.5 * (lo + hi);

    Eigen::VectorXd z = (level - inv_gain.array()).cwiseMax(floors_hz.array());
    // Close the residual on the unfloored users so the budget is exhausted.
    const double residue = budget_hz - z.sum();
    Eigen::Index free_count = 0;
    for (Eigen::Index k = 0; k < n; ++k)
        if (z(k) > floors_hz(k)) ++free_count;
    if (free_count > 0) {
        const double share = residue / static_cast<double>(free_count);
        for (Eigen::Index k = 0; k < n; ++k)
            if (z(k) > floors_hz(k)) z(k) = std::max(floors_hz(k), z(k) + share);
    } else if (residue > 0.0) {
        z(0) += residue;  // all users floored: give the remainder to the first
    }
    return z;
}

Eigen::VectorXd ba_even(int n_users, double budget_hz) {
    if (n_users < 1) throw std::invalid_argument("ba_even: no users");
    return Eigen::VectorXd::Constant(n_users, budget_hz / static_cast<double>(n_users));
}

}  // namespace hsbnet
