#include "hsbnet/ba_solver.hpp"

#include <cmath>

namespace hsbnet {

namespace {

constexpr double kBudgetRelTol = 1e-8;

// SemCom demand at multiplier nu: z where tau*beta*s/(c + z s) = nu, floored
// at the lower bound.
double sem_demand(const BaProblem& p, int k, double nu) {
    const double s = p.spectral(k);
    const double z = (p.tau(k) * p.b2m[k].beta_msg_s / nu) - p.b2m[k].knee_bit_s / s;
    return std::max(z, p.lower_hz(k));
}

}  // namespace

double ba_user_rate(const BaProblem& p, int k, double z_hz) {
    const double bit_rate = z_hz * p.spectral(k);
    return p.mode[k] == Mode::Sem ? p.tau(k) * re_eval(bit_rate, p.b2m[k])
                                  : p.rho(k) * bit_rate;
}

double ba_marginal_rate(const BaProblem& p, int k, double z_hz) {
    const double s = p.spectral(k);
    return p.mode[k] == Mode::Sem ? p.tau(k) * s * re_derivative(z_hz * s, p.b2m[k])
                                  : p.rho(k) * s;
}

double ba_objective(const BaProblem& p, const Eigen::VectorXd& z) {
    double total = 0.0;
    for (int k = 0; k < p.size(); ++k) total += ba_user_rate(p, k, z(k));
    return total;
}

BaSolution solve_ba_for_bs(const BaProblem& p) {
    const int n = p.size();
    if (n == 0) throw std::invalid_argument("solve_ba_for_bs: empty user set");
    if (static_cast<int>(p.b2m.size()) != n || p.lower_hz.size() != n)
        throw std::invalid_argument("solve_ba_for_bs: inconsistent problem arrays");

    const double bound_sum = p.lower_hz.sum();
    if (bound_sum > p.budget_hz * (1.0 + kBudgetRelTol))
        throw InfeasibleBudget("solve_ba_for_bs: lower bounds exceed the budget");

    std::vector<int> sem, bit;
    for (int k = 0; k < n; ++k) (p.mode[k] == Mode::Sem ? sem : bit).push_back(k);

    BaSolution sol;
    sol.z_hz = p.lower_hz;
    double surplus = p.budget_hz - bound_sum;

    // Constant BitCom marginals; the best one caps how low the shared
    // multiplier can usefully go.
    double best_bit_marginal = -kInf;
    for (int k : bit) best_bit_marginal = std::max(best_bit_marginal, ba_marginal_rate(p, k, 0.0));

    if (surplus > 0.0 && !sem.empty()) {
        // Total SemCom demand at multiplier nu, beyond the lower bounds.
        const auto sem_extra = [&](double nu) {
            double extra = 0.0;
            for (int k : sem) extra += sem_demand(p, k, nu) - p.lower_hz(k);
            return extra;
        };

        double nu_hi = 0.0;  // above every bound marginal: all users stay at bounds
        for (int k : sem) nu_hi = std::max(nu_hi, ba_marginal_rate(p, k, p.lower_hz(k)));
        double nu_lo = nu_hi;
        for (int guard = 0; guard < 2000 && sem_extra(nu_lo) < surplus; ++guard) nu_lo *= 0.5;

        // Multiplier where SemCom users alone absorb the whole surplus.
        double lo = nu_lo, hi = nu_hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (sem_extra(mid) >= surplus ? lo : hi) = mid;
        }
        const double nu_full = 0.5 * (lo + hi);

        if (bit.empty() || nu_full >= best_bit_marginal) {
            // SemCom absorbs everything; BitCom users sit at their bounds.
            sol.multiplier = nu_full;
            for (int k : sem) sol.z_hz(k) = sem_demand(p, k, nu_full);
            // Spread the bisection residue over unsaturated users to meet the
            // budget exactly.
            double residue = p.budget_hz - sol.z_hz.sum();
            std::vector<int> unsat;
            for (int k : sem)
                if (sol.z_hz(k) > p.lower_hz(k)) unsat.push_back(k);
            if (!unsat.empty()) {
                const double share = residue / static_cast<double>(unsat.size());
                for (int k : unsat) sol.z_hz(k) = std::max(p.lower_hz(k), sol.z_hz(k) + share);
            } else if (!sem.empty() && residue > 0.0) {
                sol.z_hz(sem.front()) += residue;
            }
            surplus = 0.0;
        } else {
            // The best BitCom marginal wins below nu = m*: SemCom users fill
            // up to that level, the rest of the surplus goes to BitCom.
            sol.multiplier = best_bit_marginal;
            for (int k : sem) sol.z_hz(k) = sem_demand(p, k, best_bit_marginal);
            // BitCom entries still sit at their bounds inside z_hz here.
            surplus = std::max(p.budget_hz - sol.z_hz.sum(), 0.0);
        }
    }

    if (surplus > 0.0) {
        if (bit.empty()) {
            // No concave users and leftover budget: pile it on the first user
            // (objective indifferent only when sem handled above; with a lone
            // linear user this is optimal).
            sol.z_hz(0) += surplus;
        } else {
            // Even split among the BitCom users tied at the best marginal.
            std::vector<int> winners;
            for (int k : bit)
                if (ba_marginal_rate(p, k, 0.0) >= best_bit_marginal * (1.0 - 1e-12))
                    winners.push_back(k);
            const double share = surplus / static_cast<double>(winners.size());
            for (int k : winners) sol.z_hz(k) += share;
            if (sol.multiplier == 0.0) sol.multiplier = best_bit_marginal;
        }
    }

    sol.objective = ba_objective(p, sol.z_hz);
    return sol;
}

BaSolution brute_force_ba(const BaProblem& p, int grid_steps) {
    const int n = p.size();
    if (n < 1 || n > 3) throw std::invalid_argument("brute_force_ba: supports 1 to 3 users");
    if (grid_steps < 1) throw std::invalid_argument("brute_force_ba: grid_steps < 1");

    BaSolution best;
    best.objective = -kInf;

    if (n == 1) {
        best.z_hz = Eigen::VectorXd::Constant(1, p.budget_hz);
        best.objective = ba_objective(p, best.z_hz);
        return best;
    }

    const auto consider = [&](const Eigen::VectorXd& z) {
        for (int k = 0; k < n; ++k)
            if (z(k) < p.lower_hz(k)) return;
        const double obj = ba_objective(p, z);
        if (obj > best.objective) {
            best.objective = obj;
            best.z_hz = z;
        }
    };

    if (n == 2) {
        const double free_budget = p.budget_hz - p.lower_hz.sum();
        Eigen::VectorXd z(2);
        for (int t = 0; t <= grid_steps; ++t) {
            const double extra = free_budget * static_cast<double>(t) / grid_steps;
            z << p.lower_hz(0) + extra, p.budget_hz - (p.lower_hz(0) + extra);
            consider(z);
        }
        return best;
    }

    const double free_budget = p.budget_hz - p.lower_hz.sum();
    Eigen::VectorXd z(3);
    for (int t0 = 0; t0 <= grid_steps; ++t0) {
        const double e0 = free_budget * static_cast<double>(t0) / grid_steps;
        for (int t1 = 0; t0 + t1 <= grid_steps; ++t1) {
            const double e1 = free_budget * static_cast<double>(t1) / grid_steps;
            z << p.lower_hz(0) + e0, p.lower_hz(1) + e1,
                p.budget_hz - (p.lower_hz(0) + e0) - (p.lower_hz(1) + e1);
            consider(z);
        }
    }
    return best;
}

}  // namespace hsbnet
