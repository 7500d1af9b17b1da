#include "hsbnet/dual_solver.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "hsbnet/format.hpp"

namespace hsbnet {

namespace {

// Budget feasibility comparisons tolerate solver-level rounding only.
constexpr double kBudgetSlack = 1e-9;

int num_mus_of(const ThresholdTable& t) { return static_cast<int>(t.sem_th.rows()); }
int num_bss_of(const ThresholdTable& t) { return static_cast<int>(t.sem_th.cols()); }

}  // namespace

Eigen::MatrixXd xi_coefficients(const Eigen::VectorXd& eta, const ThresholdTable& thresholds) {
    const int U = num_mus_of(thresholds);
    const int J = num_bss_of(thresholds);
    if (eta.size() != J) throw std::invalid_argument("xi_coefficients: eta size mismatch");
    if (eta.minCoeff() < 0.0) throw std::invalid_argument("xi_coefficients: negative multiplier");

    Eigen::MatrixXd xi(U, 2 * J);
    for (int i = 0; i < U; ++i) {
        for (int j = 0; j < J; ++j) {
            xi(i, j) = thresholds.sem_feasible(i, j)
                           ? thresholds.sem_rate_at_th(i, j) - eta(j) * thresholds.sem_th(i, j)
                           : -kInf;
            xi(i, J + j) = thresholds.bit_feasible(i, j)
                               ? thresholds.bit_rate_at_th(i, j) - eta(j) * thresholds.bit_th(i, j)
                               : -kInf;
        }
    }
    return xi;
}

Assignment assign(const Eigen::MatrixXd& xi, const ThresholdTable& thresholds) {
    const int U = static_cast<int>(xi.rows());
    const int J = static_cast<int>(xi.cols()) / 2;

    Assignment a;
    a.bs.resize(U);
    a.mode.resize(U);
    a.z_hz.resize(U);
    for (int i = 0; i < U; ++i) {
        int best = 0;
        for (int c = 1; c < 2 * J; ++c)
            if (xi(i, c) > xi(i, best)) best = c;  // ties keep the smallest index
        if (xi(i, best) == -kInf)
            throw NoFeasibleLink("assign: MU " + std::to_string(i) +
                                 " has no feasible (BS, mode) option");
        a.bs[i] = best < J ? best : best - J;
        a.mode[i] = best < J ? Mode::Sem : Mode::Bit;
        a.z_hz(i) = a.mode[i] == Mode::Sem ? thresholds.sem_th(i, a.bs[i])
                                           : thresholds.bit_th(i, a.bs[i]);
    }
    return a;
}

double assignment_demand(const Assignment& a, int i, const ThresholdTable& thresholds) {
    if (!a.active(i)) return 0.0;
    return a.mode[i] == Mode::Sem ? thresholds.sem_th(i, a.bs[i]) : thresholds.bit_th(i, a.bs[i]);
}

Eigen::VectorXd bs_loads(const Assignment& a, const ThresholdTable& thresholds, int num_bss) {
    Eigen::VectorXd loads = Eigen::VectorXd::Zero(num_bss);
    for (int i = 0; i < a.num_mus(); ++i)
        if (a.active(i)) loads(a.bs[i]) += assignment_demand(a, i, thresholds);
    return loads;
}

Eigen::VectorXd subgradient_step(const Eigen::VectorXd& eta, const Assignment& a,
                                 const ThresholdTable& thresholds, const Eigen::VectorXd& budgets,
                                 int iter, const StepsizeSchedule& schedule) {
    if (iter < 1) throw std::invalid_argument("subgradient_step: iter must be >= 1");
    const Eigen::VectorXd gradient = budgets - bs_loads(a, thresholds, static_cast<int>(budgets.size()));
    return (eta - schedule(iter) * gradient).cwiseMax(0.0);
}

RepairReport repair(Assignment& a, const Eigen::MatrixXd& xi, const ThresholdTable& thresholds,
                    const Eigen::VectorXd& budgets) {
    const int J = static_cast<int>(budgets.size());
    RepairReport report;
    Eigen::VectorXd loads = bs_loads(a, thresholds, J);

    while (true) {
        // Worst-overloaded BS first; smallest index on ties.
        int worst = -1;
        double worst_excess = kBudgetSlack;
        for (int j = 0; j < J; ++j) {
            const double excess = loads(j) - budgets(j);
            if (excess > worst_excess) {
                worst = j;
                worst_excess = excess;
            }
        }
        if (worst < 0) break;

        // The BS's MUs by descending demand; lowest MU index on ties.
        std::vector<int> movers;
        for (int i = 0; i < a.num_mus(); ++i)
            if (a.active(i) && a.bs[i] == worst) movers.push_back(i);
        std::stable_sort(movers.begin(), movers.end(), [&](int l, int r) {
            return assignment_demand(a, l, thresholds) > assignment_demand(a, r, thresholds);
        });
        if (movers.empty()) break;  // overloaded BS with no movable MU cannot occur

        // Move the first reallocatable MU; same-BS mode switches are allowed
        // and accounted against the freed demand. Options scored descending.
        bool placed = false;
        for (int mover : movers) {
            const double mover_demand = assignment_demand(a, mover, thresholds);
            std::vector<int> order(2 * J);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](int l, int r) { return xi(mover, l) > xi(mover, r); });
            for (int c : order) {
                const int j = c % J;
                const Mode m = c < J ? Mode::Sem : Mode::Bit;
                if (j == a.bs[mover] && m == a.mode[mover]) continue;
                if (xi(mover, c) == -kInf) continue;
                const double demand = m == Mode::Sem ? thresholds.sem_th(mover, j)
                                                     : thresholds.bit_th(mover, j);
                const double freed = j == worst ? mover_demand : 0.0;
                if (loads(j) - freed + demand <= budgets(j) + kBudgetSlack) {
                    loads(worst) -= mover_demand;
                    loads(j) += demand;
                    a.bs[mover] = j;
                    a.mode[mover] = m;
                    a.z_hz(mover) = demand;
                    ++report.moves;
                    placed = true;
                    break;
                }
            }
            if (placed) break;
        }
        if (!placed) {
            // No MU of the overloaded BS fits anywhere else: shed the
            // highest-demand one and carry on.
            const int victim = movers.front();
            loads(worst) -= assignment_demand(a, victim, thresholds);
            a.bs[victim] = -1;
            a.z_hz(victim) = 0.0;
            report.dropped.push_back(victim);
        }
    }

    a.dropped.insert(a.dropped.end(), report.dropped.begin(), report.dropped.end());
    return report;
}

double threshold_objective(const Assignment& a, const ThresholdTable& thresholds) {
    double total = 0.0;
    for (int i = 0; i < a.num_mus(); ++i) {
        if (!a.active(i)) continue;
        total += a.mode[i] == Mode::Sem ? thresholds.sem_rate_at_th(i, a.bs[i])
                                        : thresholds.bit_rate_at_th(i, a.bs[i]);
    }
    return total;
}

UaMsResult solve_ua_ms(const NetworkScenario& sc, const ThresholdTable& thresholds) {
    const int J = sc.num_bss;
    const SolverConfig& cfg = sc.config.solver;
    const Eigen::VectorXd& budgets = sc.bandwidth_hz;

    StepsizeSchedule schedule;
    schedule.eps0 = cfg.stepsize0;
    schedule.normalized = cfg.stepsize_normalized;
    schedule.z_max_hz = budgets.size() > 0 ? budgets.maxCoeff() : 1.0;

    DualState state;
    state.eta = Eigen::VectorXd::Constant(J, cfg.eta0);

    Assignment best;
    double best_primal = -kInf;
    bool best_clean = false;  // whether the best candidate needed no drops

    for (int l = 1; l <= cfg.max_iters; ++l) {
        const Eigen::MatrixXd xi = xi_coefficients(state.eta, thresholds);
        const Assignment raw = assign(xi, thresholds);

        Assignment candidate = raw;
        repair(candidate, xi, thresholds, budgets);
        const double primal = threshold_objective(candidate, thresholds);
        const bool clean = candidate.dropped.empty();
        if ((clean && !best_clean) || (clean == best_clean && primal > best_primal)) {
            best = candidate;
            best_primal = primal;
            best_clean = clean;
        }

        // Dual value at eta: sup of the doubled problem plus the budget term.
        double dual_value = state.eta.dot(budgets);
        for (int i = 0; i < sc.num_mus; ++i) dual_value += xi.row(i).maxCoeff();
        const double max_violation =
            (bs_loads(raw, thresholds, J) - budgets).cwiseMax(0.0).maxCoeff();
        state.trace.push_back({l, dual_value, primal, max_violation});

        const Eigen::VectorXd next = subgradient_step(state.eta, raw, thresholds, budgets, l, schedule);
        double rel_change = 0.0;
        for (int j = 0; j < J; ++j) {
            const double denom = std::max(std::abs(state.eta(j)), 1e-30);
            rel_change = std::max(rel_change, std::abs(next(j) - state.eta(j)) / denom);
        }
        state.eta = next;
        state.iters_run = l;
        if (rel_change < cfg.convergence_tol) {
            state.converged = true;
            break;
        }
    }

    return UaMsResult{best, std::move(state)};
}

std::string dual_trace_to_csv(const DualState& state) {
    std::ostringstream os;
    os << "iter,F_eta,primal,max_violation_hz\n";
    for (const DualTraceRow& r : state.trace)
        os << r.iter << ',' << fmt9(r.dual_value) << ',' << fmt9(r.primal_value) << ','
           << fmt9(r.max_violation_hz) << '\n';
    return os.str();
}

}  // namespace hsbnet
