#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hsbnet/b2m.hpp"
#include "hsbnet/common.hpp"

namespace hsbnet {

/// One BS's bandwidth allocation subproblem: maximize the summed message
/// rates of its SemCom and BitCom users subject to sum(z) = budget and
/// per-user lower bounds (their feasibility thresholds).
struct BaProblem {
    std::vector<int> mu_ids;       // reporting only
    std::vector<Mode> mode;
    Eigen::VectorXd lower_hz;      // threshold bandwidths
    Eigen::VectorXd spectral;      // log2(1 + linear mean SINR) per user
    Eigen::VectorXd tau;           // SemCom entries
    std::vector<B2MSurrogateParams> b2m;
    Eigen::VectorXd rho;           // BitCom entries
    double budget_hz = 0.0;

    int size() const { return static_cast<int>(mode.size()); }
};

/// Message rate of user k at bandwidth z.
double ba_user_rate(const BaProblem& p, int k, double z_hz);

/// d(rate)/dz of user k at bandwidth z: decreasing for SemCom users,
/// constant for BitCom users.
double ba_marginal_rate(const BaProblem& p, int k, double z_hz);

double ba_objective(const BaProblem& p, const Eigen::VectorXd& z);

struct BaSolution {
    Eigen::VectorXd z_hz;
    double multiplier = 0.0;  // equalized marginal among unsaturated users
    double objective = 0.0;
};

/// KKT solve by bisection on the shared marginal-rate multiplier. The budget
/// is met to 1e-8 relative and every lower bound exactly. Throws
/// InfeasibleBudget when the bounds alone exceed the budget.
BaSolution solve_ba_for_bs(const BaProblem& p);

/// Exhaustive simplex grid search for problems of at most 3 users;
/// test oracle only.
BaSolution brute_force_ba(const BaProblem& p, int grid_steps);

}  // namespace hsbnet
