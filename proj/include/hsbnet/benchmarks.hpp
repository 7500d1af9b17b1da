#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hsbnet/common.hpp"
#include "hsbnet/scenario.hpp"

namespace hsbnet {

/// Max-SINR association: each MU picks the BS with the strongest mean link;
/// ties go to the smallest BS index.
std::vector<int> ua_max_sinr(const NetworkScenario& sc);

/// MS-I: SemCom iff the knowledge-matching degree exceeds the cut (strict).
std::vector<Mode> ms_knowledge_threshold(const NetworkScenario& sc, double tau_cut = 0.8);

/// MS-II: BitCom iff the serving link's mean SINR exceeds the cut (strict).
std::vector<Mode> ms_sinr_threshold(const NetworkScenario& sc, const std::vector<int>& serving,
                                    double sinr_cut_db = 6.0);

/// BA-I: water-filling over linear channel gains with per-user floors;
/// z_i = max(floor_i, level - 1/gain_i) at the budget-exhausting level.
/// Throws InfeasibleBudget when the floors alone exceed the budget.
Eigen::VectorXd ba_water_filling(const Eigen::VectorXd& gains_linear,
                                 const Eigen::VectorXd& floors_hz, double budget_hz);

/// BA-II: even split of the budget.
Eigen::VectorXd ba_even(int n_users, double budget_hz);

}  // namespace hsbnet
