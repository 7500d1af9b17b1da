#pragma once

#include <Eigen/Dense>

#include "hsbnet/common.hpp"

namespace hsbnet {

/// Probability mass function on the support {0, 1, ..., size()-1}.
///
/// Supports are finite: constructors truncate the tail once its mass drops
/// below kPmfTailEps and renormalize so the entries sum to 1 within kProbTol.
class Pmf {
  public:
    Pmf() : p_(Eigen::VectorXd::Ones(1)) {}

    /// Takes raw non-negative weights, truncates the tail and renormalizes.
    explicit Pmf(Eigen::VectorXd weights);

    static Pmf point_mass(Eigen::Index k);

    const Eigen::VectorXd& probs() const { return p_; }
    double operator()(Eigen::Index k) const {
        return (k >= 0 && k < p_.size()) ? p_(k) : 0.0;
    }
    Eigen::Index size() const { return p_.size(); }
    Eigen::Index max_support() const { return p_.size() - 1; }

    double mean() const;
    /// Pr{X <= k}, with the usual conventions outside the support.
    double cdf(Eigen::Index k) const;

  private:
    Eigen::VectorXd p_;
};

/// Poisson PMF with the given mean, truncated at tail mass < kPmfTailEps.
Pmf poisson_pmf(double mean);

}  // namespace hsbnet
