#include "hsbnet/pmf.hpp"

#include <cmath>
#include <vector>

namespace hsbnet {

Pmf::Pmf(Eigen::VectorXd weights) {
    if (weights.size() == 0) throw std::invalid_argument("Pmf: empty weight vector");
    if (weights.minCoeff() < 0.0) throw std::invalid_argument("Pmf: negative weight");

    const double total = weights.sum();
    if (total <= 0.0) throw std::invalid_argument("Pmf: zero total mass");

    // Drop the trailing tail once its mass falls below the truncation threshold.
    Eigen::Index last = weights.size() - 1;
    double tail = 0.0;
    while (last > 0 && tail + weights(last) < kPmfTailEps * total) {
        tail += weights(last);
        --last;
    }
    p_ = weights.head(last + 1) / weights.head(last + 1).sum();
}

Pmf Pmf::point_mass(Eigen::Index k) {
    if (k < 0) throw std::invalid_argument("Pmf: negative support point");
    Pmf out;
    out.p_ = Eigen::VectorXd::Zero(k + 1);
    out.p_(k) = 1.0;
    return out;
}

double Pmf::mean() const {
    double m = 0.0;
    for (Eigen::Index k = 1; k < p_.size(); ++k) m += static_cast<double>(k) * p_(k);
    return m;
}

double Pmf::cdf(Eigen::Index k) const {
    if (k < 0) return 0.0;
    if (k >= p_.size()) return 1.0;
    return p_.head(k + 1).sum();
}

Pmf poisson_pmf(double mean) {
    if (mean < 0.0) throw std::invalid_argument("poisson_pmf: negative mean");
    if (mean == 0.0) return Pmf::point_mass(0);

    // p_{k+1} = p_k * mean / (k+1); grow until the remaining tail is negligible.
    std::vector<double> probs;
    double pk = std::exp(-mean);
    double acc = pk;
    probs.push_back(pk);
    // Guard for large means where exp(-mean) underflows: fall back to the mode
    // and expand both ways is unnecessary here, per-slot means stay small.
    while (1.0 - acc >= kPmfTailEps && probs.size() < 100000) {
        const auto k = static_cast<double>(probs.size() - 1);
        pk *= mean / (k + 1.0);
        probs.push_back(pk);
        acc += pk;
    }
    Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(probs.data(), static_cast<Eigen::Index>(probs.size()));
    return Pmf(w);
}

}  // namespace hsbnet
