#pragma once

#include "pfdyn/bundle.hpp"
#include "pfdyn/stationary.hpp"
#include "pfdyn/verifiers.hpp"

#include <vector>

namespace pfdyn {

/// sqrt(|theta1 - theta2|²_{V0'} + |chi1 - chi2|²), the product norm of V0' × H.
double product_distance(const State& a, const State& b);

struct AttractionOptions {
    /// Fit on the last `tail_fraction` of the time span.
    double tail_fraction = 0.5;
    /// Distances at or below this are solver noise and excluded from the fit.
    double floor = 1e-8;
    std::size_t min_points = 3;
};

struct AttractionReport {
    Verdict verdict = Verdict::inconclusive;
    double kappa = 0.0;          // fitted decay rate of the surrogate distance
    double log_prefactor = 0.0;  // intercept of log distance against t
    double r_squared = 0.0;
    bool floor_censored = false;
    bool monotone = true;        // surrogate nonincreasing over the fitted points
    std::size_t fit_points = 0;
    std::vector<double> times;
    std::vector<double> distances;  // max over members of the distance to the target set
};

/// Target set: catalog equilibria (theta ≡ 1, chi*) together with the final states
/// of the other members. At each common snapshot time the surrogate is the largest
/// member distance to that set; log distance is fitted linearly in t on the tail.
/// Pass requires kappa > 0, R² >= min_r_squared and monotone decay.
AttractionReport attraction_fit(const std::vector<TrajectoryRecord>& records,
                                const std::vector<Equilibrium>& catalog,
                                const AttractionOptions& options = {},
                                double min_r_squared = 0.9);

}  // namespace pfdyn
