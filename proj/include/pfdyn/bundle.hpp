#pragma once

#include "pfdyn/trajectory.hpp"

#include <cstdint>
#include <vector>

namespace pfdyn {

/// Initial states sharing one grid, with their d_X-radius around a reference state.
struct Bundle {
    State reference;
    std::vector<State> members;
    double radius = 0.0;  // max_i d_X(member_i, reference)
};

/// max over members of d_X(member, reference). Throws DimensionError on mixed grids.
double bundle_radius(const std::vector<State>& members, const State& reference,
                     const Potential& potential, const MetricParams& params = {});

/// `count` members (theta_ref exp(s f_theta), chi_ref + s f_chi) with random smooth
/// directions f; the common scale s is set by bisection so the radius equals
/// `target_radius` to 1e-6 relative.
Bundle perturbed_bundle(const State& reference, int count, double target_radius,
                        std::uint64_t seed, const Potential& potential,
                        const MetricParams& params = {}, int modes = 4);

/// Integrates every member with its own Stepper on `workers` threads. Records come
/// back in member order and do not depend on the worker count.
std::vector<TrajectoryRecord> run_bundle(const std::vector<State>& members,
                                         const Potential& potential, const StepConfig& config,
                                         const TrajectoryOptions& options, int workers);

}  // namespace pfdyn
